#include "fsolink/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fsolink/errors.hpp"

namespace fsolink {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad(const std::string& where, const std::string& message) {
    throw ConfigError("config " + where + ": " + message);
}

double parse_double(const std::string& value, const std::string& where) {
    const std::string v = trim(value);
    double out = 0.0;
    const char* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(out))
        bad(where, "expected a finite number, got '" + value + "'");
    return out;
}

std::int64_t parse_int(const std::string& value, const std::string& where) {
    const std::string v = trim(value);
    std::int64_t out = 0;
    const char* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc{} || res.ptr != end)
        bad(where, "expected an integer, got '" + value + "'");
    return out;
}

std::uint64_t parse_uint(const std::string& value, const std::string& where) {
    const std::string v = trim(value);
    std::uint64_t out = 0;
    const char* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc{} || res.ptr != end)
        bad(where, "expected a non-negative integer, got '" + value + "'");
    return out;
}

int parse_bounded_int(const std::string& value, const std::string& where, int lo) {
    const std::int64_t v = parse_int(value, where);
    if (v < lo || v > std::numeric_limits<int>::max())
        bad(where, "value " + std::to_string(v) + " out of range (min " +
                       std::to_string(lo) + ")");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& value, const std::string& where) {
    const std::string v = trim(value);
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    bad(where, "expected true/false, got '" + value + "'");
}

std::vector<double> parse_grid(const std::string& value, const std::string& where) {
    std::vector<double> grid;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        if (trim(item).empty()) bad(where, "empty entry in grid");
        grid.push_back(parse_double(item, where));
    }
    if (grid.empty()) bad(where, "grid needs at least one Es/N0 value");
    return grid;
}

}  // namespace

void RunConfig::validate() const {
    scenario.validate();
    train.validate();
    if (grid.empty()) throw ConfigError("empty Es/N0 grid");
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (threads < 0) throw ConfigError("threads must be >= 0");
    if (channel_samples < 10)
        throw ConfigError("channel_samples must be at least 10");
    if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value,
                   const std::string& where) {
    const std::string v = trim(value);
    if (key == "user_mode") {
        if (v == "single_user") cfg.scenario.user_mode = UserMode::single_user;
        else if (v == "multiuser_allocation")
            cfg.scenario.user_mode = UserMode::multiuser_allocation;
        else if (v == "multiuser_interference")
            cfg.scenario.user_mode = UserMode::multiuser_interference;
        else bad(where, "unknown user_mode '" + v + "'");
    } else if (key == "n_users") {
        cfg.scenario.n_users = parse_bounded_int(v, where, 1);
    } else if (key == "combiner") {
        if (v == "egc") cfg.scenario.combiner = Combiner::egc;
        else if (v == "sc") cfg.scenario.combiner = Combiner::sc;
        else bad(where, "unknown combiner '" + v + "' (egc or sc)");
    } else if (key == "n_tx") {
        cfg.scenario.n_tx = parse_bounded_int(v, where, 1);
    } else if (key == "n_rx") {
        cfg.scenario.n_rx = parse_bounded_int(v, where, 1);
    } else if (key == "turbulence") {
        if (v == "strong") {
            cfg.scenario.regime = TurbulenceRegime::strong();
            cfg.scenario.turbulence_enabled = true;
        } else if (v == "moderate") {
            cfg.scenario.regime = TurbulenceRegime::moderate();
            cfg.scenario.turbulence_enabled = true;
        } else if (v == "weak") {
            cfg.scenario.regime = TurbulenceRegime::weak();
            cfg.scenario.turbulence_enabled = true;
        } else if (v == "off") {
            cfg.scenario.turbulence_enabled = false;
        } else {
            bad(where, "unknown turbulence regime '" + v + "'");
        }
    } else if (key == "alpha") {
        const double a = parse_double(v, where);
        if (!(a > 0.0)) bad(where, "alpha must be positive");
        cfg.scenario.regime = TurbulenceRegime(a, cfg.scenario.regime.beta);
    } else if (key == "beta") {
        const double b = parse_double(v, where);
        if (!(b > 0.0)) bad(where, "beta must be positive");
        cfg.scenario.regime = TurbulenceRegime(cfg.scenario.regime.alpha, b);
    } else if (key == "modulation_order") {
        cfg.scenario.modulation_order = parse_bounded_int(v, where, 2);
    } else if (key == "detector") {
        if (v == "qam_ml_perfect") cfg.scenario.detector = DetectorKind::qam_ml_perfect;
        else if (v == "qam_ml_blind") cfg.scenario.detector = DetectorKind::qam_ml_blind;
        else if (v == "qam_dnn") cfg.scenario.detector = DetectorKind::qam_dnn;
        else if (v == "end_to_end_dnn")
            cfg.scenario.detector = DetectorKind::end_to_end_dnn;
        else bad(where, "unknown detector '" + v + "'");
    } else if (key == "conversion_gain") {
        const double g = parse_double(v, where);
        if (!(g > 0.0)) bad(where, "conversion_gain must be positive");
        cfg.scenario.conversion_gain = g;
    } else if (key == "batch_size") {
        cfg.train.batch_size = parse_bounded_int(v, where, 1);
    } else if (key == "samples_per_batch_ratio") {
        cfg.train.samples_per_batch_ratio = parse_bounded_int(v, where, 1);
    } else if (key == "iterations") {
        cfg.train.iterations = parse_bounded_int(v, where, 1);
    } else if (key == "learning_rate") {
        const double lr = parse_double(v, where);
        if (!(lr > 0.0)) bad(where, "learning_rate must be positive");
        cfg.train.learning_rate = lr;
    } else if (key == "train_es_n0_db") {
        cfg.train.train_es_n0_db = parse_double(v, where);
    } else if (key == "hidden_layers") {
        cfg.train.hidden_layers = parse_bounded_int(v, where, 0);
    } else if (key == "hidden_width") {
        cfg.train.hidden_width = parse_bounded_int(v, where, 1);
    } else if (key == "activation") {
        if (v != "relu") bad(where, "only the relu activation is available");
    } else if (key == "loss") {
        if (v != "softmax_cross_entropy")
            bad(where, "only the softmax_cross_entropy loss is available");
    } else if (key == "optimizer") {
        if (v != "adam") bad(where, "only the adam optimizer is available");
    } else if (key == "grid") {
        cfg.grid = parse_grid(v, where);
    } else if (key == "trials") {
        const std::int64_t t = parse_int(v, where);
        if (t < 1) bad(where, "trials must be at least 1");
        cfg.trials = t;
    } else if (key == "seed") {
        cfg.seed = parse_uint(v, where);
        cfg.train.seed = cfg.seed;
    } else if (key == "out_dir") {
        if (v.empty()) bad(where, "out_dir must not be empty");
        cfg.out_dir = v;
    } else if (key == "threads") {
        cfg.threads = parse_bounded_int(v, where, 0);
    } else if (key == "rx_model") {
        cfg.rx_model = v;
    } else if (key == "tx_model") {
        cfg.tx_model = v;
    } else if (key == "svg") {
        cfg.svg = parse_bool(v, where);
    } else if (key == "channel_samples") {
        const std::int64_t n = parse_int(v, where);
        if (n < 10) bad(where, "channel_samples must be at least 10");
        cfg.channel_samples = n;
    } else {
        bad(where, "unknown key '" + key + "'");
    }
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string::npos) bad(where, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) bad(where, "missing key");
        apply_setting(cfg, key, value, where);
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("config --set: expected key=value, got '" + assignment + "'");
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    if (key.empty()) throw ConfigError("config --set: missing key");
    apply_setting(cfg, key, value, "--set");
}

std::string user_mode_name(UserMode mode) {
    switch (mode) {
        case UserMode::single_user: return "single_user";
        case UserMode::multiuser_allocation: return "multiuser_allocation";
        case UserMode::multiuser_interference: return "multiuser_interference";
    }
    return "?";
}

std::string combiner_name(Combiner combiner) {
    return combiner == Combiner::egc ? "egc" : "sc";
}

std::string detector_name(DetectorKind detector) {
    switch (detector) {
        case DetectorKind::qam_ml_perfect: return "qam_ml_perfect";
        case DetectorKind::qam_ml_blind: return "qam_ml_blind";
        case DetectorKind::qam_dnn: return "qam_dnn";
        case DetectorKind::end_to_end_dnn: return "end_to_end_dnn";
    }
    return "?";
}

std::string describe_config(const RunConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "user_mode = " << user_mode_name(cfg.scenario.user_mode) << '\n'
        << "n_users = " << cfg.scenario.n_users << '\n'
        << "combiner = " << combiner_name(cfg.scenario.combiner) << '\n'
        << "n_tx = " << cfg.scenario.n_tx << '\n'
        << "n_rx = " << cfg.scenario.n_rx << '\n';
    if (cfg.scenario.turbulence_enabled)
        out << "alpha = " << cfg.scenario.regime.alpha << '\n'
            << "beta = " << cfg.scenario.regime.beta << '\n';
    else
        out << "turbulence = off\n";
    out << "modulation_order = " << cfg.scenario.modulation_order << '\n'
        << "detector = " << detector_name(cfg.scenario.detector) << '\n'
        << "conversion_gain = " << cfg.scenario.conversion_gain << '\n'
        << "batch_size = " << cfg.train.batch_size << '\n'
        << "samples_per_batch_ratio = " << cfg.train.samples_per_batch_ratio << '\n'
        << "iterations = " << cfg.train.iterations << '\n'
        << "learning_rate = " << cfg.train.learning_rate << '\n'
        << "train_es_n0_db = " << cfg.train.train_es_n0_db << '\n'
        << "hidden_layers = " << cfg.train.hidden_layers << '\n'
        << "hidden_width = " << cfg.train.hidden_width << '\n';
    out << "grid = ";
    for (std::size_t i = 0; i < cfg.grid.size(); ++i)
        out << (i ? "," : "") << cfg.grid[i];
    out << '\n'
        << "trials = " << cfg.trials << '\n'
        << "seed = " << cfg.seed << '\n'
        << "out_dir = " << cfg.out_dir << '\n'
        << "threads = " << cfg.threads << '\n';
    if (!cfg.rx_model.empty()) out << "rx_model = " << cfg.rx_model << '\n';
    if (!cfg.tx_model.empty()) out << "tx_model = " << cfg.tx_model << '\n';
    out << "svg = " << (cfg.svg ? "true" : "false") << '\n'
        << "channel_samples = " << cfg.channel_samples << '\n';
    return out.str();
}

}  // namespace fsolink
