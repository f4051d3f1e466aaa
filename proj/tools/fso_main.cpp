#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fsolink/channel_stats.hpp"
#include "fsolink/config.hpp"
#include "fsolink/errors.hpp"
#include "fsolink/mlp.hpp"
#include "fsolink/pipeline.hpp"
#include "fsolink/report.hpp"
#include "fsolink/version.hpp"

namespace {

using namespace fsolink;
namespace fs = std::filesystem;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir;
    std::string grid;
    std::int64_t trials = -1;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool svg = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "configuration file (key = value)");
    cmd->add_option("--set", args.sets, "override one setting, key=value")
        ->take_all();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--grid", args.grid, "Es/N0 grid in dB, comma separated");
    cmd->add_option("--trials", args.trials, "Monte Carlo trials per grid point");
    cmd->add_option_function<std::uint64_t>(
           "--seed",
           [&args](const std::uint64_t& s) {
               args.seed = s;
               args.seed_given = true;
           },
           "master random seed");
    cmd->add_flag("--svg", args.svg, "also write an SVG plot");
}

RunConfig resolve_config(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty()) cfg = load_config(args.config_path);
    for (const std::string& s : args.sets) apply_override(cfg, s);
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (!args.grid.empty()) apply_setting(cfg, "grid", args.grid, "--grid");
    if (args.trials >= 0) {
        if (args.trials < 1) throw ConfigError("--trials must be at least 1");
        cfg.trials = args.trials;
    }
    if (args.seed_given) {
        cfg.seed = args.seed;
        cfg.train.seed = args.seed;
    }
    if (args.svg) cfg.svg = true;
    cfg.validate();
    return cfg;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

ManifestEntry hashed_entry(const fs::path& out_dir, const std::string& name) {
    return {name, sha256_file(out_dir / name)};
}

Constellation constellation_from_transmitter(const MlpParams& tx) {
    if (tx.dims.back() != 2)
        throw ConfigError("transmitter model must produce I/Q pairs");
    const int order = tx.dims.front();
    std::vector<std::complex<double>> raw(static_cast<std::size_t>(order));
    for (int m = 0; m < order; ++m) {
        const std::vector<double> iq = forward(tx, one_hot(m, order).dense());
        raw[static_cast<std::size_t>(m)] = {iq[0], iq[1]};
    }
    return normalize_constellation(std::move(raw));
}

int run_train(const CommonArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    const RunConfig cfg = resolve_config(args);
    const fs::path out_dir(cfg.out_dir);

    RunManifest manifest;
    manifest.command = "train";
    manifest.version = kVersion;
    manifest.seed = cfg.seed;
    manifest.threads = cfg.threads;
    manifest.config_text = describe_config(cfg);

    if (cfg.scenario.detector == DetectorKind::qam_dnn) {
        const ReceiverTraining trained = train_receiver_dnn(cfg.scenario, cfg.train);
        save_params(trained.receiver, out_dir / "receiver.mlp");
        write_text_atomic(out_dir / "loss.csv", loss_csv(trained.loss));
        manifest.outputs.push_back(hashed_entry(out_dir, "receiver.mlp"));
        manifest.outputs.push_back(hashed_entry(out_dir, "loss.csv"));
        std::printf("trained receiver detector: %d iterations, final loss %.5f\n",
                    cfg.train.iterations, trained.loss.mean_batch_loss.back());
    } else if (cfg.scenario.detector == DetectorKind::end_to_end_dnn) {
        const EndToEndTraining trained = train_end_to_end(cfg.scenario, cfg.train);
        save_params(trained.transmitter, out_dir / "transmitter.mlp");
        save_params(trained.receiver, out_dir / "receiver.mlp");
        write_text_atomic(out_dir / "loss.csv", loss_csv(trained.loss));
        write_text_atomic(out_dir / "constellation.csv",
                          constellation_csv(trained.constellation));
        manifest.outputs.push_back(hashed_entry(out_dir, "transmitter.mlp"));
        manifest.outputs.push_back(hashed_entry(out_dir, "receiver.mlp"));
        manifest.outputs.push_back(hashed_entry(out_dir, "loss.csv"));
        manifest.outputs.push_back(hashed_entry(out_dir, "constellation.csv"));
        std::printf("trained end-to-end pair: %d iterations, final loss %.5f\n",
                    cfg.train.iterations, trained.loss.mean_batch_loss.back());
    } else {
        throw ConfigError(
            "train needs detector = qam_dnn or end_to_end_dnn (classical "
            "detectors have nothing to train)");
    }

    manifest.wall_seconds = seconds_since(start);
    write_manifest(out_dir, manifest);
    std::printf("outputs in %s\n", out_dir.string().c_str());
    return 0;
}

int run_sweep(const CommonArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    const RunConfig cfg = resolve_config(args);
    const fs::path out_dir(cfg.out_dir);

    MlpParams receiver;
    Constellation learned;
    DetectorModels models;
    if (cfg.scenario.detector == DetectorKind::qam_dnn ||
        cfg.scenario.detector == DetectorKind::end_to_end_dnn) {
        if (cfg.rx_model.empty())
            throw ConfigError("this detector needs rx_model = <receiver.mlp path>");
        receiver = load_params(cfg.rx_model);
        models.receiver = &receiver;
    }
    if (cfg.scenario.detector == DetectorKind::end_to_end_dnn) {
        if (cfg.tx_model.empty())
            throw ConfigError("this detector needs tx_model = <transmitter.mlp path>");
        learned = constellation_from_transmitter(load_params(cfg.tx_model));
        models.tx_constellation = &learned;
    }

    const SerCurve curve = evaluate_ser(cfg.scenario, models, cfg.grid, cfg.trials,
                                        cfg.seed, cfg.threads);
    for (const SerPoint& p : curve.points)
        std::printf("Es/N0 %6.4g dB: ser %.6g [%.6g, %.6g] (%lld/%lld)\n",
                    p.es_n0_db, p.ser, p.ci_low, p.ci_high,
                    static_cast<long long>(p.errors),
                    static_cast<long long>(p.trials));

    write_text_atomic(out_dir / "ser.csv", ser_csv(curve));
    RunManifest manifest;
    manifest.command = "sweep";
    manifest.version = kVersion;
    manifest.seed = cfg.seed;
    manifest.threads = cfg.threads;
    manifest.config_text = describe_config(cfg);
    manifest.outputs.push_back(hashed_entry(out_dir, "ser.csv"));
    if (cfg.svg) {
        const PlotSeries series[] = {
            {detector_name(cfg.scenario.detector), curve}};
        write_text_atomic(out_dir / "plot.svg",
                          ser_plot_svg(series, "Symbol error rate"));
        manifest.outputs.push_back(hashed_entry(out_dir, "plot.svg"));
    }
    manifest.wall_seconds = seconds_since(start);
    write_manifest(out_dir, manifest);
    std::printf("outputs in %s\n", out_dir.string().c_str());
    return 0;
}

int run_validate_channel(const CommonArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    const RunConfig cfg = resolve_config(args);
    if (!cfg.scenario.turbulence_enabled)
        throw ConfigError("channel validation needs turbulence enabled");
    const fs::path out_dir(cfg.out_dir);

    const ChannelStatsReport report = compute_channel_stats(
        cfg.scenario.regime, cfg.channel_samples, cfg.seed);

    const double scint_err = std::abs(report.scintillation -
                                      report.scintillation_analytic) /
                             report.scintillation_analytic;
    const bool mean_ok = std::abs(report.mean - 1.0) <= 0.005;
    const bool scint_ok = scint_err <= 0.02;
    const bool ks_ok = report.ks_stat < report.ks_critical;
    const bool pdf_ok = std::abs(report.pdf_integral - 1.0) <= 1e-6;

    std::printf("alpha %.6g beta %.6g, %lld samples\n", report.alpha, report.beta,
                static_cast<long long>(report.samples));
    std::printf("mean intensity      %.6f (expect 1)              %s\n",
                report.mean, mean_ok ? "ok" : "FAIL");
    std::printf("scintillation index %.6f (analytic %.6f, err %.3g) %s\n",
                report.scintillation, report.scintillation_analytic, scint_err,
                scint_ok ? "ok" : "FAIL");
    std::printf("KS distance         %.6g (1%% critical %.6g)      %s\n",
                report.ks_stat, report.ks_critical, ks_ok ? "ok" : "FAIL");
    std::printf("pdf mass on (0,%.4g] %.9f                  %s\n", report.cap,
                report.pdf_integral, pdf_ok ? "ok" : "FAIL");

    std::ostringstream csv;
    csv << "metric,value\n"
        << "alpha," << report.alpha << '\n'
        << "beta," << report.beta << '\n'
        << "samples," << report.samples << '\n'
        << "mean," << report.mean << '\n'
        << "scintillation," << report.scintillation << '\n'
        << "scintillation_analytic," << report.scintillation_analytic << '\n'
        << "ks_stat," << report.ks_stat << '\n'
        << "ks_critical," << report.ks_critical << '\n'
        << "pdf_integral," << report.pdf_integral << '\n'
        << "intensity_cap," << report.cap << '\n';
    write_text_atomic(out_dir / "channel_stats.csv", csv.str());

    RunManifest manifest;
    manifest.command = "validate-channel";
    manifest.version = kVersion;
    manifest.seed = cfg.seed;
    manifest.threads = cfg.threads;
    manifest.config_text = describe_config(cfg);
    manifest.outputs.push_back(hashed_entry(out_dir, "channel_stats.csv"));
    manifest.wall_seconds = seconds_since(start);
    write_manifest(out_dir, manifest);

    if (mean_ok && scint_ok && ks_ok && pdf_ok) {
        std::printf("channel statistics consistent\n");
        return 0;
    }
    std::fprintf(stderr, "channel statistics outside tolerance\n");
    return 1;
}

int run_plot(const CommonArgs& args, const std::vector<std::string>& csv_paths,
             const std::vector<std::string>& labels, const std::string& title) {
    const auto start = std::chrono::steady_clock::now();
    const RunConfig cfg = resolve_config(args);
    const fs::path out_dir(cfg.out_dir);
    if (csv_paths.empty()) throw ConfigError("plot needs at least one ser.csv");
    if (!labels.empty() && labels.size() != csv_paths.size())
        throw ConfigError("--label count must match the CSV count");

    std::vector<PlotSeries> series;
    for (std::size_t i = 0; i < csv_paths.size(); ++i) {
        PlotSeries s;
        s.label = i < labels.size() ? labels[i]
                                    : fs::path(csv_paths[i]).parent_path().filename()
                                          .string();
        if (s.label.empty()) s.label = fs::path(csv_paths[i]).stem().string();
        s.curve = read_ser_csv(csv_paths[i]);
        series.push_back(std::move(s));
    }
    write_text_atomic(out_dir / "plot.svg", ser_plot_svg(series, title));

    RunManifest manifest;
    manifest.command = "plot";
    manifest.version = kVersion;
    manifest.seed = cfg.seed;
    manifest.threads = cfg.threads;
    manifest.config_text = describe_config(cfg);
    manifest.outputs.push_back(hashed_entry(out_dir, "plot.svg"));
    manifest.wall_seconds = seconds_since(start);
    write_manifest(out_dir, manifest);
    std::printf("wrote %s\n", (out_dir / "plot.svg").string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Free-space optical MIMO link simulator and detector trainer"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    CommonArgs train_args, sweep_args, validate_args, plot_args;
    std::vector<std::string> plot_csvs, plot_labels;
    std::string plot_title = "Symbol error rate";

    CLI::App* train = app.add_subcommand("train", "train a learned detector");
    add_common(train, train_args);
    CLI::App* sweep =
        app.add_subcommand("sweep", "Monte Carlo SER over an Es/N0 grid");
    add_common(sweep, sweep_args);
    CLI::App* validate = app.add_subcommand(
        "validate-channel", "cross-check turbulence sampling against its density");
    add_common(validate, validate_args);
    CLI::App* plot = app.add_subcommand("plot", "combine SER curves into one SVG");
    add_common(plot, plot_args);
    plot->add_option("csv", plot_csvs, "ser.csv files to plot");
    plot->add_option("--label", plot_labels, "legend label per CSV")->take_all();
    plot->add_option("--title", plot_title, "plot title");

    try {
        app.parse(argc, argv);
        if (train->parsed()) return run_train(train_args);
        if (sweep->parsed()) return run_sweep(sweep_args);
        if (validate->parsed()) return run_validate_channel(validate_args);
        if (plot->parsed()) return run_plot(plot_args, plot_csvs, plot_labels,
                                            plot_title);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const fsolink::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const fsolink::DivergenceError& e) {
        std::fprintf(stderr, "error: %s (iteration %d)\n", e.what(), e.iteration());
        return 3;
    } catch (const fsolink::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
