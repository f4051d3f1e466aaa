#include "fsolink/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fsolink/errors.hpp"

namespace fsolink {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string fmt6(double v) { return fmt("%.6g", v); }

double parse_field_double(const std::string& field, const std::string& where) {
    double out = 0.0;
    const char* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, out);
    if (res.ec != std::errc{} || res.ptr != end)
        throw IoError(where + ": bad number '" + field + "'");
    return out;
}

std::int64_t parse_field_int(const std::string& field, const std::string& where) {
    std::int64_t out = 0;
    const char* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, out);
    if (res.ec != std::errc{} || res.ptr != end)
        throw IoError(where + ": bad integer '" + field + "'");
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string item;
    std::istringstream in(line);
    while (std::getline(in, item, ',')) fields.push_back(item);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

}  // namespace

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto parent = path.parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw IoError("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw IoError("sha256 digest failed");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for hashing");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return sha256_hex(buffer.str());
}

std::string ser_csv(const SerCurve& curve) {
    std::ostringstream out;
    out << "es_n0_db,trials,errors,ser,ci_low,ci_high\n";
    for (const SerPoint& p : curve.points)
        out << fmt6(p.es_n0_db) << ',' << p.trials << ',' << p.errors << ','
            << fmt6(p.ser) << ',' << fmt6(p.ci_low) << ',' << fmt6(p.ci_high) << '\n';
    return out.str();
}

SerCurve read_ser_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "es_n0_db,trials,errors,ser,ci_low,ci_high")
        throw IoError(path.string() + ": unexpected header '" + line + "'");
    SerCurve curve;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        const auto fields = split_csv_line(line);
        if (fields.size() != 6) throw IoError(where + ": expected 6 columns");
        SerPoint p;
        p.es_n0_db = parse_field_double(fields[0], where);
        p.trials = parse_field_int(fields[1], where);
        p.errors = parse_field_int(fields[2], where);
        p.ser = parse_field_double(fields[3], where);
        p.ci_low = parse_field_double(fields[4], where);
        p.ci_high = parse_field_double(fields[5], where);
        curve.points.push_back(p);
    }
    return curve;
}

std::string loss_csv(const LossReport& loss) {
    std::ostringstream out;
    out << "iteration,mean_batch_loss\n";
    for (std::size_t i = 0; i < loss.mean_batch_loss.size(); ++i)
        out << (i + 1) << ',' << fmt6(loss.mean_batch_loss[i]) << '\n';
    return out.str();
}

std::string constellation_csv(const Constellation& c) {
    std::ostringstream out;
    out << "symbol,re,im\n";
    for (int m = 0; m < c.order; ++m)
        out << m << ',' << fmt("%.17g", c.points[static_cast<std::size_t>(m)].real())
            << ',' << fmt("%.17g", c.points[static_cast<std::size_t>(m)].imag())
            << '\n';
    return out.str();
}

std::string ser_plot_svg(std::span<const PlotSeries> series, const std::string& title) {
    constexpr double kWidth = 760, kHeight = 540;
    constexpr double kLeft = 80, kRight = 30, kTop = 50, kBottom = 60;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    static const char* kColors[] = {"#1f6fb4", "#d6482a", "#2a8a4a", "#8a4aa0",
                                    "#b08a1f", "#1f9a9a", "#8a6a4a", "#5a5a5a"};
    constexpr int kColorCount = 8;

    double x_min = 0.0, x_max = 1.0;
    double min_pos = 1.0;
    bool have_x = false;
    std::set<double> x_values;
    for (const PlotSeries& s : series)
        for (const SerPoint& p : s.curve.points) {
            if (!have_x) {
                x_min = x_max = p.es_n0_db;
                have_x = true;
            } else {
                x_min = std::min(x_min, p.es_n0_db);
                x_max = std::max(x_max, p.es_n0_db);
            }
            x_values.insert(p.es_n0_db);
            if (p.ser > 0.0) min_pos = std::min(min_pos, p.ser);
            if (p.ci_low > 0.0) min_pos = std::min(min_pos, p.ci_low);
        }
    if (!have_x) {
        x_min = 0.0;
        x_max = 1.0;
    }
    if (x_max == x_min) {
        x_min -= 1.0;
        x_max += 1.0;
    }
    double log_lo = std::floor(std::log10(min_pos)) - 1.0;
    log_lo = std::max(log_lo, -12.0);
    const double log_hi = 0.0;  // SER axis tops out at 1

    const auto x_px = [&](double db) {
        return kLeft + (db - x_min) / (x_max - x_min) * plot_w;
    };
    const auto y_px = [&](double ser) {
        const double l = std::clamp(
            ser > 0.0 ? std::log10(ser) : log_lo, log_lo, log_hi);
        return kTop + (log_hi - l) / (log_hi - log_lo) * plot_h;
    };

    std::ostringstream svg;
    svg.setf(std::ios::fixed);
    svg.precision(2);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
        << kHeight << "\">\n";
    svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">"
        << xml_escape(title) << "</text>\n";

    // gridlines and ticks
    svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (int d = static_cast<int>(log_lo); d <= 0; ++d) {
        const double y = y_px(std::pow(10.0, d));
        svg << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\""
            << kLeft + plot_w << "\" y2=\"" << y
            << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\">1e" << d << "</text>\n";
    }
    std::vector<double> x_ticks(x_values.begin(), x_values.end());
    if (x_ticks.size() > 12 || x_ticks.empty()) {
        x_ticks.clear();
        const double step = (x_max - x_min) / 6.0;
        for (int i = 0; i <= 6; ++i) x_ticks.push_back(x_min + i * step);
    }
    for (double db : x_ticks) {
        const double x = x_px(db);
        svg << "<line x1=\"" << x << "\" y1=\"" << kTop << "\" x2=\"" << x
            << "\" y2=\"" << kTop + plot_h
            << "\" stroke=\"#eee\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << x << "\" y=\"" << kTop + plot_h + 18
            << "\" text-anchor=\"middle\">" << fmt6(db) << "</text>\n";
    }
    svg << "</g>\n";
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">Es/N0 (dB)</text>\n";
    svg << "<text x=\"22\" y=\"" << kTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 22 "
        << kTop + plot_h / 2 << ")\">Symbol error rate</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = kColors[si % kColorCount];
        const auto& pts = series[si].curve.points;
        // interval whiskers
        for (const SerPoint& p : pts) {
            const double x = x_px(p.es_n0_db);
            const double y1 = y_px(p.ci_high);
            const double y2 = y_px(p.ci_low);
            svg << "<line x1=\"" << x << "\" y1=\"" << y1 << "\" x2=\"" << x
                << "\" y2=\"" << y2 << "\" stroke=\"" << color
                << "\" stroke-width=\"1\" opacity=\"0.6\"/>\n";
        }
        // polyline segments between consecutive positive-SER points
        std::ostringstream path;
        bool open = false;
        for (const SerPoint& p : pts) {
            if (p.ser <= 0.0) {
                open = false;
                continue;
            }
            path << (open ? 'L' : 'M') << x_px(p.es_n0_db) << ' ' << y_px(p.ser)
                 << ' ';
            open = true;
        }
        const std::string d = path.str();
        if (!d.empty())
            svg << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.8\"/>\n";
        for (const SerPoint& p : pts) {
            if (p.ser > 0.0)
                svg << "<circle cx=\"" << x_px(p.es_n0_db) << "\" cy=\""
                    << y_px(p.ser) << "\" r=\"3.2\" fill=\"" << color << "\"/>\n";
            else  // zero observed errors: open marker pinned to the floor
                svg << "<circle cx=\"" << x_px(p.es_n0_db) << "\" cy=\""
                    << kTop + plot_h << "\" r=\"3.2\" fill=\"white\" stroke=\""
                    << color << "\" stroke-width=\"1.5\"/>\n";
        }
    }

    // legend
    const double legend_x = kLeft + 14;
    double legend_y = kTop + 16;
    svg << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = kColors[si % kColorCount];
        svg << "<line x1=\"" << legend_x << "\" y1=\"" << legend_y - 4
            << "\" x2=\"" << legend_x + 26 << "\" y2=\"" << legend_y - 4
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << legend_x + 32 << "\" y=\"" << legend_y << "\">"
            << xml_escape(series[si].label) << "</text>\n";
        legend_y += 18;
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

void write_manifest(const std::filesystem::path& out_dir, const RunManifest& manifest) {
    nlohmann::json j;
    j["command"] = manifest.command;
    j["version"] = manifest.version;
    j["seed"] = manifest.seed;
    j["threads"] = manifest.threads;
    j["wall_seconds"] = manifest.wall_seconds;
    j["config"] = manifest.config_text;
    j["outputs"] = nlohmann::json::array();
    for (const ManifestEntry& e : manifest.outputs)
        j["outputs"].push_back({{"path", e.path}, {"sha256", e.sha256}});
    write_text_atomic(out_dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace fsolink
