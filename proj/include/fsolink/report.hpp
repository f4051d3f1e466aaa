#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fsolink/modem.hpp"
#include "fsolink/pipeline.hpp"

namespace fsolink {

// Write-to-temp-then-rename so readers never observe a half-written file.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Columns: es_n0_db,trials,errors,ser,ci_low,ci_high
std::string ser_csv(const SerCurve& curve);
SerCurve read_ser_csv(const std::filesystem::path& path);

// Columns: iteration,mean_batch_loss
std::string loss_csv(const LossReport& loss);

// Columns: symbol,re,im
std::string constellation_csv(const Constellation& c);

struct PlotSeries {
    std::string label;
    SerCurve curve;
};

// Self-contained SVG: linear Es/N0 axis, log SER axis, Wilson interval
// whiskers, one colored polyline per series, legend.
std::string ser_plot_svg(std::span<const PlotSeries> series, const std::string& title);

struct ManifestEntry {
    std::string path;  // relative to the run directory
    std::string sha256;
};

struct RunManifest {
    std::string command;
    std::string version;
    std::uint64_t seed = 0;
    int threads = 0;
    double wall_seconds = 0.0;
    std::string config_text;
    std::vector<ManifestEntry> outputs;
};

// Hashes every listed output and writes <out_dir>/manifest.json. Call it
// after all other files are in place: its presence marks a complete run.
void write_manifest(const std::filesystem::path& out_dir, const RunManifest& manifest);

}  // namespace fsolink
