#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fsolink/pipeline.hpp"

namespace fsolink {

// Everything a run needs, before command-line flags override it.
struct RunConfig {
    ScenarioSpec scenario;
    TrainConfig train;
    std::vector<double> grid = {5.0, 10.0, 15.0, 20.0, 25.0};  // Es/N0 in dB
    std::int64_t trials = 100000;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int threads = 0;  // 0 = all hardware threads
    std::string rx_model;
    std::string tx_model;
    bool svg = false;
    std::int64_t channel_samples = 1000000;

    void validate() const;
};

// Applies one `key=value` setting. `where` names the source for error
// messages ("line 12", "--set"). Unknown keys and bad values throw
// ConfigError.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value,
                   const std::string& where);

// `key = value` lines, blanks ignored, `#` starts a comment.
RunConfig parse_config_text(const std::string& text);

RunConfig load_config(const std::filesystem::path& path);

// "key=value" as given to --set.
void apply_override(RunConfig& cfg, const std::string& assignment);

std::string user_mode_name(UserMode mode);
std::string combiner_name(Combiner combiner);
std::string detector_name(DetectorKind detector);

// The configuration as canonical `key = value` lines (round-trips through the
// parser); used for run manifests.
std::string describe_config(const RunConfig& cfg);

}  // namespace fsolink
