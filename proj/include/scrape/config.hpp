#pragma once
#include <stdexcept>
#include <string>

#include "scrape/env.hpp"
#include "scrape/perception.hpp"
#include "scrape/ppo.hpp"

namespace scrape {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PerceptionRunConfig {
    int width = 320;
    int height = 240;
    double camera_standoff = 0.25;
    double depth_noise_std = 0.001;
    double artifact_rate = 0.01;
    double depth_ratio = 0.5;
    RoiFractions roi;
    int n_scenes = 20;
    uint64_t render_seed = 12;
};

// Flat key=value run configuration covering every tunable default. Unknown
// keys are rejected; serialization round-trips exactly.
struct RunConfig {
    EnvConfig env;
    PpoConfig ppo;
    PerceptionRunConfig perception;

    int eval_episodes = 20;
    uint64_t eval_seed = 100;            // base material-profile seed for eval
    int compare_profiles = 5;
    int episodes_per_profile = 20;
    uint64_t compare_seed = 500;         // base material-profile seed for compare
    std::string out_dir = "out";
};

// Parses `key = value` lines; `#` starts a comment; blank lines ignored.
// Throws ConfigError on unknown keys or malformed values.
RunConfig parse_config_text(const std::string& text);

// Throws IoError if the file cannot be read.
RunConfig load_config(const std::string& path);

// Canonical text of every key (sorted), suitable for the resolved-config
// file written next to run outputs. parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& config);

inline constexpr const char* kFormatVersion = "scrape-run v1";

}  // namespace scrape
