#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "roughness/simworld.hpp"
#include "roughness/training.hpp"

namespace roughness {

struct PatchConfig {
    double patch_length = 1.0;      // m along track
    double corridor_radius = 0.3;   // m either side of a wheel path
    std::size_t points_per_wheel = 40;

    void validate() const;
};

struct LabelingConfig {
    double cutoff_hz = 10.0;
    std::size_t taps = 40;
    double min_separation = 0.25;   // s between shock events
    double floor = 0.02;            // G
    double association_radius = 0.5;  // m

    void validate() const;
};

struct EvaluationConfig {
    double slow_speed = 15.0;       // mph
    double recovery_rate = 2.0;     // mph per second
    double lookahead = 10.0;        // m
    std::vector<double> reactive_triggers{0.05, 0.07, 0.1, 0.14, 0.2, 0.28, 0.4, 0.56, 0.8, 1.1, 1.6, 2.2};
    std::size_t proactive_settings = 40;  // mu values taken from score quantiles
    double fp_grid_max = 0.2;
    double match_tolerance = 0.02;  // relative completion-time window for matched pairs

    void validate() const;
};

/// Everything a command can be configured with. One JSON document with one
/// section per stage; any missing key keeps its default.
struct PipelineConfig {
    TerrainConfig terrain;
    SimConfig sim;
    PatchConfig patches;
    LabelingConfig labeling;
    TrainingConfig training;
    EvaluationConfig evaluation;

    void validate() const;
};

nlohmann::json config_to_json(const PipelineConfig& config);
nlohmann::json sim_to_json(const SimConfig& sim);
SimConfig sim_from_json(const nlohmann::json& doc);

/// Overlays `doc` onto the defaults. Throws SchemaError naming the first
/// unknown key or mistyped value.
PipelineConfig config_from_json(const nlohmann::json& doc);

/// Reads a config file and applies `overrides` of the form dotted.key=value
/// (value parsed as JSON, or taken as a string when it is not JSON). The
/// result is validated.
PipelineConfig load_config(const std::filesystem::path* file, const std::vector<std::string>& overrides);

std::uint64_t fnv1a64(std::string_view bytes);
/// 16 hex digits of FNV-1a over the canonical JSON of the resolved config.
std::string config_hash(const PipelineConfig& config);

/// Writes the resolved config as indented JSON.
void write_config(const std::filesystem::path& file, const PipelineConfig& config);

}  // namespace roughness
