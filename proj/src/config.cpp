#include "roughness/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "roughness/errors.hpp"

namespace roughness {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TerrainConfig, length, bump_density, height_min, height_max, base_amplitude,
                                   cluster_probability, cluster_spread, min_spacing, lateral_extent,
                                   half_width_min, half_width_max, half_length_min, half_length_max, end_margin)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SpeedProfile, mean_mph, amplitude_mph, wavelength, phase)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MountGeometry, laser_height, tilt, lateral_offset, forward_offset)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PoseErrorModel, enabled, z_error_rate, orientation_sigma_deg, dwell_mean,
                                   roll_scale)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ShockModel, gain, resonance_hz, resonance_damping, resonance_gain, imu_noise)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SimConfig, speed, mount, half_track, scan_frequency, angular_resolution_deg,
                                   pose_rate, pose_error, shock, seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PatchConfig, patch_length, corridor_radius, points_per_wheel)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(LabelingConfig, cutoff_hz, taps, min_separation, floor, association_radius)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EvaluationConfig, slow_speed, recovery_rate, lookahead, reactive_triggers,
                                   proactive_settings, fp_grid_max, match_tolerance)

namespace {

nlohmann::json params_to_json(const ParameterVector& p)
{
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t i = 0; i < ParameterVector::kSize; ++i) {
        const std::string key(ParameterVector::name(i));
        if (i == ParameterVector::kOmega)
            j[key] = p.omega;
        else
            j[key] = p.get(i);
    }
    return j;
}

ParameterVector params_from_json(const nlohmann::json& j)
{
    ParameterVector p;
    for (std::size_t i = 0; i < ParameterVector::kSize; ++i)
        p = p.with(i, j.at(std::string(ParameterVector::name(i))).get<double>());
    return p;
}

nlohmann::json training_to_json(const TrainingConfig& t)
{
    return {{"lambda", t.lambda},
            {"ruggedness_threshold", t.ruggedness_threshold},
            {"iterations", t.iterations},
            {"initial_b", params_to_json(t.initial_b)},
            {"initial_increments", t.initial_i}};
}

TrainingConfig training_from_json(const nlohmann::json& j)
{
    TrainingConfig t;
    t.lambda = j.at("lambda").get<double>();
    t.ruggedness_threshold = j.at("ruggedness_threshold").get<double>();
    t.iterations = j.at("iterations").get<int>();
    t.initial_b = params_from_json(j.at("initial_b"));
    const auto& inc = j.at("initial_increments");
    if (inc.size() != ParameterVector::kSize)
        throw SchemaError("training.initial_increments", "expected 13 values");
    for (std::size_t i = 0; i < ParameterVector::kSize; ++i)
        t.initial_i[i] = inc[i].get<double>();
    return t;
}

std::string type_name(const nlohmann::json& j)
{
    if (j.is_number_integer())
        return "integer";
    if (j.is_number())
        return "number";
    return j.type_name();
}

void check_type(const nlohmann::json& current, const nlohmann::json& value, const std::string& field)
{
    bool ok;
    if (current.is_boolean())
        ok = value.is_boolean();
    else if (current.is_number_unsigned())
        ok = value.is_number_unsigned() || (value.is_number_integer() && value.get<std::int64_t>() >= 0);
    else if (current.is_number_integer())
        ok = value.is_number_integer();
    else if (current.is_number())
        ok = value.is_number();
    else if (current.is_array()) {
        ok = value.is_array();
        for (const auto& e : value)
            ok = ok && e.is_number();
    } else
        ok = current.type() == value.type();
    if (!ok)
        throw SchemaError(field, "expected " + type_name(current) + ", got " + type_name(value));
}

void overlay(nlohmann::json& base, const nlohmann::json& patch, const std::string& path)
{
    if (!patch.is_object())
        throw SchemaError(path.empty() ? "config" : path, "expected an object");
    for (const auto& [key, value] : patch.items()) {
        const std::string field = path.empty() ? key : path + "." + key;
        const auto it = base.find(key);
        if (it == base.end())
            throw SchemaError(field, "unknown key");
        if (it->is_object())
            overlay(*it, value, field);
        else {
            check_type(*it, value, field);
            *it = value;
        }
    }
}

void apply_override(nlohmann::json& doc, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw UsageError("override '" + assignment + "' is not of the form key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
    if (value.is_discarded())
        value = text;

    // Build the nested patch {a: {b: value}} and reuse the checked overlay.
    nlohmann::json patch = value;
    std::string rest = key;
    std::vector<std::string> parts;
    for (std::size_t start = 0;;) {
        const auto dot = rest.find('.', start);
        parts.push_back(rest.substr(start, dot - start));
        if (dot == std::string::npos)
            break;
        start = dot + 1;
    }
    for (auto it = parts.rbegin(); it != parts.rend(); ++it)
        patch = nlohmann::json{{*it, patch}};
    overlay(doc, patch, "");
}

PipelineConfig from_full_json(const nlohmann::json& j)
{
    PipelineConfig c;
    try {
        c.terrain = j.at("terrain").get<TerrainConfig>();
        c.sim = j.at("sim").get<SimConfig>();
        c.patches = j.at("patches").get<PatchConfig>();
        c.labeling = j.at("labeling").get<LabelingConfig>();
        c.training = training_from_json(j.at("training"));
        c.evaluation = j.at("evaluation").get<EvaluationConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("config", e.what());
    }
    return c;
}

}  // namespace

void PatchConfig::validate() const
{
    if (!(patch_length > 0.0))
        throw ConfigError("patches.patch_length must be positive");
    if (!(corridor_radius > 0.0))
        throw ConfigError("patches.corridor_radius must be positive");
    if (points_per_wheel < 2)
        throw ConfigError("patches.points_per_wheel must be at least 2");
}

void LabelingConfig::validate() const
{
    if (!(cutoff_hz > 0.0))
        throw ConfigError("labeling.cutoff_hz must be positive");
    if (taps < 4 || taps % 2 != 0)
        throw ConfigError("labeling.taps must be even and at least 4");
    if (!(min_separation >= 0.0 && floor >= 0.0 && association_radius >= 0.0))
        throw ConfigError("labeling separation, floor and radius must be non-negative");
}

void EvaluationConfig::validate() const
{
    if (!(slow_speed > 0.0))
        throw ConfigError("evaluation.slow_speed must be positive");
    if (!(recovery_rate > 0.0))
        throw ConfigError("evaluation.recovery_rate must be positive");
    if (!(lookahead > 0.0))
        throw ConfigError("evaluation.lookahead must be positive");
    if (reactive_triggers.empty())
        throw ConfigError("evaluation.reactive_triggers must not be empty");
    for (double t : reactive_triggers)
        if (!(t > 0.0))
            throw ConfigError("evaluation.reactive_triggers must be positive");
    if (proactive_settings < 1)
        throw ConfigError("evaluation.proactive_settings must be at least 1");
    if (!(fp_grid_max > 0.0 && fp_grid_max <= 1.0))
        throw ConfigError("evaluation.fp_grid_max must lie in (0, 1]");
    if (!(match_tolerance > 0.0))
        throw ConfigError("evaluation.match_tolerance must be positive");
}

void PipelineConfig::validate() const
{
    terrain.validate();
    sim.validate();
    patches.validate();
    labeling.validate();
    if (!(labeling.cutoff_hz < sim.pose_rate / 2.0))
        throw ConfigError("labeling.cutoff_hz must lie below the IMU Nyquist frequency");
    training.validate();
    evaluation.validate();
}

nlohmann::json config_to_json(const PipelineConfig& c)
{
    return {{"terrain", c.terrain},       {"sim", c.sim},
            {"patches", c.patches},       {"labeling", c.labeling},
            {"training", training_to_json(c.training)}, {"evaluation", c.evaluation}};
}

nlohmann::json sim_to_json(const SimConfig& sim) { return sim; }

SimConfig sim_from_json(const nlohmann::json& doc)
{
    nlohmann::json base = SimConfig{};
    overlay(base, doc, "sim");
    try {
        return base.get<SimConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("sim", e.what());
    }
}

PipelineConfig config_from_json(const nlohmann::json& doc)
{
    nlohmann::json base = config_to_json(PipelineConfig{});
    overlay(base, doc, "");
    return from_full_json(base);
}

PipelineConfig load_config(const std::filesystem::path* file, const std::vector<std::string>& overrides)
{
    nlohmann::json doc = config_to_json(PipelineConfig{});
    if (file != nullptr) {
        std::ifstream in(*file);
        if (!in)
            throw UsageError("cannot open config file " + file->string());
        const nlohmann::json user = nlohmann::json::parse(in, nullptr, false, true);
        if (user.is_discarded())
            throw SchemaError(file->filename().string(), "not valid JSON");
        overlay(doc, user, "");
    }
    for (const std::string& o : overrides)
        apply_override(doc, o);
    PipelineConfig config = from_full_json(doc);
    config.validate();
    return config;
}

std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const PipelineConfig& config)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config_to_json(config).dump())));
    return buf;
}

void write_config(const std::filesystem::path& file, const PipelineConfig& config)
{
    std::ofstream out(file);
    if (!out)
        throw DataError("cannot write " + file.string());
    out << config_to_json(config).dump(2) << '\n';
}

}  // namespace roughness
