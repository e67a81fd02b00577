#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "roughness/config.hpp"
#include "roughness/errors.hpp"
#include "roughness/sensor_log_io.hpp"

namespace roughness {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("roughness_unit_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

TEST(Config, DefaultsRoundTripThroughJson)
{
    const PipelineConfig c;
    EXPECT_EQ(config_hash(config_from_json(config_to_json(c))), config_hash(c));
    EXPECT_EQ(config_hash(c).size(), 16u);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, PartialDocumentKeepsDefaults)
{
    const PipelineConfig c = config_from_json(nlohmann::json::parse(R"({"terrain": {"length": 500}})"));
    EXPECT_EQ(c.terrain.length, 500.0);
    EXPECT_EQ(c.terrain.bump_density, TerrainConfig{}.bump_density);
    EXPECT_NE(config_hash(c), config_hash(PipelineConfig{}));
}

TEST(Config, UnknownKeyNamesTheField)
{
    try {
        config_from_json(nlohmann::json::parse(R"({"terrain": {"lenght": 500}})"));
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.field(), "terrain.lenght");
    }
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"terrain": {"length": "long"}})")), SchemaError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"sim": 3})")), SchemaError);
}

TEST(Config, OverridesAndValidation)
{
    const PipelineConfig c = load_config(nullptr, {"sim.seed=7", "training.lambda=3.5"});
    EXPECT_EQ(c.sim.seed, 7u);
    EXPECT_EQ(c.training.lambda, 3.5);
    EXPECT_THROW(load_config(nullptr, {"noequals"}), UsageError);
    EXPECT_THROW(load_config(nullptr, {"sim.nope=1"}), SchemaError);
    EXPECT_THROW(load_config(nullptr, {"patches.patch_length=0"}), ConfigError);
    EXPECT_THROW(load_config(nullptr, {"labeling.taps=41"}), ConfigError);
}

TEST(Config, FileAndBadJson)
{
    const fs::path dir = scratch("config");
    {
        std::ofstream(dir / "good.json") << R"({"evaluation": {"lookahead": 12}})";
        std::ofstream(dir / "bad.json") << "{not json";
    }
    const fs::path good = dir / "good.json", bad = dir / "bad.json", missing = dir / "missing.json";
    EXPECT_EQ(load_config(&good, {}).evaluation.lookahead, 12.0);
    EXPECT_EQ(load_config(&good, {"evaluation.lookahead=8"}).evaluation.lookahead, 8.0);
    EXPECT_THROW(load_config(&bad, {}), SchemaError);
    EXPECT_THROW(load_config(&missing, {}), UsageError);
    write_config(dir / "out.json", load_config(&good, {}));
    const fs::path out = dir / "out.json";
    EXPECT_EQ(config_hash(load_config(&out, {})), config_hash(load_config(&good, {})));
}

TEST(Config, Fnv1a64KnownValues)
{
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

SensorLog short_log()
{
    TerrainConfig tc;
    tc.length = 80.0;
    tc.bump_density = 40.0;
    tc.end_margin = 15.0;
    SimConfig sc;
    sc.seed = 3;
    return simulate_traversal(generate_terrain(3, tc), sc);
}

TEST(SensorLogIo, RoundTrips)
{
    const SensorLog log = short_log();
    const fs::path dir = scratch("log");
    write_sensor_log(dir, log, {{"seed", 3}});
    const SensorLog back = read_sensor_log(dir);
    ASSERT_EQ(back.scans.size(), log.scans.size());
    for (std::size_t i = 0; i < log.scans.size(); ++i) {
        EXPECT_EQ(back.scans[i].timestamp, log.scans[i].timestamp);
        for (std::size_t b = 0; b < kBeamsPerScan; ++b)
            ASSERT_NEAR(back.scans[i].ranges[b], log.scans[i].ranges[b], 5.001e-5);
    }
    ASSERT_EQ(back.poses.size(), log.poses.size());
    for (std::size_t i = 0; i < log.poses.size(); ++i) {
        EXPECT_EQ(back.poses[i].timestamp, log.poses[i].timestamp);
        EXPECT_EQ(back.poses[i].position.z, log.poses[i].position.z);
        EXPECT_EQ(back.poses[i].pitch, log.poses[i].pitch);
        EXPECT_EQ(back.true_poses[i].roll_rate, log.true_poses[i].roll_rate);
    }
    ASSERT_EQ(back.imu.size(), log.imu.size());
    for (std::size_t i = 0; i < log.imu.size(); ++i)
        EXPECT_EQ(back.imu[i].accel_z, log.imu[i].accel_z);
    ASSERT_EQ(back.speeds.size(), log.speeds.size());
    EXPECT_EQ(back.terrain.bumps, log.terrain.bumps);
    EXPECT_EQ(back.terrain.base_phases, log.terrain.base_phases);
    EXPECT_EQ(back.start_s, log.start_s);
    EXPECT_EQ(back.end_s, log.end_s);
    EXPECT_EQ(sim_to_json(back.config), sim_to_json(log.config));
    EXPECT_EQ(read_manifest(dir).at("seed"), 3);
}

TEST(SensorLogIo, RejectsDamagedFiles)
{
    const SensorLog log = short_log();
    const fs::path dir = scratch("damaged");
    write_sensor_log(dir, log);

    const auto rewrite = [&](const std::string& file, const std::function<void(std::string&)>& edit) {
        std::ifstream in(dir / file);
        std::stringstream ss;
        ss << in.rdbuf();
        std::string text = ss.str();
        edit(text);
        std::ofstream(dir / file) << text;
    };

    rewrite("imu.txt", [](std::string& t) { t.replace(0, t.find('\n'), "time accel"); });
    try {
        read_sensor_log(dir);
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.field(), "imu.txt:1");
    }

    write_sensor_log(dir, log);
    rewrite("speeds.txt", [](std::string& t) {
        const auto second = t.find('\n') + 1;
        t.insert(second, "abc 20\n");
    });
    try {
        read_sensor_log(dir);
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.field(), "speeds.txt:2");
    }

    write_sensor_log(dir, log);
    rewrite("speeds.txt", [](std::string& t) {
        const auto second = t.find('\n') + 1;
        t.insert(second, "1e9 20\n");
    });
    EXPECT_THROW(read_sensor_log(dir), DataError);

    fs::remove(dir / "manifest.json");
    EXPECT_THROW(read_sensor_log(dir), SchemaError);
}

}  // namespace
}  // namespace roughness
