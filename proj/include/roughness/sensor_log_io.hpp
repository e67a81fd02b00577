#pragma once

#include <filesystem>

#include <json.hpp>

#include "roughness/simworld.hpp"

namespace roughness {

/// Writes a log directory: scans.txt, poses.txt, true_poses.txt, imu.txt,
/// speeds.txt, truth.txt and manifest.json. Every text file starts with a
/// header row naming its columns. `extra` is merged into the manifest.
void write_sensor_log(const std::filesystem::path& dir, const SensorLog& log,
                      const nlohmann::json& extra = nlohmann::json::object());

/// Reads a directory written by write_sensor_log. Throws SchemaError for a
/// wrong header, column count or unparsable number (the field names the
/// file and line) and DataError when a stream is not time-ordered.
SensorLog read_sensor_log(const std::filesystem::path& dir);

nlohmann::json read_manifest(const std::filesystem::path& dir);

}  // namespace roughness
