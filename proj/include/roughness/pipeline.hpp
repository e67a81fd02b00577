#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "roughness/config.hpp"
#include "roughness/labeling.hpp"
#include "roughness/simworld.hpp"

namespace roughness {

/// Arc-length parametrization of the reported vehicle path.
class PathIndex {
public:
    explicit PathIndex(std::span<const PoseSample> poses);

    double length() const { return cumulative_.back(); }
    /// Along-track distance of the path at a pose index.
    double along_at(std::size_t index) const { return cumulative_[index]; }

    struct Frame {
        double along = 0.0;
        double lateral = 0.0;  // positive to the left of travel
    };
    /// Nearest-segment projection of `p`, searching locally from the
    /// segment nearest `along_guess`.
    Frame locate(Vec2 p, double along_guess) const;
    /// World (x, y) at an along-track distance and lateral offset.
    Vec2 point_at(double along, double lateral) const;

private:
    double segment_distance(std::size_t seg, Vec2 p) const;
    std::vector<Vec2> points_;
    std::vector<double> cumulative_;
};

/// A patch together with when its last laser point was observed.
struct Patch {
    PatchSample sample;
    double acquired_time = 0.0;
};

/// Projects every scan through the reported poses, keeps points inside
/// either wheel corridor and groups them into consecutive patch_length
/// patches from the first pose. Patches are returned for the whole path,
/// including those without points.
std::vector<Patch> build_patches(const SensorLog& log, const PatchConfig& config);

struct LabelRun {
    std::vector<FilteredSample> filtered;
    EventExtraction events;  // located along track
};

/// Filters the log's IMU stream and extracts located shock events.
LabelRun extract_log_events(const SensorLog& log, const LabelingConfig& config);

/// build_patches followed by event labeling.
struct LabeledLog {
    std::vector<Patch> patches;
    LabelRun labels;
};
LabeledLog label_log(const SensorLog& log, const PipelineConfig& config);

std::vector<PatchSample> samples_of(std::span<const Patch> patches);

/// Largest z range of either wheel's points; 0 for a wheel with no points.
double naive_score(const PatchSample& patch);

}  // namespace roughness
