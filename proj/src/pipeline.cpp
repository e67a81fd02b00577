#include "roughness/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roughness/errors.hpp"

namespace roughness {

PathIndex::PathIndex(std::span<const PoseSample> poses)
{
    for (const PoseSample& p : poses) {
        const Vec2 q{p.position.x, p.position.y};
        if (!points_.empty() && q.x == points_.back().x && q.y == points_.back().y)
            continue;
        points_.push_back(q);
    }
    if (points_.size() < 2)
        throw DataError("vehicle path needs at least two distinct positions");
    cumulative_.resize(points_.size());
    cumulative_[0] = 0.0;
    for (std::size_t i = 1; i < points_.size(); ++i)
        cumulative_[i] =
            cumulative_[i - 1] + std::hypot(points_[i].x - points_[i - 1].x, points_[i].y - points_[i - 1].y);
}

double PathIndex::segment_distance(std::size_t seg, Vec2 p) const
{
    const Vec2 pts[2] = {points_[seg], points_[seg + 1]};
    return distance_to_path(p, pts);
}

PathIndex::Frame PathIndex::locate(Vec2 p, double along_guess) const
{
    const std::size_t segments = points_.size() - 1;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), along_guess);
    std::size_t j = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    j = std::min(j, segments - 1);

    double d = segment_distance(j, p);
    while (j + 1 < segments) {
        const double dn = segment_distance(j + 1, p);
        if (!(dn <= d))
            break;
        d = dn;
        ++j;
    }
    while (j > 0) {
        const double dp = segment_distance(j - 1, p);
        if (!(dp < d))
            break;
        d = dp;
        --j;
    }

    const Vec2 a = points_[j];
    const Vec2 b = points_[j + 1];
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len = std::hypot(dx, dy);
    double u = ((p.x - a.x) * dx + (p.y - a.y) * dy) / (len * len);
    // Only the end segments extend past the path.
    if (j > 0)
        u = std::max(u, 0.0);
    if (j + 1 < segments)
        u = std::min(u, 1.0);
    return {cumulative_[j] + u * len, (dx * (p.y - a.y) - dy * (p.x - a.x)) / len};
}

Vec2 PathIndex::point_at(double along, double lateral) const
{
    const std::size_t segments = points_.size() - 1;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), along);
    std::size_t j = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    j = std::min(j, segments - 1);
    const Vec2 a = points_[j];
    const Vec2 b = points_[j + 1];
    const double len = cumulative_[j + 1] - cumulative_[j];
    const double u = (along - cumulative_[j]) / len;
    const double nx = -(b.y - a.y) / len;
    const double ny = (b.x - a.x) / len;
    return {a.x + u * (b.x - a.x) + lateral * nx, a.y + u * (b.y - a.y) + lateral * ny};
}

std::vector<Patch> build_patches(const SensorLog& log, const PatchConfig& config)
{
    config.validate();
    if (log.poses.size() < 2)
        throw DataError("log has fewer than two poses");
    const PathIndex path(log.poses);
    const double plen = config.patch_length;
    const auto count = static_cast<std::size_t>(std::floor(path.length() / plen));
    const double covered = static_cast<double>(count) * plen;
    const double half_track = log.config.half_track;
    const double radius = config.corridor_radius;

    // Along-track distance of each pose, for the search hints.
    std::vector<double> pose_along(log.poses.size());
    {
        double acc = 0.0;
        pose_along[0] = 0.0;
        for (std::size_t i = 1; i < log.poses.size(); ++i) {
            acc += std::hypot(log.poses[i].position.x - log.poses[i - 1].position.x,
                              log.poses[i].position.y - log.poses[i - 1].position.y);
            pose_along[i] = acc;
        }
    }

    std::vector<std::vector<LaserPoint>> left(count), right(count);
    const double t0 = log.poses.front().timestamp;
    const double t1 = log.poses.back().timestamp;
    for (const RawScan& scan : log.scans) {
        if (scan.timestamp < t0 || scan.timestamp > t1)
            continue;
        const PoseSample pose = interpolate_pose(log.poses, scan.timestamp);
        const auto after = std::upper_bound(log.poses.begin(), log.poses.end(), scan.timestamp,
                                            [](double v, const PoseSample& p) { return v < p.timestamp; });
        const std::size_t i = std::min(static_cast<std::size_t>(after - log.poses.begin()), log.poses.size()) - 1;
        double vehicle_along = pose_along[i];
        if (i + 1 < log.poses.size()) {
            const double w = (scan.timestamp - log.poses[i].timestamp) /
                             (log.poses[i + 1].timestamp - log.poses[i].timestamp);
            vehicle_along += w * (pose_along[i + 1] - pose_along[i]);
        }

        for (const LaserPoint& pt : project_scan(scan, pose, log.config.mount)) {
            const double reach = std::hypot(pt.x - pose.position.x, pt.y - pose.position.y);
            const PathIndex::Frame f = path.locate({pt.x, pt.y}, vehicle_along + reach);
            if (f.along < 0.0 || f.along >= covered)
                continue;
            const auto k = std::min(static_cast<std::size_t>(f.along / plen), count - 1);
            if (std::abs(f.lateral - half_track) <= radius)
                left[k].push_back(pt);
            else if (std::abs(f.lateral + half_track) <= radius)
                right[k].push_back(pt);
        }
    }

    std::vector<Patch> patches(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double a0 = static_cast<double>(k) * plen;
        const double a1 = a0 + plen;
        std::vector<Vec2> left_path{path.point_at(a0, half_track)};
        std::vector<Vec2> right_path{path.point_at(a0, -half_track)};
        const auto first = std::upper_bound(pose_along.begin(), pose_along.end(), a0);
        for (auto it = first; it != pose_along.end() && *it < a1; ++it) {
            left_path.push_back(path.point_at(*it, half_track));
            right_path.push_back(path.point_at(*it, -half_track));
        }
        left_path.push_back(path.point_at(a1, half_track));
        right_path.push_back(path.point_at(a1, -half_track));

        Patch& patch = patches[k];
        patch.sample.location = a0 + plen / 2.0;
        patch.sample.left_points = select_patch_points(left[k], left_path, radius, config.points_per_wheel);
        patch.sample.right_points = select_patch_points(right[k], right_path, radius, config.points_per_wheel);
        double acquired = 0.0;
        for (const auto* side : {&patch.sample.left_points, &patch.sample.right_points})
            for (const LaserPoint& p : *side)
                acquired = std::max(acquired, p.tau);
        patch.acquired_time = acquired;
    }
    return patches;
}

LabelRun extract_log_events(const SensorLog& log, const LabelingConfig& config)
{
    config.validate();
    const FilterSpec spec = design_highpass(log.config.pose_rate, config.cutoff_hz, config.taps);
    LabelRun run;
    run.filtered = filter_accel(log.imu, spec);
    run.events = extract_events(run.filtered, log.speeds, config.min_separation, config.floor);
    const Odometry odometry(log.speeds);
    locate_events(run.events.events, odometry);
    return run;
}

LabeledLog label_log(const SensorLog& log, const PipelineConfig& config)
{
    LabeledLog out;
    out.patches = build_patches(log, config.patches);
    out.labels = extract_log_events(log, config.labeling);
    std::vector<PatchSample> samples = samples_of(out.patches);
    samples = label_patches(out.labels.events.events, std::move(samples), config.labeling.association_radius);
    for (std::size_t i = 0; i < samples.size(); ++i)
        out.patches[i].sample.ruggedness_label = samples[i].ruggedness_label;
    return out;
}

std::vector<PatchSample> samples_of(std::span<const Patch> patches)
{
    std::vector<PatchSample> out;
    out.reserve(patches.size());
    for (const Patch& p : patches)
        out.push_back(p.sample);
    return out;
}

double naive_score(const PatchSample& patch)
{
    double best = 0.0;
    for (const auto* side : {&patch.left_points, &patch.right_points}) {
        if (side->empty())
            continue;
        const auto [lo, hi] = std::minmax_element(side->begin(), side->end(),
                                                  [](const LaserPoint& a, const LaserPoint& b) { return a.z < b.z; });
        best = std::max(best, hi->z - lo->z);
    }
    return best;
}

}  // namespace roughness
