#include "roughness/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <tuple>

#include <Eigen/Geometry>

#include "roughness/errors.hpp"

namespace roughness {

namespace {

Eigen::Matrix3d rotation_of(const PoseSample& pose)
{
    return (Eigen::AngleAxisd(pose.yaw, Eigen::Vector3d::UnitZ()) *
            Eigen::AngleAxisd(pose.pitch, Eigen::Vector3d::UnitY()) *
            Eigen::AngleAxisd(pose.roll, Eigen::Vector3d::UnitX()))
        .toRotationMatrix();
}

double lerp(double a, double b, double w) { return a + (b - a) * w; }

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b)
{
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double u = 0.0;
    if (len2 > 0.0)
        u = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    return std::hypot(p.x - (a.x + u * dx), p.y - (a.y + u * dy));
}

}  // namespace

double RawScan::azimuth(std::size_t beam) const
{
    const double deg = (static_cast<double>(beam) - static_cast<double>(kCenterBeam)) *
                       angular_resolution_deg;
    return deg * std::numbers::pi / 180.0;
}

void MountGeometry::validate() const
{
    if (!(laser_height > 0.0))
        throw ConfigError("laser_height must be positive");
    if (!(tilt > 0.0 && tilt < std::numbers::pi / 2))
        throw ConfigError("tilt must lie in (0, pi/2)");
}

double MountGeometry::center_beam_reach() const
{
    return forward_offset + laser_height / std::tan(tilt);
}

PoseSample interpolate_pose(std::span<const PoseSample> poses, double t)
{
    if (poses.empty())
        throw ExtrapolationError("interpolate_pose: empty pose list");
    if (t < poses.front().timestamp || t > poses.back().timestamp) {
        std::ostringstream msg;
        msg << "interpolate_pose: t=" << t << " outside [" << poses.front().timestamp << ", "
            << poses.back().timestamp << "]";
        throw ExtrapolationError(msg.str());
    }

    // First sample strictly after t; the one before it is at or before t.
    const auto after = std::upper_bound(poses.begin(), poses.end(), t,
                                        [](double v, const PoseSample& p) { return v < p.timestamp; });
    const auto before = std::prev(after);
    if (before->timestamp == t || after == poses.end())
        return *before;

    const double w = (t - before->timestamp) / (after->timestamp - before->timestamp);
    PoseSample out;
    out.timestamp = t;
    out.position = {lerp(before->position.x, after->position.x, w),
                    lerp(before->position.y, after->position.y, w),
                    lerp(before->position.z, after->position.z, w)};
    out.roll = lerp(before->roll, after->roll, w);
    out.pitch = lerp(before->pitch, after->pitch, w);
    out.yaw = lerp(before->yaw, after->yaw, w);
    out.roll_rate = lerp(before->roll_rate, after->roll_rate, w);
    out.pitch_rate = lerp(before->pitch_rate, after->pitch_rate, w);
    return out;
}

Vec3 beam_direction(const RawScan& scan, std::size_t beam, const MountGeometry& mount)
{
    const double az = scan.azimuth(beam);
    const double ca = std::cos(az);
    return {ca * std::cos(mount.tilt), std::sin(az), -ca * std::sin(mount.tilt)};
}

Vec3 rotate_to_world(const PoseSample& pose, const Vec3& v)
{
    const Eigen::Vector3d w = rotation_of(pose) * Eigen::Vector3d(v.x, v.y, v.z);
    return {w.x(), w.y(), w.z()};
}

Vec3 laser_origin(const PoseSample& pose, const MountGeometry& mount)
{
    const Vec3 o = rotate_to_world(pose, {mount.forward_offset, mount.lateral_offset, mount.laser_height});
    return {pose.position.x + o.x, pose.position.y + o.y, pose.position.z + o.z};
}

std::vector<LaserPoint> project_scan(const RawScan& scan, const PoseSample& pose,
                                     const MountGeometry& mount)
{
    const Eigen::Matrix3d rot = rotation_of(pose);
    const Eigen::Vector3d origin =
        rot * Eigen::Vector3d(mount.forward_offset, mount.lateral_offset, mount.laser_height) +
        Eigen::Vector3d(pose.position.x, pose.position.y, pose.position.z);

    std::vector<LaserPoint> points;
    points.reserve(kBeamsPerScan);
    for (std::size_t beam = 0; beam < kBeamsPerScan; ++beam) {
        const double range = scan.ranges[beam];
        if (!RawScan::is_return(range))
            continue;
        const Vec3 d = beam_direction(scan, beam, mount);
        const Eigen::Vector3d p = origin + rot * (range * Eigen::Vector3d(d.x, d.y, d.z));
        points.push_back({p.x(), p.y(), p.z(), scan.timestamp, pose.roll_rate, pose.pitch_rate,
                          static_cast<std::uint32_t>(beam)});
    }
    return points;
}

double distance_to_path(Vec2 p, std::span<const Vec2> path)
{
    if (path.empty())
        return std::numeric_limits<double>::infinity();
    if (path.size() == 1)
        return std::hypot(p.x - path[0].x, p.y - path[0].y);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        best = std::min(best, distance_to_segment(p, path[i], path[i + 1]));
    return best;
}

std::vector<LaserPoint> select_patch_points(std::span<const LaserPoint> cloud,
                                            std::span<const Vec2> wheel_path,
                                            double corridor_radius, std::size_t max_points)
{
    if (!(corridor_radius > 0.0))
        throw ConfigError("corridor_radius must be positive");
    if (max_points < 2)
        throw ConfigError("patch point count must be at least 2");

    struct Candidate {
        double dist;
        const LaserPoint* point;
    };
    std::vector<Candidate> inside;
    for (const LaserPoint& p : cloud) {
        const double d = distance_to_path({p.x, p.y}, wheel_path);
        if (d <= corridor_radius)
            inside.push_back({d, &p});
    }

    const auto key = [](const Candidate& c) {
        const LaserPoint& p = *c.point;
        return std::tie(c.dist, p.tau, p.beam, p.x, p.y, p.z);
    };
    const auto less = [&](const Candidate& a, const Candidate& b) { return key(a) < key(b); };
    const std::size_t keep = std::min(max_points, inside.size());
    std::partial_sort(inside.begin(), inside.begin() + static_cast<std::ptrdiff_t>(keep),
                      inside.end(), less);

    std::vector<LaserPoint> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i)
        out.push_back(*inside[i].point);
    return out;
}

}  // namespace roughness
