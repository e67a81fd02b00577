#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace roughness {

inline constexpr std::size_t kBeamsPerScan = 181;
inline constexpr std::size_t kCenterBeam = kBeamsPerScan / 2;

/// Range value that marks a beam without a return. Any reading at or
/// beyond it is dropped during projection.
inline constexpr double kNoReturnRange = 80.0;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// One planar sweep of the downward-tilted range finder.
struct RawScan {
    double timestamp = 0.0;
    std::array<double, kBeamsPerScan> ranges{};
    double angular_resolution_deg = 0.5;
    double scan_frequency_hz = 75.0;

    /// Azimuth of a beam in radians; beam kCenterBeam points straight ahead,
    /// positive azimuth is to the left.
    double azimuth(std::size_t beam) const;
    static bool is_return(double range) { return range >= 0.0 && range < kNoReturnRange; }
};

/// Vehicle pose in the world frame (x forward along the initial heading,
/// y left, z up). Angles follow the usual roll-pitch-yaw convention with
/// R = Rz(yaw) * Ry(pitch) * Rx(roll); positive pitch tips the nose down.
/// The position is the point on the ground below the rear-axle center.
struct PoseSample {
    double timestamp = 0.0;
    Vec3 position;
    double roll = 0.0;
    double pitch = 0.0;
    double yaw = 0.0;
    double roll_rate = 0.0;
    double pitch_rate = 0.0;
};

/// A projected range return with the six features the classifier uses:
/// position, observation time and the roll/pitch rates at that time.
/// `beam` is bookkeeping for deterministic tie-breaking only.
struct LaserPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double tau = 0.0;
    double roll_rate = 0.0;
    double pitch_rate = 0.0;
    std::uint32_t beam = 0;
};

/// Placement of the range finder relative to the rear-axle ground point.
struct MountGeometry {
    double laser_height = 2.0;
    double tilt = 0.165;  // rad, downward
    double lateral_offset = 0.0;
    double forward_offset = 1.5;

    void validate() const;
    /// Horizontal distance from the rear axle to where the center beam meets
    /// flat ground.
    double center_beam_reach() const;
};

/// Linear interpolation of position, angles and rates between the two
/// samples bracketing `t`. Throws ExtrapolationError outside the span.
PoseSample interpolate_pose(std::span<const PoseSample> poses, double t);

/// Unit beam direction in the vehicle frame.
Vec3 beam_direction(const RawScan& scan, std::size_t beam, const MountGeometry& mount);

/// Rotates a vehicle-frame vector into the world frame.
Vec3 rotate_to_world(const PoseSample& pose, const Vec3& v);

/// Laser origin in the world frame for the given pose.
Vec3 laser_origin(const PoseSample& pose, const MountGeometry& mount);

/// Projects every valid beam of `scan` through `pose` into world
/// coordinates. The pose must already be evaluated at the scan time.
std::vector<LaserPoint> project_scan(const RawScan& scan, const PoseSample& pose,
                                     const MountGeometry& mount);

/// Distance in the (x, y) plane from `p` to the polyline `path`.
double distance_to_path(Vec2 p, std::span<const Vec2> path);

/// Up to `max_points` cloud points within `corridor_radius` of the wheel
/// path, nearest first. Ties are broken by earlier tau, then lower beam
/// index, then coordinates, so the result does not depend on cloud order.
std::vector<LaserPoint> select_patch_points(std::span<const LaserPoint> cloud,
                                            std::span<const Vec2> wheel_path,
                                            double corridor_radius, std::size_t max_points);

}  // namespace roughness
