#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "roughness/geometry.hpp"
#include "roughness/labeling.hpp"

namespace roughness {

/// A raised-cosine bump across the track. Along-track it spans
/// s +/- half_width; laterally it is flat over lateral +/- half_length and
/// tapers to zero over kTaper beyond that.
struct Bump {
    double s = 0.0;
    double lateral = 0.0;
    double height = 0.0;
    double half_width = 0.25;
    double half_length = 1.0;

    static constexpr double kTaper = 0.15;

    double lateral_factor(double y) const;
    double height_at(double x, double y) const;
    /// Height felt by a wheel rolling along y.
    double wheel_height(double y) const { return height * lateral_factor(y); }
    /// Sum of both rear wheels' felt heights.
    double felt_height(double half_track) const { return wheel_height(half_track) + wheel_height(-half_track); }
    /// Where the wheels meet the rising face and take the strike.
    double leading_edge() const { return s - half_width; }
    /// Upper bound on the gradient norm of height_at.
    double max_slope() const;

    friend bool operator==(const Bump&, const Bump&) = default;
};

/// Height derivatives of the smooth base surface at one point.
struct BaseDerivatives {
    double h = 0.0;
    double hx = 0.0;
    double hy = 0.0;
    double hxx = 0.0;
    double hxy = 0.0;
};

/// Straight track along +x. Height = smooth low-amplitude undulation plus
/// sparse bumps sorted by s. No bump is wider than bump_search_radius along
/// the track; lookups rely on that bound.
struct TerrainProfile {
    double track_length = 0.0;
    double base_amplitude = 0.0;
    std::array<double, 3> base_phases{};
    std::vector<Bump> bumps;
    double bump_search_radius = 1.0;

    /// Throws ConfigError when bumps are unsorted, non-positive or wider
    /// than bump_search_radius.
    void validate() const;

    BaseDerivatives base(double x, double y) const;
    double base_height(double x, double y) const { return base(x, y).h; }
    double height(double x, double y) const;
    /// Largest max_slope() among bumps touching [x0, x1] x [y0, y1]; 0 when none do.
    double bump_slope_in(double x0, double x1, double y0, double y1) const;
    /// Bound on |base_height|.
    double base_bound() const;
    /// Bound on the base gradient norm.
    double base_slope_bound() const;
};

struct TerrainConfig {
    double length = 10000.0;          // m
    double bump_density = 5.0;        // bumps per km
    double height_min = 0.01;         // m
    double height_max = 0.15;         // m
    double base_amplitude = 0.05;     // m, 0 gives a flat plane
    double cluster_probability = 0.6; // chance a bump joins an earlier one's neighborhood
    double cluster_spread = 25.0;     // m
    double min_spacing = 4.0;         // m between bump centers
    double lateral_extent = 1.2;      // |bump center| <= this
    double half_width_min = 0.15, half_width_max = 0.35;
    double half_length_min = 0.4, half_length_max = 2.0;
    double end_margin = 30.0;         // no bumps this close to either end

    void validate() const;
};

/// Deterministic in (seed, config). The bump count is Poisson with mean
/// density * length / 1000; positions favor clusters but keep min_spacing.
TerrainProfile generate_terrain(std::uint64_t seed, const TerrainConfig& config);

struct SpeedProfile {
    double mean_mph = 25.0;
    double amplitude_mph = 5.0;
    double wavelength = 1500.0;  // m
    double phase = 0.0;

    double at(double s) const;
    double min_mph() const { return mean_mph - std::abs(amplitude_mph); }
};

struct PoseErrorModel {
    bool enabled = true;
    double z_error_rate = 0.1;       // m of z error per second between scans, at the center beam
    double orientation_sigma_deg = 0.5;
    double dwell_mean = 2.0;         // s between drift-direction changes
    double roll_scale = 0.5;         // roll drift relative to pitch drift
};

struct ShockModel {
    double gain = 0.2;               // G per (mph * m of felt bump height)
    double resonance_hz = 4.5;
    double resonance_damping = 0.15;
    double resonance_gain = 0.5;     // resonance amplitude relative to the strike
    double imu_noise = 0.003;        // G, white
};

struct SimConfig {
    SpeedProfile speed;
    MountGeometry mount;
    double half_track = 0.8;         // rear wheels at y = +/- half_track
    double scan_frequency = 75.0;
    double angular_resolution_deg = 0.5;
    double pose_rate = 100.0;        // pose and IMU rate
    PoseErrorModel pose_error;
    ShockModel shock;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Time-ordered sensor streams of one traversal.
struct SensorLog {
    std::vector<RawScan> scans;
    std::vector<PoseSample> poses;       // estimated: truth plus orientation error
    std::vector<PoseSample> true_poses;  // for oracles only
    std::vector<ImuSample> imu;
    std::vector<SpeedSample> speeds;
    TerrainProfile terrain;              // bumps are the ground truth of this log
    SimConfig config;
    double start_s = 0.0;
    double end_s = 0.0;

    std::span<const Bump> ground_truth_bumps() const { return terrain.bumps; }
};

/// Piecewise-linear random drift used for the pose error: slopes within
/// 10% of `slope`, redrawn at exponentially distributed times. The
/// direction persists and turns back with a probability that grows as the
/// value approaches `bound`.
class DriftProcess {
public:
    DriftProcess() = default;
    DriftProcess(std::mt19937_64& rng, double duration, double slope, double bound, double dwell_mean);

    double value(double t) const;
    double rate(double t) const;

private:
    std::size_t segment(double t) const;
    std::vector<double> knot_t_;
    std::vector<double> knot_v_;
    std::vector<double> slope_;
};

/// Step-wise vehicle and accelerometer simulation at the pose rate. Each
/// call to step() consumes one sample period at the given speed.
class DriveSimulator {
public:
    DriveSimulator(const TerrainProfile& terrain, const SimConfig& config, double start_s, double start_t);

    double time() const { return t_; }
    double position() const { return s_; }
    std::size_t sample_index() const { return n_; }

    /// Emits the accelerometer sample at the current time while driving at
    /// `mph` through the coming period, then advances.
    ImuSample step(double mph);

private:
    double gravity_and_terrain(double s, double v_mps) const;

    const TerrainProfile& terrain_;
    SimConfig config_;
    double dt_;
    double start_t_;
    double t_;
    double s_;
    std::size_t n_ = 0;
    std::size_t next_bump_;
    std::deque<double> pending_;  // strike contributions for samples n_, n_+1, ...
    struct Ringing {
        std::size_t start;
        double amplitude;
    };
    std::vector<Ringing> ringing_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> noise_{0.0, 1.0};
};

/// Exact (noise-free) vehicle pose for a position on the track at speed v.
PoseSample true_pose_at(const TerrainProfile& terrain, double s, double mph, double t);

/// Ray/heightfield intersection with the terrain bounds computed once.
class RayCaster {
public:
    explicit RayCaster(const TerrainProfile& terrain);

    /// Range to the first intersection of origin + r * dir (unit dir) with
    /// the terrain; kNoReturnRange when there is none within range.
    double cast(const Vec3& origin, const Vec3& dir) const;

private:
    double gap(const Vec3& o, const Vec3& d, double r) const;
    double gap_slope(const Vec3& o, const Vec3& d, double r) const;
    double refine(const Vec3& o, const Vec3& d, double lo, double hi) const;

    const TerrainProfile& terrain_;
    double z_top_;
    double z_bottom_;
    double base_slope_;
};

double cast_ray(const TerrainProfile& terrain, const Vec3& origin, const Vec3& dir);

/// Drives the course along the speed profile and records every stream.
/// Throws ConfigError when the profile is not strictly positive.
SensorLog simulate_traversal(const TerrainProfile& terrain, const SimConfig& config);

/// Splits by along-track vehicle position. Samples and bumps at or before
/// boundary_s go to the first log.
std::pair<SensorLog, SensorLog> split_log(const SensorLog& log, double boundary_s);

/// Fraction of consecutive `patch_length` patches with a bump inside
/// `association_radius` of their center whose expected ruggedness
/// (filter_gain * shock gain * felt height) reaches `threshold`.
double ground_truth_positive_rate(const TerrainProfile& terrain, const SimConfig& config,
                                  double patch_length, double association_radius, double threshold,
                                  double filter_gain);

}  // namespace roughness
