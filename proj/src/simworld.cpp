#include "roughness/simworld.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Geometry>

#include "roughness/errors.hpp"

namespace roughness {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGravity = 9.80665;

// Base undulation: amp * sum w * sin(kx x + ky y + phase).
struct Wave {
    double weight;
    double kx;
    double ky;
};
constexpr std::array<Wave, 3> kWaves{{
    {0.6, 2.0 * kPi / 83.0, 0.0},
    {0.3, 2.0 * kPi / 31.0, 0.0},
    {0.1, 2.0 * kPi / 120.0, 2.0 * kPi / 17.0},
}};

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

Eigen::Matrix3d rotation_of(const PoseSample& pose)
{
    return (Eigen::AngleAxisd(pose.yaw, Eigen::Vector3d::UnitZ()) *
            Eigen::AngleAxisd(pose.pitch, Eigen::Vector3d::UnitY()) *
            Eigen::AngleAxisd(pose.roll, Eigen::Vector3d::UnitX()))
        .toRotationMatrix();
}

}  // namespace

double Bump::lateral_factor(double y) const
{
    const double d = std::abs(y - lateral);
    if (d <= half_length)
        return 1.0;
    if (d >= half_length + kTaper)
        return 0.0;
    return 0.5 * (1.0 + std::cos(kPi * (d - half_length) / kTaper));
}

double Bump::height_at(double x, double y) const
{
    const double u = std::abs(x - s);
    if (u >= half_width)
        return 0.0;
    return height * 0.5 * (1.0 + std::cos(kPi * u / half_width)) * lateral_factor(y);
}

double Bump::max_slope() const
{
    return height * kPi / 2.0 * std::hypot(1.0 / half_width, 1.0 / kTaper);
}

void TerrainProfile::validate() const
{
    if (!(track_length > 0.0))
        throw ConfigError("track_length must be positive");
    for (std::size_t i = 0; i < bumps.size(); ++i) {
        const Bump& b = bumps[i];
        if (!(b.height > 0.0) || !(b.half_width > 0.0) || !(b.half_length >= 0.0))
            throw ConfigError("bump heights and widths must be positive");
        if (b.half_width > bump_search_radius)
            throw ConfigError("bump wider than bump_search_radius");
        if (i > 0 && bumps[i - 1].s > b.s)
            throw ConfigError("bumps must be sorted by along-track position");
    }
}

BaseDerivatives TerrainProfile::base(double x, double y) const
{
    BaseDerivatives d;
    if (base_amplitude == 0.0)
        return d;
    for (std::size_t i = 0; i < kWaves.size(); ++i) {
        const Wave& w = kWaves[i];
        const double arg = w.kx * x + w.ky * y + base_phases[i];
        const double sn = std::sin(arg);
        const double cs = std::cos(arg);
        const double a = base_amplitude * w.weight;
        d.h += a * sn;
        d.hx += a * w.kx * cs;
        d.hy += a * w.ky * cs;
        d.hxx -= a * w.kx * w.kx * sn;
        d.hxy -= a * w.kx * w.ky * sn;
    }
    return d;
}

double TerrainProfile::height(double x, double y) const
{
    double h = base_height(x, y);
    auto it = std::lower_bound(bumps.begin(), bumps.end(), x - bump_search_radius,
                               [](const Bump& b, double v) { return b.s < v; });
    for (; it != bumps.end() && it->s <= x + bump_search_radius; ++it)
        h += it->height_at(x, y);
    return h;
}

double TerrainProfile::bump_slope_in(double x0, double x1, double y0, double y1) const
{
    double slope = 0.0;
    auto it = std::lower_bound(bumps.begin(), bumps.end(), x0 - bump_search_radius,
                               [](const Bump& b, double v) { return b.s < v; });
    for (; it != bumps.end() && it->s <= x1 + bump_search_radius; ++it) {
        if (it->s + it->half_width < x0 || it->s - it->half_width > x1)
            continue;
        const double reach = it->half_length + Bump::kTaper;
        if (it->lateral + reach < y0 || it->lateral - reach > y1)
            continue;
        slope = std::max(slope, it->max_slope());
    }
    return slope;
}

double TerrainProfile::base_bound() const
{
    double sum = 0.0;
    for (const Wave& w : kWaves)
        sum += w.weight;
    return std::abs(base_amplitude) * sum;
}

double TerrainProfile::base_slope_bound() const
{
    double sum = 0.0;
    for (const Wave& w : kWaves)
        sum += w.weight * std::hypot(w.kx, w.ky);
    return std::abs(base_amplitude) * sum;
}

void TerrainConfig::validate() const
{
    if (!(length > 0.0))
        throw ConfigError("terrain length must be positive");
    if (!(bump_density >= 0.0))
        throw ConfigError("bump_density must be non-negative");
    if (!(height_min >= 0.005 && height_max <= 0.5 && height_min <= height_max))
        throw ConfigError("bump height range must lie within [0.005, 0.5] m");
    if (!(base_amplitude >= 0.0))
        throw ConfigError("base_amplitude must be non-negative");
    if (!(cluster_probability >= 0.0 && cluster_probability <= 1.0))
        throw ConfigError("cluster_probability must lie in [0, 1]");
    if (!(min_spacing >= 0.0 && cluster_spread >= 0.0 && lateral_extent >= 0.0 && end_margin >= 0.0))
        throw ConfigError("terrain spacing parameters must be non-negative");
    if (!(half_width_min > 0.0 && half_width_min <= half_width_max))
        throw ConfigError("bump half-width range is invalid");
    if (!(half_length_min >= 0.0 && half_length_min <= half_length_max))
        throw ConfigError("bump half-length range is invalid");
}

TerrainProfile generate_terrain(std::uint64_t seed, const TerrainConfig& config)
{
    config.validate();
    std::mt19937_64 rng = make_rng(seed, 0x7e77a1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    TerrainProfile terrain;
    terrain.track_length = config.length;
    terrain.base_amplitude = config.base_amplitude;
    for (double& p : terrain.base_phases)
        p = uniform(0.0, 2.0 * kPi);
    terrain.bump_search_radius = config.half_width_max;

    const double margin = std::min(config.end_margin, 0.25 * config.length);
    const double lo = margin;
    const double hi = config.length - margin;
    std::poisson_distribution<int> poisson(config.bump_density * config.length / 1000.0);
    const int count = config.bump_density > 0.0 ? poisson(rng) : 0;

    std::vector<double> placed;
    for (int i = 0; i < count; ++i) {
        for (int attempt = 0; attempt < 200; ++attempt) {
            double s;
            if (!placed.empty() && unit(rng) < config.cluster_probability) {
                const auto k = static_cast<std::size_t>(unit(rng) * static_cast<double>(placed.size()));
                s = placed[std::min(k, placed.size() - 1)] + uniform(-config.cluster_spread, config.cluster_spread);
            } else {
                s = uniform(lo, hi);
            }
            if (s < lo || s > hi)
                continue;
            const bool clear = std::all_of(placed.begin(), placed.end(),
                                           [&](double o) { return std::abs(o - s) >= config.min_spacing; });
            if (!clear)
                continue;
            placed.push_back(s);
            Bump b;
            b.s = s;
            b.lateral = uniform(-config.lateral_extent, config.lateral_extent);
            b.height = uniform(config.height_min, config.height_max);
            b.half_width = uniform(config.half_width_min, config.half_width_max);
            b.half_length = uniform(config.half_length_min, config.half_length_max);
            terrain.bumps.push_back(b);
            break;
        }
    }
    std::sort(terrain.bumps.begin(), terrain.bumps.end(), [](const Bump& a, const Bump& b) { return a.s < b.s; });
    return terrain;
}

double SpeedProfile::at(double s) const
{
    return mean_mph + amplitude_mph * std::sin(2.0 * kPi * s / wavelength + phase);
}

void SimConfig::validate() const
{
    mount.validate();
    if (!(speed.min_mph() > 0.0))
        throw ConfigError("speed profile must stay strictly positive");
    if (!(speed.wavelength > 0.0))
        throw ConfigError("speed profile wavelength must be positive");
    if (!(half_track > 0.0))
        throw ConfigError("half_track must be positive");
    if (!(scan_frequency > 0.0 && pose_rate > 0.0))
        throw ConfigError("scan and pose rates must be positive");
    if (!(angular_resolution_deg > 0.0 && angular_resolution_deg * kCenterBeam < 90.0))
        throw ConfigError("angular resolution must keep the sweep inside +/-90 degrees");
    if (!(shock.resonance_hz > 0.0 && shock.resonance_hz < 10.0 && shock.resonance_hz < pose_rate / 2.0))
        throw ConfigError("resonance frequency must be positive, below 10 Hz and below Nyquist");
    if (!(shock.resonance_damping > 0.0 && shock.resonance_damping < 1.0))
        throw ConfigError("resonance damping must lie in (0, 1)");
    if (!(shock.gain >= 0.0 && shock.resonance_gain >= 0.0 && shock.imu_noise >= 0.0))
        throw ConfigError("shock gains and IMU noise must be non-negative");
    if (!(pose_error.z_error_rate >= 0.0 && pose_error.orientation_sigma_deg >= 0.0 &&
          pose_error.roll_scale >= 0.0))
        throw ConfigError("pose error parameters must be non-negative");
    if (!(pose_error.dwell_mean > 0.0))
        throw ConfigError("pose error dwell_mean must be positive");
}

DriftProcess::DriftProcess(std::mt19937_64& rng, double duration, double slope, double bound, double dwell_mean)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> dwell(1.0 / dwell_mean);
    knot_t_.push_back(0.0);
    knot_v_.push_back(0.0);
    while (knot_t_.back() < duration) {
        const double len = std::clamp(dwell(rng), 0.25 * dwell_mean, 3.0 * dwell_mean);
        const double magnitude = slope * (0.9 + 0.2 * unit(rng));
        const double v = knot_v_.back();
        // Keep heading the same way; turn back with a probability that grows
        // as the value moves out toward the bound.
        double sign;
        if (slope_.empty() || v == 0.0) {
            sign = unit(rng) < 0.5 ? -1.0 : 1.0;
        } else {
            sign = slope_.back() > 0.0 ? 1.0 : -1.0;
            const bool outward = sign * v > 0.0;
            const double reach = bound > 0.0 ? std::min(1.0, std::abs(v) / bound) : 1.0;
            if (outward && unit(rng) < reach * reach)
                sign = -sign;
        }
        slope_.push_back(sign * magnitude);
        knot_t_.push_back(knot_t_.back() + len);
        knot_v_.push_back(v + sign * magnitude * len);
    }
    slope_.push_back(0.0);
}

std::size_t DriftProcess::segment(double t) const
{
    const auto it = std::upper_bound(knot_t_.begin(), knot_t_.end(), t);
    return it == knot_t_.begin() ? 0 : static_cast<std::size_t>(it - knot_t_.begin()) - 1;
}

double DriftProcess::value(double t) const
{
    if (knot_t_.empty())
        return 0.0;
    const std::size_t i = segment(t);
    return knot_v_[i] + slope_[i] * (t - knot_t_[i]);
}

double DriftProcess::rate(double t) const
{
    if (knot_t_.empty())
        return 0.0;
    return slope_[segment(t)];
}

DriveSimulator::DriveSimulator(const TerrainProfile& terrain, const SimConfig& config, double start_s,
                               double start_t)
    : terrain_(terrain),
      config_(config),
      dt_(1.0 / config.pose_rate),
      start_t_(start_t),
      t_(start_t),
      s_(start_s),
      rng_(make_rng(config.seed, 0x1a0))
{
    next_bump_ = static_cast<std::size_t>(
        std::lower_bound(terrain.bumps.begin(), terrain.bumps.end(), start_s,
                         [](const Bump& b, double v) { return b.leading_edge() < v; }) -
        terrain.bumps.begin());
}

double DriveSimulator::gravity_and_terrain(double s, double v_mps) const
{
    const BaseDerivatives d = terrain_.base(s, 0.0);
    const double pitch = std::atan(d.hx);
    const double roll = std::atan(d.hy);
    return std::cos(pitch) * std::cos(roll) + v_mps * v_mps * d.hxx / kGravity;
}

ImuSample DriveSimulator::step(double mph)
{
    const double v = mph * kMetersPerSecondPerMph;
    const double s_next = s_ + v * dt_;
    const ShockModel& shock = config_.shock;

    // Wheels reaching a bump this period strike on the next sample.
    while (next_bump_ < terrain_.bumps.size() && terrain_.bumps[next_bump_].leading_edge() < s_next) {
        const Bump& b = terrain_.bumps[next_bump_++];
        const double felt = b.felt_height(config_.half_track);
        if (!(felt > 0.0))
            continue;
        const double strike = shock.gain * mph * felt;
        if (pending_.size() < 3)
            pending_.resize(3, 0.0);
        pending_[1] += strike;
        pending_[2] -= strike;
        ringing_.push_back({n_ + 1, shock.resonance_gain * strike});
    }

    double a = gravity_and_terrain(s_, v);
    if (!pending_.empty()) {
        a += pending_.front();
        pending_.pop_front();
    }

    const double wn = 2.0 * kPi * shock.resonance_hz;
    const double zeta = shock.resonance_damping;
    const double wd = wn * std::sqrt(1.0 - zeta * zeta);
    for (const Ringing& r : ringing_) {
        if (r.start > n_)
            continue;
        const double tau = static_cast<double>(n_ - r.start) * dt_;
        a += r.amplitude * std::exp(-zeta * wn * tau) * std::sin(wd * tau);
    }
    std::erase_if(ringing_, [&](const Ringing& r) {
        return r.start <= n_ && std::exp(-zeta * wn * static_cast<double>(n_ - r.start) * dt_) < 1e-12;
    });

    if (shock.imu_noise > 0.0)
        a += shock.imu_noise * noise_(rng_);

    const ImuSample sample{t_, a};
    ++n_;
    t_ = start_t_ + static_cast<double>(n_) * dt_;
    s_ = s_next;
    return sample;
}

PoseSample true_pose_at(const TerrainProfile& terrain, double s, double mph, double t)
{
    const BaseDerivatives d = terrain.base(s, 0.0);
    const double v = mph * kMetersPerSecondPerMph;
    PoseSample p;
    p.timestamp = t;
    p.position = {s, 0.0, d.h};
    // Nose up on an upward slope, i.e. negative pitch; left side up is positive roll.
    p.pitch = -std::atan(d.hx);
    p.roll = std::atan(d.hy);
    p.pitch_rate = -d.hxx / (1.0 + d.hx * d.hx) * v;
    p.roll_rate = d.hxy / (1.0 + d.hy * d.hy) * v;
    return p;
}

RayCaster::RayCaster(const TerrainProfile& terrain) : terrain_(terrain)
{
    double tallest = 0.0;
    for (const Bump& b : terrain.bumps)
        tallest = std::max(tallest, b.height);
    z_top_ = terrain.base_bound() + tallest + 1e-9;
    z_bottom_ = -terrain.base_bound() - 1e-9;
    base_slope_ = terrain.base_slope_bound();
}

double RayCaster::gap(const Vec3& o, const Vec3& d, double r) const
{
    return o.z + r * d.z - terrain_.height(o.x + r * d.x, o.y + r * d.y);
}

// Derivative of gap() along the ray, by central difference for the bump part.
double RayCaster::gap_slope(const Vec3& o, const Vec3& d, double r) const
{
    const double x = o.x + r * d.x;
    const double y = o.y + r * d.y;
    const BaseDerivatives b = terrain_.base(x, y);
    double slope = d.z - (b.hx * d.x + b.hy * d.y);
    constexpr double h = 1e-7;
    const double bumps_plus = terrain_.height(x + h * d.x, y + h * d.y) - terrain_.base_height(x + h * d.x, y + h * d.y);
    const double bumps_minus = terrain_.height(x - h * d.x, y - h * d.y) - terrain_.base_height(x - h * d.x, y - h * d.y);
    slope -= (bumps_plus - bumps_minus) / (2.0 * h);
    return slope;
}

// Safeguarded Newton on a bracket with gap(lo) >= 0 >= gap(hi).
double RayCaster::refine(const Vec3& o, const Vec3& d, double lo, double hi) const
{
    double r = lo;
    double f = gap(o, d, r);
    if (f == 0.0)
        return r;
    for (int it = 0; it < 100; ++it) {
        const double slope = gap_slope(o, d, r);
        double next = slope < 0.0 ? r - f / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        const double fn = gap(o, d, next);
        if (fn == 0.0)
            return next;
        if (fn > 0.0)
            lo = next;
        else
            hi = next;
        if (std::abs(next - r) < 1e-13 || hi - lo < 1e-13)
            return next;
        r = next;
        f = fn;
    }
    return r;
}

double RayCaster::cast(const Vec3& o, const Vec3& d) const
{
    if (!(d.z < 0.0))
        return kNoReturnRange;
    const double r_lo = std::max(0.0, (o.z - z_top_) / -d.z);
    const double r_hi = (o.z - z_bottom_) / -d.z;
    if (r_lo >= kNoReturnRange)
        return kNoReturnRange;

    const double x0 = o.x + r_lo * d.x, x1 = o.x + r_hi * d.x;
    const double y0 = o.y + r_lo * d.y, y1 = o.y + r_hi * d.y;
    const double bump_slope =
        terrain_.bump_slope_in(std::min(x0, x1), std::max(x0, x1), std::min(y0, y1), std::max(y0, y1));

    double r = r_lo;
    if (bump_slope > 0.0) {
        // March with steps that cannot pass the first crossing, then bracket.
        const double lipschitz = -d.z + (base_slope_ + bump_slope) * std::hypot(d.x, d.y);
        double f = gap(o, d, r);
        for (int it = 0; it < 100000 && r < r_hi; ++it) {
            if (f <= 0.0)
                return r < kNoReturnRange ? r : kNoReturnRange;
            if (f < 1e-4) {
                const double slope = gap_slope(o, d, r);
                if (slope < 0.0) {
                    const double probe = std::min(r_hi, r - 2.0 * f / slope);
                    if (gap(o, d, probe) <= 0.0) {
                        const double hit = refine(o, d, r, probe);
                        return hit < kNoReturnRange ? hit : kNoReturnRange;
                    }
                }
            }
            r += std::max(f / lipschitz, 1e-12);
            f = gap(o, d, r);
        }
        r = std::min(r, r_hi);
        const double hit = refine(o, d, std::max(r_lo, r - 1e-9), r_hi);
        return hit < kNoReturnRange ? hit : kNoReturnRange;
    }
    // Smooth base only: the gap is strictly decreasing, one crossing.
    const double hit = refine(o, d, r_lo, r_hi);
    return hit < kNoReturnRange ? hit : kNoReturnRange;
}

double cast_ray(const TerrainProfile& terrain, const Vec3& origin, const Vec3& dir)
{
    return RayCaster(terrain).cast(origin, dir);
}

SensorLog simulate_traversal(const TerrainProfile& terrain, const SimConfig& config)
{
    config.validate();
    terrain.validate();

    SensorLog log;
    log.terrain = terrain;
    log.config = config;
    log.start_s = 0.0;

    DriveSimulator drive(log.terrain, config, 0.0, 0.0);
    const double dt = 1.0 / config.pose_rate;
    for (std::size_t n = 0;; ++n) {
        const double t = static_cast<double>(n) * dt;
        const double s = drive.position();
        const double mph = config.speed.at(s);
        log.true_poses.push_back(true_pose_at(terrain, s, mph, t));
        log.speeds.push_back({t, mph});
        ImuSample sample = drive.step(mph);
        sample.timestamp = t;
        log.imu.push_back(sample);
        if (s >= terrain.track_length)
            break;
    }
    log.end_s = log.true_poses.back().position.x;
    const double duration = log.true_poses.back().timestamp;

    // Orientation error only; positions stay exact.
    DriftProcess pitch_err, roll_err;
    const PoseErrorModel& pe = config.pose_error;
    if (pe.enabled) {
        const double slope = pe.z_error_rate / config.mount.center_beam_reach();
        const double bound = pe.orientation_sigma_deg * kPi / 180.0;
        std::mt19937_64 pitch_rng = make_rng(config.seed, 0x9e1);
        std::mt19937_64 roll_rng = make_rng(config.seed, 0x7011);
        pitch_err = DriftProcess(pitch_rng, duration, slope, bound, pe.dwell_mean);
        roll_err = DriftProcess(roll_rng, duration, pe.roll_scale * slope, pe.roll_scale * bound, pe.dwell_mean);
    }
    log.poses.reserve(log.true_poses.size());
    for (const PoseSample& truth : log.true_poses) {
        PoseSample p = truth;
        p.pitch += pitch_err.value(truth.timestamp);
        p.roll += roll_err.value(truth.timestamp);
        p.pitch_rate += pitch_err.rate(truth.timestamp);
        p.roll_rate += roll_err.rate(truth.timestamp);
        log.poses.push_back(p);
    }

    const RayCaster caster(log.terrain);
    RawScan proto;
    proto.angular_resolution_deg = config.angular_resolution_deg;
    proto.scan_frequency_hz = config.scan_frequency;
    std::array<Eigen::Vector3d, kBeamsPerScan> beams;
    for (std::size_t b = 0; b < kBeamsPerScan; ++b) {
        const Vec3 v = beam_direction(proto, b, config.mount);
        beams[b] = {v.x, v.y, v.z};
    }
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) / config.scan_frequency;
        if (t > duration)
            break;
        const PoseSample pose = interpolate_pose(log.true_poses, t);
        const Eigen::Matrix3d rot = rotation_of(pose);
        const Vec3 origin = laser_origin(pose, config.mount);
        RawScan scan = proto;
        scan.timestamp = t;
        for (std::size_t b = 0; b < kBeamsPerScan; ++b) {
            const Eigen::Vector3d w = rot * beams[b];
            scan.ranges[b] = caster.cast(origin, {w.x(), w.y(), w.z()});
        }
        log.scans.push_back(scan);
    }
    return log;
}

std::pair<SensorLog, SensorLog> split_log(const SensorLog& log, double boundary_s)
{
    if (log.true_poses.empty())
        throw DataError("split_log: log has no poses");
    const auto s_at = [&](double t) {
        const double tc = std::clamp(t, log.true_poses.front().timestamp, log.true_poses.back().timestamp);
        return interpolate_pose(log.true_poses, tc).position.x;
    };

    std::pair<SensorLog, SensorLog> out;
    SensorLog* halves[2] = {&out.first, &out.second};
    for (SensorLog* h : halves) {
        h->config = log.config;
        h->terrain = log.terrain;
        h->terrain.bumps.clear();
    }
    const auto pick = [&](double s) { return s <= boundary_s ? halves[0] : halves[1]; };

    for (std::size_t i = 0; i < log.true_poses.size(); ++i) {
        SensorLog* h = pick(log.true_poses[i].position.x);
        h->true_poses.push_back(log.true_poses[i]);
        if (i < log.poses.size())
            h->poses.push_back(log.poses[i]);
    }
    for (const ImuSample& s : log.imu)
        pick(s_at(s.timestamp))->imu.push_back(s);
    for (const SpeedSample& s : log.speeds)
        pick(s_at(s.timestamp))->speeds.push_back(s);
    for (const RawScan& s : log.scans)
        pick(s_at(s.timestamp))->scans.push_back(s);
    for (const Bump& b : log.terrain.bumps)
        pick(b.leading_edge())->terrain.bumps.push_back(b);
    for (SensorLog* h : halves) {
        if (!h->true_poses.empty()) {
            h->start_s = h->true_poses.front().position.x;
            h->end_s = h->true_poses.back().position.x;
        }
    }
    return out;
}

double ground_truth_positive_rate(const TerrainProfile& terrain, const SimConfig& config, double patch_length,
                                  double association_radius, double threshold, double filter_gain)
{
    if (!(patch_length > 0.0))
        throw ConfigError("patch_length must be positive");
    const auto patches = static_cast<std::size_t>(std::floor(terrain.track_length / patch_length));
    if (patches == 0)
        return 0.0;
    std::vector<char> positive(patches, 0);
    for (const Bump& b : terrain.bumps) {
        const double rugged = filter_gain * config.shock.gain * b.felt_height(config.half_track);
        if (!(rugged >= threshold))
            continue;
        const double first = std::ceil((b.leading_edge() - association_radius) / patch_length - 0.5);
        const double last = std::floor((b.leading_edge() + association_radius) / patch_length - 0.5);
        for (double k = std::max(0.0, first); k <= last && k < static_cast<double>(patches); k += 1.0)
            positive[static_cast<std::size_t>(k)] = 1;
    }
    return static_cast<double>(std::count(positive.begin(), positive.end(), 1)) / static_cast<double>(patches);
}

}  // namespace roughness
