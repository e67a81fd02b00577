#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "roughness/geometry.hpp"

namespace roughness {

inline constexpr double kMetersPerSecondPerMph = 0.44704;

struct ImuSample {
    double timestamp = 0.0;
    double accel_z = 0.0;  // G, gravity included
};

struct SpeedSample {
    double timestamp = 0.0;
    double mph = 0.0;
};

/// One output sample of the shock filter, time-registered with its input.
struct FilteredSample {
    double timestamp = 0.0;
    double value = 0.0;  // G
};

struct FilterSpec {
    std::vector<double> taps;
    double sample_rate = 100.0;

    /// Samples the output is shifted back by so peaks line up with the input.
    std::size_t alignment() const { return taps.size() / 2; }
};

struct ShockEvent {
    double t_peak = 0.0;
    double peak_accel = 0.0;  // |filtered| in G
    double speed = 0.0;       // mph at t_peak
    double ruggedness = 0.0;  // G per mph
    double location = 0.0;    // along-track meters, filled by locate_events
};

/// Left and right rear-wheel point sets of one terrain patch.
struct PatchSample {
    std::vector<LaserPoint> left_points;
    std::vector<LaserPoint> right_points;
    double ruggedness_label = 0.0;  // G per mph
    double location = 0.0;          // along-track center, m

    bool scorable() const { return left_points.size() >= 2 && right_points.size() >= 2; }
};

/// 40-tap (by default) high-pass for the z accelerometer. Even length,
/// antisymmetric taps from a Hamming-windowed ideal high-pass, normalized
/// to unit passband gain, tap mean removed. Throws ConfigError when the
/// cutoff is not inside (0, Nyquist) or the tap count is odd.
FilterSpec design_highpass(double sample_rate, double cutoff, std::size_t taps = 40);

/// Convolves the accelerometer stream with the filter. The input is
/// extended at both ends by repeating its edge samples, and the output is
/// shifted by spec.alignment() samples so it lines up with the input.
/// Throws TooShortError for streams shorter than the filter and DataError
/// for non-uniform sampling.
std::vector<FilteredSample> filter_accel(std::span<const ImuSample> samples, const FilterSpec& spec);

/// Linear interpolation in a speed trace. Throws ExtrapolationError outside it.
double speed_at(std::span<const SpeedSample> speeds, double t);

/// Along-track distance obtained by integrating a (piecewise linear) speed trace.
class Odometry {
public:
    explicit Odometry(std::span<const SpeedSample> speeds);
    double distance_at(double t) const;

private:
    std::vector<SpeedSample> speeds_;
    std::vector<double> cumulative_;  // meters at each sample
};

struct EventExtraction {
    std::vector<ShockEvent> events;  // ascending t_peak
    std::size_t discarded = 0;       // peaks dropped for non-positive speed
};

/// Greedy peak picking on |filtered|: local maxima strictly above `floor`,
/// taken largest first, each excluding others closer than `min_separation`
/// seconds. Ruggedness is peak / speed at the peak.
EventExtraction extract_events(std::span<const FilteredSample> filtered,
                               std::span<const SpeedSample> speeds, double min_separation,
                               double floor);

/// Fills ShockEvent::location from the odometry at each peak time.
void locate_events(std::span<ShockEvent> events, const Odometry& odometry);

/// Each patch's label becomes the largest ruggedness among events within
/// `association_radius` of its location, or 0 when there is none.
std::vector<PatchSample> label_patches(std::span<const ShockEvent> events,
                                       std::vector<PatchSample> patches, double association_radius);

}  // namespace roughness
