#include "roughness/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "roughness/errors.hpp"
#include "roughness/kernels.hpp"

namespace roughness {

namespace {

double gain_at(std::span<const double> taps, double freq, double sample_rate)
{
    const double w = 2.0 * std::numbers::pi * freq / sample_rate;
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < taps.size(); ++n)
        acc += taps[n] * std::polar(1.0, -w * static_cast<double>(n));
    return std::abs(acc);
}

}  // namespace

FilterSpec design_highpass(double sample_rate, double cutoff, std::size_t taps)
{
    if (!(sample_rate > 0.0))
        throw ConfigError("sample_rate must be positive");
    if (!(cutoff > 0.0 && cutoff < sample_rate / 2.0))
        throw ConfigError("high-pass cutoff must lie strictly between 0 and Nyquist");
    if (taps < 4 || taps % 2 != 0)
        throw ConfigError("high-pass tap count must be even and at least 4");

    // Even-length symmetric filters vanish at Nyquist, so the high-pass uses
    // the antisymmetric form: h[n] = -cos(wc k) / (pi k), k = n - (T-1)/2.
    const double wc = 2.0 * std::numbers::pi * cutoff / sample_rate;
    const double m = static_cast<double>(taps - 1);
    std::vector<double> h(taps);
    for (std::size_t n = 0; n < taps; ++n) {
        const double k = static_cast<double>(n) - m / 2.0;
        const double window = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / m);
        h[n] = -std::cos(wc * k) / (std::numbers::pi * k) * window;
    }

    const double gain = gain_at(h, (cutoff + sample_rate / 2.0) / 2.0, sample_rate);
    for (double& v : h)
        v /= gain;
    const double mean = std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(taps);
    for (double& v : h)
        v -= mean;
    return {std::move(h), sample_rate};
}

std::vector<FilteredSample> filter_accel(std::span<const ImuSample> samples, const FilterSpec& spec)
{
    const std::size_t t = spec.taps.size();
    if (samples.size() < t) {
        std::ostringstream msg;
        msg << "filter_accel: " << samples.size() << " samples is shorter than the " << t << "-tap filter";
        throw TooShortError(msg.str());
    }
    const double dt = 1.0 / spec.sample_rate;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double step = samples[i].timestamp - samples[i - 1].timestamp;
        if (std::abs(step - dt) > 1e-6 * dt + 1e-9) {
            std::ostringstream msg;
            msg << "filter_accel: non-uniform sampling at t=" << samples[i].timestamp;
            throw DataError(msg.str());
        }
    }

    const std::size_t right = spec.alignment();
    const std::size_t left = t - 1 - right;
    std::vector<double> padded;
    padded.reserve(samples.size() + t - 1);
    padded.insert(padded.end(), left, samples.front().accel_z);
    for (const ImuSample& s : samples)
        padded.push_back(s.accel_z);
    padded.insert(padded.end(), right, samples.back().accel_z);

    std::vector<double> values(samples.size());
    kernels::fir_valid(padded, spec.taps, values);

    std::vector<FilteredSample> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        out[i] = {samples[i].timestamp, values[i]};
    return out;
}

double speed_at(std::span<const SpeedSample> speeds, double t)
{
    if (speeds.empty() || t < speeds.front().timestamp || t > speeds.back().timestamp) {
        std::ostringstream msg;
        msg << "speed_at: t=" << t << " outside the speed trace";
        throw ExtrapolationError(msg.str());
    }
    const auto after = std::upper_bound(speeds.begin(), speeds.end(), t,
                                        [](double v, const SpeedSample& s) { return v < s.timestamp; });
    const auto before = std::prev(after);
    if (after == speeds.end() || before->timestamp == t)
        return before->mph;
    const double w = (t - before->timestamp) / (after->timestamp - before->timestamp);
    return before->mph + (after->mph - before->mph) * w;
}

Odometry::Odometry(std::span<const SpeedSample> speeds) : speeds_(speeds.begin(), speeds.end())
{
    if (speeds_.empty())
        throw DataError("odometry needs a non-empty speed trace");
    cumulative_.resize(speeds_.size());
    cumulative_[0] = 0.0;
    for (std::size_t i = 1; i < speeds_.size(); ++i) {
        const double span = speeds_[i].timestamp - speeds_[i - 1].timestamp;
        cumulative_[i] = cumulative_[i - 1] +
                         0.5 * (speeds_[i].mph + speeds_[i - 1].mph) * kMetersPerSecondPerMph * span;
    }
}

double Odometry::distance_at(double t) const
{
    if (t <= speeds_.front().timestamp)
        return 0.0;
    if (t >= speeds_.back().timestamp)
        return cumulative_.back();
    const auto after = std::upper_bound(speeds_.begin(), speeds_.end(), t,
                                        [](double v, const SpeedSample& s) { return v < s.timestamp; });
    const std::size_t i = static_cast<std::size_t>(std::prev(after) - speeds_.begin());
    const double span = speeds_[i + 1].timestamp - speeds_[i].timestamp;
    const double tau = t - speeds_[i].timestamp;
    const double v0 = speeds_[i].mph * kMetersPerSecondPerMph;
    const double v1 = speeds_[i + 1].mph * kMetersPerSecondPerMph;
    return cumulative_[i] + v0 * tau + 0.5 * (v1 - v0) / span * tau * tau;
}

EventExtraction extract_events(std::span<const FilteredSample> filtered,
                               std::span<const SpeedSample> speeds, double min_separation,
                               double floor)
{
    struct Peak {
        double magnitude;
        std::size_t index;
    };
    std::vector<Peak> peaks;
    const std::size_t n = filtered.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::abs(filtered[i].value);
        if (!(a > floor))
            continue;
        const bool left_ok = i == 0 || a >= std::abs(filtered[i - 1].value);
        const bool right_ok = i + 1 == n || a > std::abs(filtered[i + 1].value);
        if (left_ok && right_ok)
            peaks.push_back({a, i});
    }
    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
        return a.magnitude != b.magnitude ? a.magnitude > b.magnitude : a.index < b.index;
    });

    std::set<double> accepted;
    std::vector<Peak> kept;
    for (const Peak& p : peaks) {
        const double t = filtered[p.index].timestamp;
        const auto next = accepted.lower_bound(t);
        if (next != accepted.end() && *next - t < min_separation)
            continue;
        if (next != accepted.begin() && t - *std::prev(next) < min_separation)
            continue;
        accepted.insert(t);
        kept.push_back(p);
    }
    std::sort(kept.begin(), kept.end(), [](const Peak& a, const Peak& b) { return a.index < b.index; });

    EventExtraction out;
    for (const Peak& p : kept) {
        const double t = filtered[p.index].timestamp;
        const double speed = speed_at(speeds, t);
        if (!(speed > 0.0)) {
            ++out.discarded;
            continue;
        }
        out.events.push_back({t, p.magnitude, speed, p.magnitude / speed, 0.0});
    }
    return out;
}

void locate_events(std::span<ShockEvent> events, const Odometry& odometry)
{
    for (ShockEvent& e : events)
        e.location = odometry.distance_at(e.t_peak);
}

std::vector<PatchSample> label_patches(std::span<const ShockEvent> events,
                                       std::vector<PatchSample> patches, double association_radius)
{
    std::vector<const ShockEvent*> by_location;
    by_location.reserve(events.size());
    for (const ShockEvent& e : events)
        by_location.push_back(&e);
    std::sort(by_location.begin(), by_location.end(),
              [](const ShockEvent* a, const ShockEvent* b) { return a->location < b->location; });

    for (PatchSample& patch : patches) {
        double label = 0.0;
        auto it = std::lower_bound(by_location.begin(), by_location.end(), patch.location - association_radius,
                                   [](const ShockEvent* e, double v) { return e->location < v; });
        for (; it != by_location.end() && (*it)->location <= patch.location + association_radius; ++it)
            label = std::max(label, (*it)->ruggedness);
        patch.ruggedness_label = label;
    }
    return patches;
}

}  // namespace roughness
