#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "roughness/errors.hpp"
#include "roughness/labeling.hpp"

namespace roughness {
namespace {

double response_db(const std::vector<double>& taps, double f, double fs)
{
    std::complex<double> h = 0.0;
    for (std::size_t k = 0; k < taps.size(); ++k)
        h += taps[k] * std::polar(1.0, -2.0 * std::numbers::pi * f * static_cast<double>(k) / fs);
    return 20.0 * std::log10(std::max(std::abs(h), 1e-300));
}

std::vector<ImuSample> stream(const std::vector<double>& values, double fs = 100.0)
{
    std::vector<ImuSample> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = {static_cast<double>(i) / fs, values[i]};
    return out;
}

std::vector<SpeedSample> constant_speed(double mph, double t_end)
{
    return {{0.0, mph}, {t_end, mph}};
}

TEST(Highpass, MeetsFrequencyContract)
{
    const FilterSpec spec = design_highpass(100.0, 10.0, 40);
    ASSERT_EQ(spec.taps.size(), 40u);
    EXPECT_LE(response_db(spec.taps, 0.0, 100.0), -60.0);
    for (double f = 0.0; f <= 5.0; f += 0.05)
        EXPECT_LE(response_db(spec.taps, f, 100.0), -40.0) << "f = " << f;
    for (double f = 20.0; f <= 50.0; f += 0.05)
        EXPECT_GE(response_db(spec.taps, f, 100.0), -3.0) << "f = " << f;
}

TEST(Highpass, TapsAreAntisymmetric)
{
    const FilterSpec spec = design_highpass(100.0, 10.0, 40);
    for (std::size_t n = 0; n < 40; ++n)
        EXPECT_NEAR(spec.taps[n], -spec.taps[39 - n], 1e-15);
    EXPECT_EQ(spec.alignment(), 20u);
}

TEST(Highpass, RejectsBadDesigns)
{
    EXPECT_THROW(design_highpass(100.0, 0.0), ConfigError);
    EXPECT_THROW(design_highpass(100.0, 50.0), ConfigError);
    EXPECT_THROW(design_highpass(100.0, 10.0, 41), ConfigError);
    EXPECT_THROW(design_highpass(0.0, 10.0), ConfigError);
}

TEST(FilterAccel, ImpulseReproducesTaps)
{
    const FilterSpec spec = design_highpass(100.0, 10.0, 40);
    std::vector<double> x(200, 0.0);
    const std::size_t n0 = 100;
    x[n0] = 1.0;
    const auto y = filter_accel(stream(x), spec);
    const std::size_t d = spec.alignment();
    for (std::size_t j = 0; j < spec.taps.size(); ++j)
        EXPECT_NEAR(y[n0 - d + j].value, spec.taps[j], 1e-15);
    EXPECT_NEAR(y[10].value, 0.0, 1e-15);
    EXPECT_EQ(y[n0].timestamp, 1.0);
}

TEST(FilterAccel, IsLinear)
{
    const FilterSpec spec = design_highpass(100.0, 10.0, 40);
    std::mt19937_64 rng(301);
    std::normal_distribution<double> g;
    std::vector<double> x(500), y(500), mix(500);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = g(rng);
        y[i] = g(rng);
        mix[i] = 2.5 * x[i] - 0.7 * y[i];
    }
    const auto fx = filter_accel(stream(x), spec);
    const auto fy = filter_accel(stream(y), spec);
    const auto fm = filter_accel(stream(mix), spec);
    for (std::size_t i = 0; i < x.size(); ++i)
        EXPECT_NEAR(fm[i].value, 2.5 * fx[i].value - 0.7 * fy[i].value, 1e-9);
}

TEST(FilterAccel, GravityOffsetDoesNotChangeEvents)
{
    const FilterSpec spec = design_highpass(100.0, 10.0, 40);
    std::mt19937_64 rng(302);
    std::normal_distribution<double> g(0.0, 0.01);
    std::vector<double> x(1000), shifted(1000);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = g(rng) + (i % 170 == 50 ? 0.4 : 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        shifted[i] = x[i] + 1.0;
    const auto speeds = constant_speed(20.0, 10.0);
    const auto a = extract_events(filter_accel(stream(x), spec), speeds, 0.25, 0.02);
    const auto b = extract_events(filter_accel(stream(shifted), spec), speeds, 0.25, 0.02);
    ASSERT_EQ(a.events.size(), b.events.size());
    EXPECT_GT(a.events.size(), 0u);
    for (std::size_t i = 0; i < a.events.size(); ++i)
        EXPECT_EQ(a.events[i].t_peak, b.events[i].t_peak);
}

TEST(FilterAccel, RejectsShortOrIrregularStreams)
{
    const FilterSpec spec = design_highpass(100.0, 10.0, 40);
    EXPECT_THROW(filter_accel(stream(std::vector<double>(39, 1.0)), spec), TooShortError);
    auto s = stream(std::vector<double>(100, 1.0));
    s[50].timestamp += 0.003;
    EXPECT_THROW(filter_accel(s, spec), DataError);
}

std::vector<FilteredSample> spikes(std::size_t n, const std::vector<std::pair<std::size_t, double>>& at)
{
    std::vector<FilteredSample> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = {static_cast<double>(i) / 100.0, 0.0};
    for (auto [i, v] : at)
        out[i].value = v;
    return out;
}

TEST(Events, SingleImpulseGivesOneEvent)
{
    const auto ex = extract_events(spikes(300, {{150, 0.5}}), constant_speed(25.0, 3.0), 0.25, 0.02);
    ASSERT_EQ(ex.events.size(), 1u);
    EXPECT_DOUBLE_EQ(ex.events[0].ruggedness, 0.02);
    EXPECT_EQ(ex.events[0].t_peak, 1.5);
    EXPECT_EQ(ex.events[0].peak_accel, 0.5);
    EXPECT_EQ(ex.events[0].speed, 25.0);
}

TEST(Events, MinimumSeparation)
{
    const auto speeds = constant_speed(20.0, 3.0);
    const auto two = extract_events(spikes(300, {{100, 0.3}, {150, -0.4}}), speeds, 0.25, 0.02);
    EXPECT_EQ(two.events.size(), 2u);
    const auto one = extract_events(spikes(300, {{100, 0.3}, {112, -0.4}}), speeds, 0.25, 0.02);
    ASSERT_EQ(one.events.size(), 1u);
    EXPECT_EQ(one.events[0].peak_accel, 0.4);
    EXPECT_EQ(one.events[0].t_peak, 1.12);
}

TEST(Events, FloorIsStrict)
{
    const auto ex = extract_events(spikes(100, {{50, 0.02}}), constant_speed(20.0, 1.0), 0.25, 0.02);
    EXPECT_TRUE(ex.events.empty());
}

TEST(Events, NonPositiveSpeedIsDiscarded)
{
    const std::vector<SpeedSample> speeds{{0.0, 0.0}, {3.0, 0.0}};
    const auto ex = extract_events(spikes(300, {{100, 0.5}}), speeds, 0.25, 0.02);
    EXPECT_TRUE(ex.events.empty());
    EXPECT_EQ(ex.discarded, 1u);
}

TEST(Events, RuggednessTimesSpeedIsPeak)
{
    std::mt19937_64 rng(303);
    std::normal_distribution<double> g(0.0, 0.2);
    std::vector<FilteredSample> f(2000);
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = {static_cast<double>(i) / 100.0, g(rng)};
    const std::vector<SpeedSample> speeds{{0.0, 7.0}, {10.0, 33.0}, {20.0, 12.0}};
    const auto ex = extract_events(f, speeds, 0.25, 0.02);
    ASSERT_GT(ex.events.size(), 10u);
    for (std::size_t i = 0; i < ex.events.size(); ++i) {
        const ShockEvent& e = ex.events[i];
        EXPECT_DOUBLE_EQ(e.ruggedness * e.speed, e.peak_accel);
        if (i > 0)
            EXPECT_GE(e.t_peak - ex.events[i - 1].t_peak, 0.25 - 1e-12);
    }
}

TEST(Odometry, IntegratesSpeed)
{
    const std::vector<SpeedSample> speeds{{0.0, 10.0}, {2.0, 10.0}, {4.0, 30.0}};
    const Odometry odo(speeds);
    EXPECT_DOUBLE_EQ(odo.distance_at(1.0), 10.0 * kMetersPerSecondPerMph);
    EXPECT_DOUBLE_EQ(odo.distance_at(4.0), (20.0 + 40.0) * kMetersPerSecondPerMph);
    EXPECT_DOUBLE_EQ(odo.distance_at(3.0), (20.0 + 15.0) * kMetersPerSecondPerMph);
    EXPECT_EQ(odo.distance_at(-1.0), 0.0);
    EXPECT_THROW(Odometry(std::vector<SpeedSample>{}), DataError);
}

TEST(SpeedAt, InterpolatesAndRejectsOutside)
{
    const std::vector<SpeedSample> speeds{{0.0, 10.0}, {2.0, 20.0}};
    EXPECT_DOUBLE_EQ(speed_at(speeds, 0.5), 12.5);
    EXPECT_THROW(speed_at(speeds, 2.5), ExtrapolationError);
}

TEST(LabelPatches, MaxOfEventsInRadius)
{
    std::vector<PatchSample> patches(3);
    patches[0].location = 0.5;
    patches[1].location = 1.5;
    patches[2].location = 2.5;
    std::vector<ShockEvent> events{{0, 0, 0, 0.01, 1.4}, {0, 0, 0, 0.04, 1.9}, {0, 0, 0, 0.03, 0.4}};
    const auto out = label_patches(events, patches, 0.5);
    EXPECT_EQ(out[0].ruggedness_label, 0.03);
    EXPECT_EQ(out[1].ruggedness_label, 0.04);
    EXPECT_EQ(out[2].ruggedness_label, 0.0);  // 1.9 is 0.6 away
    const auto none = label_patches({}, patches, 0.5);
    for (const PatchSample& p : none)
        EXPECT_EQ(p.ruggedness_label, 0.0);
}

TEST(LocateEvents, UsesOdometry)
{
    const std::vector<SpeedSample> speeds{{0.0, 20.0}, {10.0, 20.0}};
    std::vector<ShockEvent> events{{2.0, 0.5, 20.0, 0.025, 0.0}};
    locate_events(events, Odometry(speeds));
    EXPECT_DOUBLE_EQ(events[0].location, 40.0 * kMetersPerSecondPerMph);
}

}  // namespace
}  // namespace roughness
