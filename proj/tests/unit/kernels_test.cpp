#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "random_data.hpp"
#include "roughness/kernels.hpp"

namespace roughness {
namespace {

using kernels::Isa;
using kernels::PointColumns;

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-300});
        worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
    }
    return worst;
}

TEST(PointColumns, PadsAndCountsPairs)
{
    std::mt19937_64 rng(3);
    const auto pts = testing::random_points(rng, 7);
    const PointColumns cols(pts);
    EXPECT_EQ(cols.size(), 7u);
    EXPECT_EQ(cols.pair_count(), 21u);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        EXPECT_EQ(cols.z()[i], pts[i].z);
        EXPECT_EQ(cols.tau()[i], pts[i].tau);
    }
    EXPECT_EQ(PointColumns(std::span<const LaserPoint>{}).pair_count(), 0u);
}

TEST(PairScores, ScalarMatchesPairDelta)
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto pts = testing::random_points(rng, 1 + trial % 13);
        const ParameterVector p = testing::random_params(rng);
        const PointColumns cols(pts);
        std::vector<double> out(cols.pair_count());
        kernels::scalar::pair_scores(cols, p.alpha, out);
        std::size_t k = 0;
        for (std::size_t r = 0; r < pts.size(); ++r)
            for (std::size_t c = r + 1; c < pts.size(); ++c, ++k)
                EXPECT_EQ(out[k], delta(pts[r], pts[c], p));
    }
}

TEST(PairScores, Avx2MatchesScalar)
{
    if (!kernels::isa_supported(Isa::avx2))
        GTEST_SKIP() << "AVX2 not available";
    std::mt19937_64 rng(7);
    for (std::size_t n = 0; n <= 45; ++n) {
        const auto pts = testing::random_points(rng, n);
        const ParameterVector p = testing::random_params(rng);
        const PointColumns cols(pts);
        std::vector<double> a(cols.pair_count()), b(cols.pair_count());
        kernels::scalar::pair_scores(cols, p.alpha, a);
        kernels::avx2::pair_scores(cols, p.alpha, b);
        EXPECT_LE(max_rel_diff(a, b), 1e-12) << "n = " << n;
    }
}

TEST(PairScores, Avx2HandlesZeroBasesAndExponents)
{
    if (!kernels::isa_supported(Isa::avx2))
        GTEST_SKIP() << "AVX2 not available";
    std::vector<LaserPoint> pts(9);  // all identical: every difference is zero
    kernels::Alphas alphas{1.0, 0.0, 0.1, 1.0, 0.1, 0.0, 0.1, 2.0, 0.1, 0.0};
    const PointColumns cols(pts);
    std::vector<double> a(cols.pair_count()), b(cols.pair_count());
    kernels::scalar::pair_scores(cols, alphas, a);
    kernels::avx2::pair_scores(cols, alphas, b);
    EXPECT_EQ(a, b);
}

TEST(FirValid, ScalarMatchesDirectSum)
{
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    std::vector<double> in(200), taps(40);
    for (double& v : in)
        v = g(rng);
    for (double& v : taps)
        v = g(rng);
    std::vector<double> out(in.size() - taps.size() + 1);
    kernels::scalar::fir_valid(in, taps, out);
    for (std::size_t n = 0; n < out.size(); ++n) {
        double expect = 0.0;
        for (std::size_t j = 0; j < taps.size(); ++j)
            expect += taps[j] * in[n + taps.size() - 1 - j];
        EXPECT_NEAR(out[n], expect, 1e-12);
    }
}

TEST(FirValid, Avx2MatchesScalar)
{
    if (!kernels::isa_supported(Isa::avx2))
        GTEST_SKIP() << "AVX2 not available";
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    for (std::size_t ntaps : {1u, 2u, 3u, 4u, 5u, 7u, 40u}) {
        for (std::size_t len = ntaps; len < ntaps + 19; ++len) {
            std::vector<double> in(len), taps(ntaps);
            for (double& v : in)
                v = g(rng);
            for (double& v : taps)
                v = g(rng);
            std::vector<double> a(len - ntaps + 1), b(len - ntaps + 1);
            kernels::scalar::fir_valid(in, taps, a);
            kernels::avx2::fir_valid(in, taps, b);
            for (std::size_t i = 0; i < a.size(); ++i)
                EXPECT_NEAR(a[i], b[i], 1e-12 * (1.0 + std::abs(a[i])));
        }
    }
}

TEST(Dispatch, ScopedIsaRestores)
{
    const Isa before = kernels::active_isa();
    {
        kernels::ScopedIsa scope(Isa::scalar);
        EXPECT_EQ(kernels::active_isa(), Isa::scalar);
    }
    EXPECT_EQ(kernels::active_isa(), before);
    EXPECT_EQ(kernels::isa_name(Isa::scalar), "scalar");
    EXPECT_TRUE(kernels::isa_supported(Isa::scalar));
}

TEST(Dispatch, ScoresAgreeAcrossIsas)
{
    if (!kernels::isa_supported(Isa::avx2))
        GTEST_SKIP() << "AVX2 not available";
    std::mt19937_64 rng(17);
    const auto left = testing::random_points(rng, 40);
    const auto right = testing::random_points(rng, 33);
    const ParameterVector p = ParameterVector::initial_guess();
    double r[2];
    for (int k = 0; k < 2; ++k) {
        kernels::ScopedIsa scope(k == 0 ? Isa::scalar : Isa::avx2);
        r[k] = score_patch(left, right, p).r_combined;
    }
    EXPECT_NEAR(r[0], r[1], 1e-12 * std::abs(r[0]));
}

}  // namespace
}  // namespace roughness
