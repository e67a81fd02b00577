#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference
// implementation and, on x86-64, an AVX2 variant chosen at runtime.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "roughness/geometry.hpp"

namespace roughness::kernels {

/// Structure-of-arrays copy of a point set. Columns are zero-padded to a
/// multiple of four (plus one spare lane) so vector loads never run off the end.
class PointColumns {
public:
    PointColumns() = default;
    explicit PointColumns(std::span<const LaserPoint> points);

    std::size_t size() const noexcept { return size_; }
    std::size_t pair_count() const noexcept { return size_ < 2 ? 0 : size_ * (size_ - 1) / 2; }

    const double* z() const noexcept { return z_.data(); }
    const double* x() const noexcept { return x_.data(); }
    const double* y() const noexcept { return y_.data(); }
    const double* tau() const noexcept { return tau_.data(); }
    const double* roll_rate() const noexcept { return roll_rate_.data(); }
    const double* pitch_rate() const noexcept { return pitch_rate_.data(); }

private:
    std::size_t size_ = 0;
    std::vector<double> x_, y_, z_, tau_, roll_rate_, pitch_rate_;
};

using Alphas = std::array<double, 10>;

/// The pairwise difference polynomial, written once so the scalar kernel
/// and the single-pair entry point agree bit for bit. The roll and pitch
/// penalties of the two points are summed before subtraction so that
/// swapping the points gives exactly the same value.
inline double pair_delta(double abs_dz, double abs_dtau, double dist_xy, double roll_r,
                         double roll_c, double pitch_r, double pitch_c, const Alphas& a)
{
    return a[0] * std::pow(abs_dz, a[1]) - a[2] * std::pow(abs_dtau, a[3]) -
           a[4] * std::pow(dist_xy, a[5]) -
           (a[6] * std::pow(roll_r, a[7]) + a[6] * std::pow(roll_c, a[7])) -
           (a[8] * std::pow(pitch_r, a[9]) + a[8] * std::pow(pitch_c, a[9]));
}

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);
/// ISA used by the dispatching entry points. Defaults to the best supported
/// one; the ROUGHNESS_ISA environment variable ("scalar" or "avx2") overrides.
Isa active_isa();
void set_active_isa(Isa isa);

/// Restores the previous ISA on scope exit. Test helper.
class ScopedIsa {
public:
    explicit ScopedIsa(Isa isa) : previous_(active_isa()) { set_active_isa(isa); }
    ~ScopedIsa() { set_active_isa(previous_); }
    ScopedIsa(const ScopedIsa&) = delete;
    ScopedIsa& operator=(const ScopedIsa&) = delete;

private:
    Isa previous_;
};

/// Difference score of every unordered pair (r < c), row-major:
/// (0,1), (0,2), ..., (0,N-1), (1,2), ... `out` must hold pair_count() values.
void pair_scores(const PointColumns& points, const Alphas& alphas, std::span<double> out);

/// Valid-mode FIR: out[n] = sum_j taps[j] * input[n + T - 1 - j] for
/// n in [0, input.size() - T]. `out` must hold input.size() - T + 1 values.
void fir_valid(std::span<const double> input, std::span<const double> taps, std::span<double> out);

namespace scalar {
void pair_scores(const PointColumns& points, const Alphas& alphas, std::span<double> out);
void fir_valid(std::span<const double> input, std::span<const double> taps, std::span<double> out);
}  // namespace scalar

namespace avx2 {
void pair_scores(const PointColumns& points, const Alphas& alphas, std::span<double> out);
void fir_valid(std::span<const double> input, std::span<const double> taps, std::span<double> out);
}  // namespace avx2

}  // namespace roughness::kernels
