#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "roughness/geometry.hpp"
#include "roughness/errors.hpp"
#include "roughness/kernels.hpp"

namespace roughness {

/// The 13 learned shape parameters of the surface classifier: ten
/// polynomial coefficients/exponents, the successive-score weight v, the
/// number of retained scores omega and the wheel-combination exponent zeta.
struct ParameterVector {
    static constexpr std::size_t kSize = 13;
    static constexpr std::size_t kV = 10;
    static constexpr std::size_t kOmega = 11;
    static constexpr std::size_t kZeta = 12;

    kernels::Alphas alpha{};  // alpha[0] is alpha1
    double v = 1.0;
    int omega = 1;
    double zeta = 1.0;

    /// Coordinate access in the fixed order alpha1..alpha10, v, omega, zeta.
    double get(std::size_t index) const;
    /// Returns a copy with one coordinate replaced. omega is rounded to the
    /// nearest integer; no validity check happens here.
    ParameterVector with(std::size_t index, double value) const;

    /// omega >= 1, the five exponents >= 0, v >= 0, zeta > 0, all finite.
    bool is_valid() const;
    void validate() const;

    static std::string_view name(std::size_t index);
    /// alpha1 = 1, penalty coefficients 0.1, exponents 1, v = 1.5, omega = 10, zeta = 1.
    static ParameterVector initial_guess();

    friend bool operator==(const ParameterVector&, const ParameterVector&) = default;
};

struct ClassifierModel {
    ParameterVector params;
    double mu = 0.0;

    friend bool operator==(const ClassifierModel&, const ClassifierModel&) = default;
};

struct RoughnessScore {
    double r_left = 0.0;
    double r_right = 0.0;
    double r_combined = 0.0;
    /// False when either wheel had fewer than two points. Such patches are
    /// reported smooth and should be left out of rate statistics.
    bool scorable = true;
};

/// Pairwise difference score between two laser points.
double delta(const LaserPoint& a, const LaserPoint& b, const ParameterVector& p);

/// The min(omega, pair count) largest pairwise scores, ascending.
/// Throws UnscorablePatchError for fewer than two points.
std::vector<double> score_window(std::span<const LaserPoint> points, const ParameterVector& p);
std::vector<double> score_window(const kernels::PointColumns& points, const ParameterVector& p);

/// Same reduction with a caller-supplied pair function; used to audit how
/// many pair evaluations a window needs.
template <class PairFn>
std::vector<double> score_window_with(std::span<const LaserPoint> points, int omega, PairFn&& pair_fn);

/// Keeps the `omega` largest values of `scores` and returns them ascending.
/// `scores` is reordered.
std::vector<double> top_scores(std::span<double> scores, int omega);

/// sum_i W[i] * v^i over the retained scores (W ascending).
double accumulate(std::span<const double> w, double v, int omega);

/// r_left^zeta + r_right^zeta. Callers clamp negative inputs to zero first.
double combine(double r_left, double r_right, double zeta);

/// True when r_combined strictly exceeds mu.
bool classify(double r_combined, const ClassifierModel& model);

/// Full per-patch score: window, accumulation and wheel combination with
/// negative per-wheel scores clamped to zero.
RoughnessScore score_patch(std::span<const LaserPoint> left, std::span<const LaserPoint> right,
                           const ParameterVector& p);
RoughnessScore score_patch(const kernels::PointColumns& left, const kernels::PointColumns& right,
                           const ParameterVector& p);

/// Model document: one "name = value" line per field (alpha1..alpha10, v,
/// omega, zeta, mu); blank lines and '#' comments are ignored.
void write_model(std::ostream& out, const ClassifierModel& model);
ClassifierModel read_model(std::istream& in);

// ---------------------------------------------------------------------------

template <class PairFn>
std::vector<double> score_window_with(std::span<const LaserPoint> points, int omega, PairFn&& pair_fn)
{
    if (points.size() < 2)
        throw UnscorablePatchError("score_window needs at least two points");
    std::vector<double> scores;
    scores.reserve(points.size() * (points.size() - 1) / 2);
    for (std::size_t r = 0; r < points.size(); ++r)
        for (std::size_t c = r + 1; c < points.size(); ++c)
            scores.push_back(pair_fn(points[r], points[c]));
    return top_scores(scores, omega);
}

}  // namespace roughness
