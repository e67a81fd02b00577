#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "roughness/kernels.hpp"
#include "roughness/labeling.hpp"
#include "roughness/scoring.hpp"

namespace roughness {

struct ClassificationRates {
    double tp_rate = 0.0;
    double fp_rate = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    static ClassificationRates from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn);
    friend bool operator==(const ClassificationRates&, const ClassificationRates&) = default;
};

/// tp_rate - lambda * fp_rate.
double objective(const ClassificationRates& rates, double lambda);

using Increments = std::array<double, ParameterVector::kSize>;

struct TrainingConfig {
    double lambda = 5.0;
    double ruggedness_threshold = 0.02;  // G per mph; labels at or above are positive
    ParameterVector initial_b = ParameterVector::initial_guess();
    Increments initial_i = default_increments(ParameterVector::initial_guess());
    int iterations = 8;

    void validate() const;
    /// Half of each starting value.
    static Increments default_increments(const ParameterVector& start);
};

struct ThresholdChoice {
    double mu = 0.0;
    ClassificationRates rates;
    double objective = 0.0;
};

/// Scans mu over every observed score plus one value above the maximum and
/// keeps the best objective (a patch is positive when its score exceeds mu).
/// Equal objectives resolve to the larger mu.
ThresholdChoice best_threshold(std::span<const double> scores, std::span<const char> positive, double lambda);

/// The value used as "above every score": max + |max|, or 1 when max is 0.
double threshold_above(double max_score);

/// Scorable patches of a labeled dataset with their point sets cached in
/// column form. Unscorable patches are dropped.
class TrainingSet {
public:
    TrainingSet(std::span<const PatchSample> patches, double ruggedness_threshold);

    std::size_t size() const { return left_.size(); }
    std::size_t positives() const { return positives_; }
    std::size_t dropped() const { return dropped_; }
    std::span<const char> labels() const { return positive_; }

    /// R_combined of every patch under `params`.
    std::vector<double> scores(const ParameterVector& params) const;

private:
    std::vector<kernels::PointColumns> left_;
    std::vector<kernels::PointColumns> right_;
    std::vector<char> positive_;
    std::size_t positives_ = 0;
    std::size_t dropped_ = 0;
};

/// Best mu, rates and objective for a candidate parameter vector. Throws
/// TrainingDataError when the dataset is empty or has no positives.
ThresholdChoice evaluate_params(const ParameterVector& params, const TrainingSet& dataset, double lambda);
ThresholdChoice evaluate_params(const ParameterVector& params, std::span<const PatchSample> dataset,
                                const TrainingConfig& config);

/// Search state: current best vector, increments and the single active signed coordinate.
struct AscentState {
    ParameterVector b;
    Increments increments{};
    std::size_t coordinate = 0;
    int sign = -1;
    double best_objective = 0.0;
    double best_mu = 0.0;
};

/// One accepted step. Round 0 is the starting point (coordinate and sign unused).
struct ProgressRecord {
    int round = 0;
    std::size_t coordinate = 0;
    int sign = 0;
    double objective = 0.0;
    double mu = 0.0;
};

struct TrainingResult {
    ClassifierModel model;
    ThresholdChoice final_choice;
    std::vector<ProgressRecord> progress;
    std::size_t evaluations = 0;
    std::size_t skipped_invalid = 0;
};

/// Coordinate ascent over the 13 shape parameters: try +/- increment on each
/// coordinate in turn, keep a move only if the objective strictly improves,
/// halve all increments after each full rotation. mu is re-derived for the
/// final vector at the end.
TrainingResult coordinate_ascent(const TrainingSet& dataset, const TrainingConfig& config);
TrainingResult coordinate_ascent(std::span<const PatchSample> dataset, const TrainingConfig& config);

/// Tab-separated progress table with a header row.
void write_progress(std::ostream& out, std::span<const ProgressRecord> progress);

}  // namespace roughness
