#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "roughness/config.hpp"
#include "roughness/labeling.hpp"
#include "roughness/pipeline.hpp"
#include "roughness/scoring.hpp"
#include "roughness/simworld.hpp"

namespace roughness {

struct RocPoint {
    double fp_rate = 0.0;
    double tp_rate = 0.0;

    friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
    std::vector<RocPoint> points;  // (0,0) first, (1,1) last
    double auc = 0.0;
};

/// Sweeps mu from above the largest score down past the smallest; one
/// point per distinct score (tied scores move along a diagonal). AUC by
/// the trapezoid rule. Throws EvaluationError unless both classes occur.
RocCurve roc_curve(std::span<const double> scores, std::span<const char> positive);

/// Best tp_rate among curve points with fp_rate <= fp_max.
double tp_at_fp(const RocCurve& curve, double fp_max);

void write_roc(std::ostream& out, const RocCurve& curve);

struct ControllerSettings {
    double slow_speed = 15.0;     // mph
    double recovery_rate = 2.0;   // mph per second
    LabelingConfig labeling;      // shock filter and event rule used for the shock total
};

/// One replay of the course.
struct RunResult {
    double completion_time = 0.0;  // s
    double total_shock = 0.0;      // sum of event peaks, G
    std::vector<ImuSample> imu;
    std::vector<SpeedSample> speeds;
    std::vector<ShockEvent> events;
};

/// Along-track stretch the proactive controller may slow for, usable once
/// its laser data exists. Positions are measured from the log's first pose.
struct Forecast {
    double start = 0.0;
    double end = 0.0;
    double acquired_time = 0.0;
    bool rugged = false;
};

/// Replays the course with no speed modification.
RunResult unmodified_run(const SensorLog& log, const ControllerSettings& settings);

/// Slows to slow_speed whenever the causally filtered accelerometer exceeds
/// `trigger`, then recovers linearly toward the planned speed.
RunResult reactive_controller(const SensorLog& log, double trigger, const ControllerSettings& settings);

/// Slows to slow_speed while an acquired rugged forecast lies within
/// [s, s + lookahead], then recovers linearly toward the planned speed.
RunResult proactive_controller(const SensorLog& log, std::span<const Forecast> forecasts, double lookahead,
                               const ControllerSettings& settings);

/// Forecasts from scored patches: rugged when the score strictly exceeds mu.
/// Unscorable patches never fire.
std::vector<Forecast> forecasts_from_scores(std::span<const Patch> patches, std::span<const double> scores,
                                            double mu, double patch_length);

struct TradeoffPoint {
    double completion_time = 1.0;  // normalized by the unmodified run
    double total_shock = 1.0;      // normalized by the unmodified run
    double setting = 0.0;
};

/// One normalized point per swept setting. Throws EvaluationError for an
/// empty sweep.
std::vector<TradeoffPoint> tradeoff_curve(const RunResult& baseline, std::span<const double> sweep,
                                          const std::function<RunResult(double)>& controller);

void write_tradeoff(std::ostream& out, std::span<const TradeoffPoint> curve);

struct MatchedPair {
    double reactive_time = 0.0;
    double reactive_shock = 0.0;
    double proactive_shock = 0.0;  // on the proactive front at reactive_time
    double reduction = 0.0;        // 1 - proactive / reactive
    bool matched = false;          // reactive_time within the front's time range (with tolerance)
};

struct Comparison {
    std::vector<MatchedPair> pairs;  // reactive settings that changed the speed
    std::size_t matched = 0;
    std::size_t dominated = 0;       // matched pairs with strictly lower proactive shock
    double mean_reduction = 0.0;     // over matched pairs
    double dominance_fraction = 0.0; // dominated / pairs
};

/// Compares each speed-modifying reactive setting against the proactive
/// Pareto front (lowest shock at or below each time) interpolated linearly
/// in completion time. A pair counts as matched when its time lies within
/// the front's time range widened by `tolerance` (relative).
Comparison compare_tradeoffs(std::span<const TradeoffPoint> reactive, std::span<const TradeoffPoint> proactive,
                             double tolerance);

/// One proactive operating point against the reactive runs whose completion
/// time is within `tolerance` (relative) of it.
struct OperatingPointComparison {
    std::size_t matched = 0;
    double min_reduction = 0.0;   // smallest 1 - proactive / reactive over matched runs
    double mean_reduction = 0.0;
};
OperatingPointComparison compare_operating_point(const TradeoffPoint& proactive,
                                                 std::span<const TradeoffPoint> reactive, double tolerance);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n = 0;
};

/// Ordinary least squares of y on x. Throws EvaluationError for fewer than
/// two points or constant x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Pose-error growth on flat ground: for scan pairs up to `max_lag` scans
/// apart (first scans every `stride`), the absolute z difference of the
/// center-beam returns projected through the reported poses, against the
/// time between the scans.
struct ScanDrift {
    std::vector<double> dt;
    std::vector<double> dz;
};
ScanDrift center_beam_drift(const SensorLog& log, std::size_t max_lag, std::size_t stride);

/// Scores of the scorable patches of a labeled log.
struct PatchScores {
    std::vector<std::size_t> index;  // position in the patch list
    std::vector<double> model;       // learned R_combined, or the label itself for the oracle
    std::vector<double> naive;       // naive_score
    std::vector<char> positive;      // label >= ruggedness threshold
};

/// `model` null selects the oracle, which scores each patch by its label.
PatchScores score_patches(std::span<const Patch> patches, const ClassifierModel* model, double threshold);

/// mu values for a proactive sweep: score quantiles flagging between 0.05%
/// and 30% of scorable patches, geometrically spaced, descending.
std::vector<double> proactive_sweep(std::span<const double> scores, std::size_t count);

}  // namespace roughness
