#include "roughness/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>

#include "roughness/errors.hpp"

namespace roughness {

ClassificationRates ClassificationRates::from_counts(std::size_t tp, std::size_t fp, std::size_t tn,
                                                     std::size_t fn)
{
    ClassificationRates r;
    r.tp = tp;
    r.fp = fp;
    r.tn = tn;
    r.fn = fn;
    r.tp_rate = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    r.fp_rate = fp + tn > 0 ? static_cast<double>(fp) / static_cast<double>(fp + tn) : 0.0;
    return r;
}

double objective(const ClassificationRates& rates, double lambda)
{
    return rates.tp_rate - lambda * rates.fp_rate;
}

void TrainingConfig::validate() const
{
    if (!(lambda > 0.0))
        throw ConfigError("training lambda must be positive");
    if (!(ruggedness_threshold > 0.0))
        throw ConfigError("ruggedness_threshold must be positive");
    if (iterations < 0)
        throw ConfigError("training iterations must be non-negative");
    for (double inc : initial_i)
        if (!(inc >= 0.0 && std::isfinite(inc)))
            throw ConfigError("initial increments must be finite and non-negative");
    if (!initial_b.is_valid())
        throw ConfigError("initial parameter vector violates its invariants");
}

Increments TrainingConfig::default_increments(const ParameterVector& start)
{
    Increments inc{};
    for (std::size_t i = 0; i < ParameterVector::kSize; ++i)
        inc[i] = 0.5 * std::abs(start.get(i));
    return inc;
}

double threshold_above(double max_score)
{
    return max_score == 0.0 ? 1.0 : max_score + std::abs(max_score);
}

ThresholdChoice best_threshold(std::span<const double> scores, std::span<const char> positive, double lambda)
{
    const std::size_t n = scores.size();
    if (n == 0)
        throw TrainingDataError("threshold search on an empty dataset");
    const std::size_t total_pos = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), 1));
    const std::size_t total_neg = n - total_pos;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    // Start above every score: nothing is flagged.
    ThresholdChoice best;
    best.mu = threshold_above(scores[order.front()]);
    best.rates = ClassificationRates::from_counts(0, 0, total_neg, total_pos);
    best.objective = objective(best.rates, lambda);

    // Lowering mu to a distinct score value flags everything strictly above it.
    std::size_t flagged_pos = 0;
    std::size_t flagged_neg = 0;
    std::size_t i = 0;
    while (i < n) {
        const double mu = scores[order[i]];
        const auto rates = ClassificationRates::from_counts(flagged_pos, flagged_neg, total_neg - flagged_neg,
                                                            total_pos - flagged_pos);
        const double obj = objective(rates, lambda);
        if (obj > best.objective)
            best = {mu, rates, obj};
        while (i < n && scores[order[i]] == mu) {
            if (positive[order[i]])
                ++flagged_pos;
            else
                ++flagged_neg;
            ++i;
        }
    }
    return best;
}

TrainingSet::TrainingSet(std::span<const PatchSample> patches, double ruggedness_threshold)
{
    for (const PatchSample& p : patches) {
        if (!p.scorable()) {
            ++dropped_;
            continue;
        }
        left_.emplace_back(p.left_points);
        right_.emplace_back(p.right_points);
        const bool pos = p.ruggedness_label >= ruggedness_threshold;
        positive_.push_back(pos ? 1 : 0);
        positives_ += pos ? 1 : 0;
    }
}

std::vector<double> TrainingSet::scores(const ParameterVector& params) const
{
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i)
        out[i] = score_patch(left_[i], right_[i], params).r_combined;
    return out;
}

ThresholdChoice evaluate_params(const ParameterVector& params, const TrainingSet& dataset, double lambda)
{
    if (dataset.size() == 0)
        throw TrainingDataError("training dataset has no scorable patches");
    if (dataset.positives() == 0)
        throw TrainingDataError("training dataset has no positive patches");
    const std::vector<double> scores = dataset.scores(params);
    return best_threshold(scores, dataset.labels(), lambda);
}

ThresholdChoice evaluate_params(const ParameterVector& params, std::span<const PatchSample> dataset,
                                const TrainingConfig& config)
{
    return evaluate_params(params, TrainingSet(dataset, config.ruggedness_threshold), config.lambda);
}

TrainingResult coordinate_ascent(const TrainingSet& dataset, const TrainingConfig& config)
{
    config.validate();
    TrainingResult result;

    AscentState state;
    state.b = config.initial_b;
    state.increments = config.initial_i;
    const ThresholdChoice start = evaluate_params(state.b, dataset, config.lambda);
    ++result.evaluations;
    state.best_objective = start.objective;
    state.best_mu = start.mu;
    result.progress.push_back({0, 0, 0, start.objective, start.mu});

    for (int round = 1; round <= config.iterations; ++round) {
        for (std::size_t coord = 0; coord < ParameterVector::kSize; ++coord) {
            state.coordinate = coord;
            // Vector we just moved away from; stepping back to it cannot improve.
            ParameterVector left_behind = state.b;
            bool moved = false;
            for (int sign : {-1, +1}) {
                state.sign = sign;
                const double inc = state.increments[coord];
                if (inc == 0.0)
                    continue;
                const ParameterVector trial = state.b.with(coord, state.b.get(coord) + sign * inc);
                if (!trial.is_valid()) {
                    ++result.skipped_invalid;
                    continue;
                }
                if (trial == state.b || (moved && trial == left_behind))
                    continue;
                const ThresholdChoice choice = evaluate_params(trial, dataset, config.lambda);
                ++result.evaluations;
                if (choice.objective > state.best_objective) {
                    left_behind = state.b;
                    moved = true;
                    state.b = trial;
                    state.best_objective = choice.objective;
                    state.best_mu = choice.mu;
                    result.progress.push_back({round, coord, sign, choice.objective, choice.mu});
                }
            }
        }
        for (double& inc : state.increments)
            inc *= 0.5;
    }

    result.final_choice = evaluate_params(state.b, dataset, config.lambda);
    ++result.evaluations;
    result.model = {state.b, result.final_choice.mu};
    return result;
}

TrainingResult coordinate_ascent(std::span<const PatchSample> dataset, const TrainingConfig& config)
{
    return coordinate_ascent(TrainingSet(dataset, config.ruggedness_threshold), config);
}

void write_progress(std::ostream& out, std::span<const ProgressRecord> progress)
{
    out << "round\tcoordinate\tsign\tobjective\tmu\n";
    char buf[64];
    for (const ProgressRecord& r : progress) {
        out << r.round << '\t' << (r.round == 0 ? std::string_view("start") : ParameterVector::name(r.coordinate))
            << '\t' << r.sign << '\t';
        std::snprintf(buf, sizeof buf, "%.17g\t%.17g\n", r.objective, r.mu);
        out << buf;
    }
}

}  // namespace roughness
