#include "roughness/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "roughness/errors.hpp"

namespace roughness {

namespace {

void write_row(std::ostream& out, double a, double b)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g\t%.17g\n", a, b);
    out << buf;
}

// Shared time-stepped replay. `slow_now(s, t)` asks for slow_speed at the
// current position (measured from the log start); `trigger` > 0 enables the
// accelerometer rule.
RunResult replay(const SensorLog& log, const ControllerSettings& settings, double trigger,
                 const std::function<bool(double, double)>& slow_now)
{
    if (log.speeds.empty())
        throw DataError("replay needs a speed trace");
    const SimConfig& sim = log.config;
    const FilterSpec spec = design_highpass(sim.pose_rate, settings.labeling.cutoff_hz, settings.labeling.taps);
    const std::size_t taps = spec.taps.size();
    const double dt = 1.0 / sim.pose_rate;
    const double t0 = log.speeds.front().timestamp;

    DriveSimulator drive(log.terrain, sim, log.start_s, t0);
    RunResult run;
    std::vector<double> history;  // raw accel, for the causal filter
    double cap = std::numeric_limits<double>::infinity();
    bool triggered = false;
    for (;;) {
        const double s = drive.position();
        const double t = drive.time();
        const double planned = sim.speed.at(s);
        if (triggered || (slow_now && slow_now(s - log.start_s, t)))
            cap = settings.slow_speed;
        else
            cap += settings.recovery_rate * dt;
        const double mph = std::min(planned, cap);

        const ImuSample sample = drive.step(mph);
        run.imu.push_back({t, sample.accel_z});
        run.speeds.push_back({t, mph});

        if (trigger > 0.0) {
            history.push_back(sample.accel_z);
            if (history.size() >= taps) {
                const std::size_t n = history.size() - 1;
                double y = 0.0;
                for (std::size_t j = 0; j < taps; ++j)
                    y += spec.taps[j] * history[n - j];
                triggered = std::abs(y) > trigger;
            }
        }
        if (s >= log.end_s)
            break;
    }
    run.completion_time = run.imu.back().timestamp - t0;

    const std::vector<FilteredSample> filtered = filter_accel(run.imu, spec);
    EventExtraction ex =
        extract_events(filtered, run.speeds, settings.labeling.min_separation, settings.labeling.floor);
    run.events = std::move(ex.events);
    for (const ShockEvent& e : run.events)
        run.total_shock += e.peak_accel;
    return run;
}

}  // namespace

RocCurve roc_curve(std::span<const double> scores, std::span<const char> positive)
{
    if (scores.size() != positive.size())
        throw EvaluationError("roc_curve: scores and labels differ in length");
    const std::size_t pos = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), 1));
    const std::size_t neg = scores.size() - pos;
    if (pos == 0 || neg == 0)
        throw EvaluationError("roc_curve needs at least one positive and one negative example");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double value = scores[order[i]];
        while (i < order.size() && scores[order[i]] == value) {
            if (positive[order[i]])
                ++tp;
            else
                ++fp;
            ++i;
        }
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                                static_cast<double>(tp) / static_cast<double>(pos)});
    }
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const RocPoint& a = curve.points[i - 1];
        const RocPoint& b = curve.points[i];
        curve.auc += (b.fp_rate - a.fp_rate) * (a.tp_rate + b.tp_rate) / 2.0;
    }
    return curve;
}

double tp_at_fp(const RocCurve& curve, double fp_max)
{
    double best = 0.0;
    for (const RocPoint& p : curve.points)
        if (p.fp_rate <= fp_max)
            best = std::max(best, p.tp_rate);
    return best;
}

void write_roc(std::ostream& out, const RocCurve& curve)
{
    out << "fp_rate\ttp_rate\n";
    for (const RocPoint& p : curve.points)
        write_row(out, p.fp_rate, p.tp_rate);
}

RunResult unmodified_run(const SensorLog& log, const ControllerSettings& settings)
{
    return replay(log, settings, 0.0, {});
}

RunResult reactive_controller(const SensorLog& log, double trigger, const ControllerSettings& settings)
{
    if (!(trigger > 0.0))
        throw ConfigError("reactive trigger must be positive");
    return replay(log, settings, trigger, {});
}

RunResult proactive_controller(const SensorLog& log, std::span<const Forecast> forecasts, double lookahead,
                               const ControllerSettings& settings)
{
    if (!(lookahead > 0.0))
        throw ConfigError("lookahead must be positive");
    std::vector<Forecast> rugged;
    for (const Forecast& f : forecasts)
        if (f.rugged)
            rugged.push_back(f);
    std::sort(rugged.begin(), rugged.end(), [](const Forecast& a, const Forecast& b) { return a.start < b.start; });

    std::size_t first = 0;  // forecasts before this one are behind the vehicle
    const auto slow_now = [&](double s, double t) {
        while (first < rugged.size() && rugged[first].end < s)
            ++first;
        for (std::size_t i = first; i < rugged.size() && rugged[i].start <= s + lookahead; ++i)
            if (rugged[i].end >= s && rugged[i].acquired_time <= t)
                return true;
        return false;
    };
    return replay(log, settings, 0.0, slow_now);
}

std::vector<Forecast> forecasts_from_scores(std::span<const Patch> patches, std::span<const double> scores,
                                            double mu, double patch_length)
{
    if (patches.size() != scores.size())
        throw EvaluationError("forecasts_from_scores: one score per patch expected");
    std::vector<Forecast> out;
    out.reserve(patches.size());
    for (std::size_t i = 0; i < patches.size(); ++i) {
        const PatchSample& p = patches[i].sample;
        out.push_back({p.location - patch_length / 2.0, p.location + patch_length / 2.0, patches[i].acquired_time,
                       p.scorable() && scores[i] > mu});
    }
    return out;
}

std::vector<TradeoffPoint> tradeoff_curve(const RunResult& baseline, std::span<const double> sweep,
                                          const std::function<RunResult(double)>& controller)
{
    if (sweep.empty())
        throw EvaluationError("tradeoff_curve needs at least one setting");
    if (!(baseline.completion_time > 0.0 && baseline.total_shock > 0.0))
        throw EvaluationError("baseline run has no time or no shock to normalize by");
    std::vector<TradeoffPoint> out;
    out.reserve(sweep.size());
    for (double setting : sweep) {
        const RunResult r = controller(setting);
        out.push_back({r.completion_time / baseline.completion_time, r.total_shock / baseline.total_shock, setting});
    }
    return out;
}

void write_tradeoff(std::ostream& out, std::span<const TradeoffPoint> curve)
{
    out << "completion_time\ttotal_shock\tsetting\n";
    char buf[96];
    for (const TradeoffPoint& p : curve) {
        std::snprintf(buf, sizeof buf, "%.17g\t%.17g\t%.17g\n", p.completion_time, p.total_shock, p.setting);
        out << buf;
    }
}

Comparison compare_tradeoffs(std::span<const TradeoffPoint> reactive, std::span<const TradeoffPoint> proactive,
                             double tolerance)
{
    if (proactive.empty())
        throw EvaluationError("compare_tradeoffs: empty proactive curve");
    std::vector<TradeoffPoint> front(proactive.begin(), proactive.end());
    std::sort(front.begin(), front.end(), [](const TradeoffPoint& a, const TradeoffPoint& b) {
        return a.completion_time != b.completion_time ? a.completion_time < b.completion_time
                                                      : a.total_shock < b.total_shock;
    });
    for (std::size_t i = 1; i < front.size(); ++i)
        front[i].total_shock = std::min(front[i].total_shock, front[i - 1].total_shock);

    const auto shock_at = [&](double t) {
        if (t <= front.front().completion_time)
            return front.front().total_shock;
        if (t >= front.back().completion_time)
            return front.back().total_shock;
        const auto hi = std::lower_bound(front.begin(), front.end(), t, [](const TradeoffPoint& p, double v) {
            return p.completion_time < v;
        });
        const auto lo = std::prev(hi);
        if (hi->completion_time == lo->completion_time)
            return hi->total_shock;
        const double w = (t - lo->completion_time) / (hi->completion_time - lo->completion_time);
        return lo->total_shock + w * (hi->total_shock - lo->total_shock);
    };

    Comparison c;
    double sum = 0.0;
    for (const TradeoffPoint& r : reactive) {
        if (!(r.completion_time > 1.0))
            continue;
        MatchedPair pair;
        pair.reactive_time = r.completion_time;
        pair.reactive_shock = r.total_shock;
        pair.matched = r.completion_time >= front.front().completion_time * (1.0 - tolerance) &&
                       r.completion_time <= front.back().completion_time * (1.0 + tolerance);
        pair.proactive_shock = shock_at(r.completion_time);
        pair.reduction = r.total_shock > 0.0 ? 1.0 - pair.proactive_shock / r.total_shock : 0.0;
        if (pair.matched) {
            ++c.matched;
            sum += pair.reduction;
            if (pair.proactive_shock < pair.reactive_shock)
                ++c.dominated;
        }
        c.pairs.push_back(pair);
    }
    c.mean_reduction = c.matched > 0 ? sum / static_cast<double>(c.matched) : 0.0;
    c.dominance_fraction =
        c.pairs.empty() ? 0.0 : static_cast<double>(c.dominated) / static_cast<double>(c.pairs.size());
    return c;
}

OperatingPointComparison compare_operating_point(const TradeoffPoint& proactive,
                                                 std::span<const TradeoffPoint> reactive, double tolerance)
{
    OperatingPointComparison c;
    double sum = 0.0;
    c.min_reduction = std::numeric_limits<double>::infinity();
    for (const TradeoffPoint& r : reactive) {
        if (std::abs(r.completion_time - proactive.completion_time) > tolerance * proactive.completion_time)
            continue;
        const double reduction = r.total_shock > 0.0 ? 1.0 - proactive.total_shock / r.total_shock : 0.0;
        ++c.matched;
        sum += reduction;
        c.min_reduction = std::min(c.min_reduction, reduction);
    }
    if (c.matched == 0)
        c.min_reduction = 0.0;
    else
        c.mean_reduction = sum / static_cast<double>(c.matched);
    return c;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw EvaluationError("fit_line needs at least two (x, y) pairs");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0))
        throw EvaluationError("fit_line: x is constant");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    fit.n = x.size();
    return fit;
}

ScanDrift center_beam_drift(const SensorLog& log, std::size_t max_lag, std::size_t stride)
{
    if (max_lag == 0 || stride == 0)
        throw EvaluationError("center_beam_drift: lag and stride must be positive");
    std::vector<double> t, z;
    const double t0 = log.poses.empty() ? 0.0 : log.poses.front().timestamp;
    const double t1 = log.poses.empty() ? 0.0 : log.poses.back().timestamp;
    for (const RawScan& scan : log.scans) {
        if (scan.timestamp < t0 || scan.timestamp > t1 || !RawScan::is_return(scan.ranges[kCenterBeam]))
            continue;
        RawScan center = scan;
        center.ranges.fill(kNoReturnRange);
        center.ranges[kCenterBeam] = scan.ranges[kCenterBeam];
        const std::vector<LaserPoint> p = project_scan(center, interpolate_pose(log.poses, scan.timestamp),
                                                       log.config.mount);
        t.push_back(scan.timestamp);
        z.push_back(p.front().z);
    }
    ScanDrift out;
    for (std::size_t i = 0; i < t.size(); i += stride)
        for (std::size_t lag = 1; lag <= max_lag && i + lag < t.size(); ++lag) {
            out.dt.push_back(t[i + lag] - t[i]);
            out.dz.push_back(std::abs(z[i + lag] - z[i]));
        }
    return out;
}

PatchScores score_patches(std::span<const Patch> patches, const ClassifierModel* model, double threshold)
{
    PatchScores out;
    for (std::size_t i = 0; i < patches.size(); ++i) {
        const PatchSample& p = patches[i].sample;
        if (!p.scorable())
            continue;
        out.index.push_back(i);
        out.model.push_back(model != nullptr ? score_patch(p.left_points, p.right_points, model->params).r_combined
                                             : p.ruggedness_label);
        out.naive.push_back(naive_score(p));
        out.positive.push_back(p.ruggedness_label >= threshold ? 1 : 0);
    }
    return out;
}

std::vector<double> proactive_sweep(std::span<const double> scores, std::size_t count)
{
    if (scores.empty() || count == 0)
        throw EvaluationError("proactive_sweep needs scores and a positive count");
    std::vector<double> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double n = static_cast<double>(sorted.size());
    std::vector<double> mus;
    for (std::size_t i = 0; i < count; ++i) {
        const double frac =
            count == 1 ? 0.0005 : 0.0005 * std::pow(600.0, static_cast<double>(i) / static_cast<double>(count - 1));
        const auto k = std::min(static_cast<std::size_t>(std::ceil(frac * n)), sorted.size() - 1);
        mus.push_back(sorted[k]);
    }
    std::sort(mus.begin(), mus.end(), std::greater<>());
    mus.erase(std::unique(mus.begin(), mus.end()), mus.end());
    return mus;
}

}  // namespace roughness
