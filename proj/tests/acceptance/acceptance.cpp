// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: acceptance [work_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "roughness/config.hpp"
#include "roughness/evaluation.hpp"
#include "roughness/labeling.hpp"
#include "roughness/pipeline.hpp"
#include "roughness/scoring.hpp"
#include "roughness/sensor_log_io.hpp"
#include "roughness/simworld.hpp"
#include "roughness/training.hpp"

#ifndef ROUGHNESS_CLI
#error "ROUGHNESS_CLI must name the command-line tool"
#endif

namespace fs = std::filesystem;
using namespace roughness;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v)
{
    std::ostringstream out;
    out.precision(4);
    out << v;
    return out.str();
}

// ---- oracles -------------------------------------------------------------

std::vector<LaserPoint> random_points(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> xy(-0.5, 0.5), z(-0.1, 0.1), tau(0.0, 3.0), rate(-0.05, 0.05);
    std::vector<LaserPoint> pts(n);
    for (std::size_t i = 0; i < n; ++i)
        pts[i] = {xy(rng), xy(rng), z(rng), tau(rng), rate(rng), rate(rng), static_cast<std::uint32_t>(i)};
    return pts;
}

ParameterVector random_params(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> coef(0.01, 2.0), expo(0.0, 3.0), v(0.5, 2.0), zeta(0.25, 2.0);
    std::uniform_int_distribution<int> omega(1, 30);
    ParameterVector p;
    for (std::size_t i = 0; i < 10; ++i)
        p.alpha[i] = i % 2 == 0 ? coef(rng) : expo(rng);
    p.v = v(rng);
    p.omega = omega(rng);
    p.zeta = zeta(rng);
    return p;
}

double brute_delta(const LaserPoint& r, const LaserPoint& c, const ParameterVector& p)
{
    const auto& a = p.alpha;
    const double dist = std::sqrt((r.x - c.x) * (r.x - c.x) + (r.y - c.y) * (r.y - c.y));
    return a[0] * std::pow(std::fabs(r.z - c.z), a[1]) - a[2] * std::pow(std::fabs(r.tau - c.tau), a[3]) -
           a[4] * std::pow(dist, a[5]) -
           (a[6] * std::pow(std::fabs(r.roll_rate), a[7]) + a[6] * std::pow(std::fabs(c.roll_rate), a[7])) -
           (a[8] * std::pow(std::fabs(r.pitch_rate), a[9]) + a[8] * std::pow(std::fabs(c.pitch_rate), a[9]));
}

double brute_wheel(const std::vector<LaserPoint>& pts, const ParameterVector& p)
{
    std::vector<double> all;
    for (std::size_t r = 0; r < pts.size(); ++r)
        for (std::size_t c = 0; c < pts.size(); ++c)
            if (r < c)
                all.push_back(brute_delta(pts[r], pts[c], p));
    std::sort(all.begin(), all.end());
    const std::size_t keep = std::min<std::size_t>(all.size(), static_cast<std::size_t>(p.omega));
    std::vector<double> w(all.end() - static_cast<std::ptrdiff_t>(keep), all.end());
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        total += w[i] * std::pow(p.v, static_cast<double>(i));
    return std::max(total, 0.0);
}

ThresholdChoice exhaustive_threshold(const std::vector<double>& scores, const std::vector<char>& positive,
                                     double lambda)
{
    std::vector<double> candidates = scores;
    candidates.push_back(threshold_above(*std::max_element(scores.begin(), scores.end())));
    std::sort(candidates.begin(), candidates.end(), std::greater<>());
    ThresholdChoice best;
    bool have = false;
    for (double mu : candidates) {
        std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const bool flagged = scores[i] > mu;
            if (positive[i])
                (flagged ? tp : fn)++;
            else
                (flagged ? fp : tn)++;
        }
        const auto rates = ClassificationRates::from_counts(tp, fp, tn, fn);
        const double obj = objective(rates, lambda);
        if (!have || obj > best.objective) {
            best = {mu, rates, obj};
            have = true;
        }
    }
    return best;
}

double response_db(const std::vector<double>& taps, double f, double fs)
{
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < taps.size(); ++n)
        acc += taps[n] * std::polar(1.0, -2.0 * std::numbers::pi * f / fs * static_cast<double>(n));
    return 20.0 * std::log10(std::max(std::abs(acc), 1e-300));
}

// ---- CLI helpers ---------------------------------------------------------

struct Cli {
    fs::path log_file;

    bool run(const std::string& args) const
    {
        const std::string cmd = std::string("'") + ROUGHNESS_CLI + "' " + args + " >> '" + log_file.string() + "' 2>&1";
        return std::system(cmd.c_str()) == 0;
    }
};

nlohmann::json read_json(const fs::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw std::runtime_error("cannot open " + file.string());
    return nlohmann::json::parse(in);
}

std::string slurp(const fs::path& file)
{
    std::ifstream in(file, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---- criteria ------------------------------------------------------------

Outcome scoring_oracle()
{
    const auto start = Clock::now();
    std::mt19937_64 rng(9001);
    std::uniform_int_distribution<std::size_t> count(2, 12);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto left = random_points(rng, count(rng));
        const auto right = random_points(rng, count(rng));
        const ParameterVector p = random_params(rng);
        const double expect = std::pow(brute_wheel(left, p), p.zeta) + std::pow(brute_wheel(right, p), p.zeta);
        const double got = score_patch(left, right, p).r_combined;
        worst = std::max(worst, std::abs(got - expect) / std::max(1.0, std::abs(expect)));
    }
    const double t = seconds_since(start);
    return {worst <= 1e-9 && t < 1.0, "max rel error " + fmt(worst) + ", " + fmt(t) + " s"};
}

Outcome delta_properties()
{
    std::mt19937_64 rng(9002);
    std::size_t asymmetric = 0, nonzero_self = 0;
    for (int i = 0; i < 10000; ++i) {
        const ParameterVector p = random_params(rng);
        auto pts = random_points(rng, 2);
        if (delta(pts[0], pts[1], p) != delta(pts[1], pts[0], p))
            ++asymmetric;
        pts[0].roll_rate = 0.0;
        pts[0].pitch_rate = 0.0;
        if (delta(pts[0], pts[0], p) != 0.0)
            ++nonzero_self;
    }
    return {asymmetric == 0 && nonzero_self == 0,
            std::to_string(asymmetric) + " asymmetric pairs, " + std::to_string(nonzero_self) +
                " nonzero self-scores over 10000"};
}

Outcome threshold_oracle()
{
    const auto start = Clock::now();
    std::mt19937_64 rng(9003);
    std::uniform_int_distribution<std::size_t> size(2, 200), count(2, 10);
    std::bernoulli_distribution rugged(0.2);
    const TrainingConfig config;
    int mismatches = 0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<PatchSample> data(size(rng));
        for (PatchSample& s : data) {
            s.left_points = random_points(rng, count(rng));
            s.right_points = random_points(rng, count(rng));
            s.ruggedness_label = rugged(rng) ? 0.03 : 0.0;
        }
        data[0].ruggedness_label = 0.05;
        data[1].ruggedness_label = 0.0;
        const ParameterVector p = random_params(rng);
        std::vector<double> scores;
        std::vector<char> y;
        for (const PatchSample& s : data) {
            scores.push_back(score_patch(s.left_points, s.right_points, p).r_combined);
            y.push_back(s.ruggedness_label >= config.ruggedness_threshold ? 1 : 0);
        }
        const ThresholdChoice a = evaluate_params(p, data, config);
        const ThresholdChoice b = exhaustive_threshold(scores, y, config.lambda);
        if (a.mu != b.mu || !(a.rates == b.rates) || a.objective != b.objective)
            ++mismatches;
    }
    const double t = seconds_since(start);
    return {mismatches == 0 && t < 5.0, std::to_string(mismatches) + " mismatches over 50 datasets, " + fmt(t) + " s"};
}

Outcome ascent_monotonicity(const fs::path& course_a, const fs::path& train_dir)
{
    std::ifstream in(train_dir / "progress.tsv");
    std::string line;
    std::getline(in, line);
    std::vector<double> objectives;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string round, coordinate, sign, objective_text;
        row >> round >> coordinate >> sign >> objective_text;
        objectives.push_back(std::stod(objective_text));
    }
    bool increasing = !objectives.empty();
    for (std::size_t i = 1; i < objectives.size(); ++i)
        increasing = increasing && objectives[i] > objectives[i - 1];

    const fs::path config_file = train_dir / "config.json";
    const PipelineConfig config = load_config(&config_file, {});
    std::ifstream model_in(train_dir / "model.txt");
    const ClassifierModel model = read_model(model_in);
    const SensorLog log = read_sensor_log(course_a);
    const LabeledLog labeled = label_log(log, config);
    const auto samples = samples_of(labeled.patches);
    const TrainingSet set(samples, config.training.ruggedness_threshold);
    const ThresholdChoice again = evaluate_params(model.params, set, config.training.lambda);
    const bool rederived = again.mu == model.mu && !objectives.empty() && again.objective == objectives.back();
    return {increasing && rederived, std::to_string(objectives.size()) + " accepted objectives " +
                                         (increasing ? "strictly increasing" : "NOT increasing") + ", final mu " +
                                         (rederived ? "re-derived exactly" : "differs")};
}

Outcome filter_contract()
{
    const FilterSpec spec = design_highpass(100.0, LabelingConfig{}.cutoff_hz, 40);
    double dc = response_db(spec.taps, 0.0, 100.0), stop = -1e9, pass = 1e9;
    for (double f = 0.0; f <= 5.0 + 1e-12; f += 0.01)
        stop = std::max(stop, response_db(spec.taps, f, 100.0));
    for (double f = 20.0; f <= 50.0 + 1e-12; f += 0.01)
        pass = std::min(pass, response_db(spec.taps, f, 100.0));
    return {spec.taps.size() == 40 && dc <= -60.0 && stop <= -40.0 && pass >= -3.0,
            "H(0) " + fmt(dc) + " dB, max <=5 Hz " + fmt(stop) + " dB, min >=20 Hz " + fmt(pass) + " dB"};
}

Outcome speed_normalization()
{
    std::vector<double> r;
    for (double mph : {5.0, 15.0, 25.0, 35.0}) {
        TerrainProfile t;
        t.track_length = 70.0;
        t.bumps.push_back({40.0, 0.3, 0.08, 0.2, 1.5});
        SimConfig c;
        c.speed = {mph, 0.0, 1500.0, 0.0};
        const LabelRun run = extract_log_events(simulate_traversal(t, c), LabelingConfig{});
        double best = 0.0;
        for (const ShockEvent& e : run.events.events)
            best = std::max(best, e.ruggedness);
        r.push_back(best);
    }
    const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
    const double ratio = *lo > 0.0 ? *hi / *lo : INFINITY;
    return {ratio <= 1.10, "max/min ruggedness " + fmt(ratio) + " over 5, 15, 25, 35 mph"};
}

Outcome pose_error_model()
{
    TerrainProfile t;
    t.track_length = 1000.0;
    SimConfig c;
    c.speed = {25.0, 0.0, 1500.0, 0.0};
    c.seed = 17;
    const SensorLog log = simulate_traversal(t, c);
    const ScanDrift d = center_beam_drift(log, 37, 5);
    const LinearFit fit = fit_line(d.dt, d.dz);
    const double rate = c.pose_error.z_error_rate;
    const bool ok = d.dt.size() >= 500 && fit.r_squared >= 0.8 && std::abs(fit.slope - rate) <= 0.15 * rate;
    return {ok, "R^2 " + fmt(fit.r_squared) + ", slope " + fmt(fit.slope) + " m/s vs " + fmt(rate) + ", " +
                    std::to_string(d.dt.size()) + " scan pairs"};
}

struct PipelineRun {
    bool ok = false;
    double seconds = 0.0;
};

PipelineRun end_to_end(const Cli& cli, const fs::path& w)
{
    const auto start = Clock::now();
    const std::string a = (w / "A").string(), b = (w / "B").string();
    const std::string model = (w / "train" / "model.txt").string();
    const bool ok = cli.run("simulate --seed 11 --out '" + a + "'") &&
                    cli.run("simulate --seed 12 --out '" + b + "'") &&
                    cli.run("train --log '" + a + "' --out '" + (w / "train").string() + "'") &&
                    cli.run("eval --model '" + model + "' --log '" + b + "' --train-log '" + a + "' --out '" +
                            (w / "eval").string() + "'") &&
                    cli.run("speedsim --model '" + model + "' --log '" + b + "' --out '" + (w / "speed").string() + "'");
    return {ok, seconds_since(start)};
}

Outcome end_to_end_learning(const fs::path& w, const PipelineRun& run)
{
    const auto train = read_json(w / "train" / "summary.json");
    const auto test = read_json(w / "eval" / "summary.json").at("test");
    const double rate = train.at("positives").get<double>() / train.at("patches").get<double>();
    const double auc = test.at("auc").get<double>();
    const double tp = test.at("tp_at_fp_0.05").get<double>();
    // "about half a percent": accepted within a factor of two
    const bool rate_ok = rate >= 0.0025 && rate <= 0.01;
    return {rate_ok && auc >= 0.90 && tp >= 0.6 && run.seconds < 600.0,
            "course A positive rate " + fmt(100.0 * rate) + "%, test AUC " + fmt(auc) + ", tp_rate " + fmt(tp) +
                " at fp_rate <= 0.05, pipeline " + fmt(run.seconds) + " s"};
}

Outcome controller_comparison(const fs::path& w)
{
    const auto s = read_json(w / "speed" / "summary.json");
    const auto& op = s.at("model_operating_point");
    const auto matched = op.at("matched_reactive").get<std::size_t>();
    const double reduction = op.at("min_shock_reduction").get<double>();
    const double dominance = s.at("dominance_fraction").get<double>();
    return {matched > 0 && reduction >= 0.25 && dominance >= 0.8,
            "shock " + fmt(100.0 * reduction) + "% lower than each of " + std::to_string(matched) +
                " reactive runs within 2% completion time, dominates " + fmt(100.0 * dominance) +
                "% of swept settings"};
}

Outcome determinism(const Cli& cli, const fs::path& w)
{
    const std::string course = " --set terrain.length=1500 terrain.bump_density=15";
    for (const char* run : {"1", "2"}) {
        const fs::path d = w / run;
        const std::string a = (d / "A").string(), b = (d / "B").string();
        const std::string model = (d / "T" / "model.txt").string();
        const bool ok =
            cli.run("simulate --seed 5 --out '" + a + "'" + course) &&
            cli.run("simulate --seed 6 --out '" + b + "'" + course) &&
            cli.run("label --log '" + a + "' --out '" + (d / "L").string() + "'") &&
            cli.run("train --log '" + a + "' --out '" + (d / "T").string() + "' --set training.iterations=2") &&
            cli.run("eval --model '" + model + "' --log '" + b + "' --train-log '" + a + "' --out '" +
                    (d / "E").string() + "'") &&
            cli.run("speedsim --model '" + model + "' --log '" + b + "' --out '" + (d / "S").string() + "'");
        if (!ok)
            return {false, std::string("a command failed on run ") + run};
    }
    std::size_t files = 0, differing = 0;
    for (const auto& entry : fs::recursive_directory_iterator(w / "1")) {
        if (!entry.is_regular_file())
            continue;
        const fs::path other = w / "2" / fs::relative(entry.path(), w / "1");
        ++files;
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other))
            ++differing;
    }
    return {files > 0 && differing == 0,
            std::to_string(differing) + " of " + std::to_string(files) + " output files differ across reruns"};
}

Outcome guarded(const std::function<Outcome()>& fn)
{
    try {
        return fn();
    } catch (const std::exception& e) {
        return {false, std::string("error: ") + e.what()};
    }
}

}  // namespace

int main(int argc, char** argv)
{
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "roughness_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);
    const Cli cli{work / "commands.log"};

    const fs::path pipeline = work / "pipeline";
    const PipelineRun run = end_to_end(cli, pipeline);
    const auto needs_pipeline = [&](const std::function<Outcome()>& fn) {
        return guarded([&] {
            if (!run.ok)
                return Outcome{false, "pipeline command failed, see " + cli.log_file.string()};
            return fn();
        });
    };

    const std::vector<std::pair<const char*, Outcome>> results{
        {"scoring matches brute-force oracle", guarded(scoring_oracle)},
        {"pair score symmetry and self-zero", guarded(delta_properties)},
        {"threshold search matches exhaustive scan", guarded(threshold_oracle)},
        {"coordinate ascent monotone with exact final mu",
         needs_pipeline([&] { return ascent_monotonicity(pipeline / "A", pipeline / "train"); })},
        {"high-pass filter frequency contract", guarded(filter_contract)},
        {"ruggedness independent of speed", guarded(speed_normalization)},
        {"pose error grows linearly with scan separation", guarded(pose_error_model)},
        {"end-to-end learning on disjoint courses", needs_pipeline([&] { return end_to_end_learning(pipeline, run); })},
        {"proactive beats reactive control", needs_pipeline([&] { return controller_comparison(pipeline); })},
        {"reruns are byte-identical", guarded([&] { return determinism(cli, work / "determinism"); })},
    };

    bool all = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& [name, outcome] = results[i];
        all = all && outcome.pass;
        std::cout << (outcome.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << name << ": " << outcome.detail
                  << "\n";
    }
    return all ? 0 : 1;
}
