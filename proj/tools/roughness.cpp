// Command-line front end: simulate, label, train, eval, speedsim.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "roughness/config.hpp"
#include "roughness/errors.hpp"
#include "roughness/evaluation.hpp"
#include "roughness/labeling.hpp"
#include "roughness/pipeline.hpp"
#include "roughness/scoring.hpp"
#include "roughness/sensor_log_io.hpp"
#include "roughness/simworld.hpp"
#include "roughness/training.hpp"

namespace fs = std::filesystem;
using namespace roughness;
using nlohmann::json;

namespace {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kSchema = 3,
    kData = 4,
    kConfig = 5,
};

struct Common {
    std::string config_file;
    std::vector<std::string> overrides;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config_file, "JSON config document");
    cmd->add_option("--set", c.overrides, "Override a config value, e.g. --set sim.seed=7")->take_all();
    cmd->add_option("--out", c.out, "Output directory")->required();
}

PipelineConfig resolve(const Common& c)
{
    const fs::path file(c.config_file);
    return load_config(c.config_file.empty() ? nullptr : &file, c.overrides);
}

fs::path prepare_out(const Common& c, const PipelineConfig& config)
{
    const fs::path out(c.out);
    fs::create_directories(out);
    write_config(out / "config.json", config);
    return out;
}

void write_json(const fs::path& file, const json& doc)
{
    std::ofstream out(file);
    if (!out)
        throw DataError("cannot write " + file.string());
    out << doc.dump(2) << '\n';
}

std::ofstream open_out(const fs::path& file)
{
    std::ofstream out(file);
    if (!out)
        throw DataError("cannot write " + file.string());
    return out;
}

// Peak of the filtered response to a unit strike doublet [+1, -1].
double strike_gain(const FilterSpec& spec)
{
    double g = std::abs(spec.taps.front());
    for (std::size_t i = 1; i < spec.taps.size(); ++i)
        g = std::max(g, std::abs(spec.taps[i] - spec.taps[i - 1]));
    return std::max(g, std::abs(spec.taps.back()));
}

SensorLog load_log(const std::string& dir)
{
    if (dir.empty())
        throw UsageError("--log is required");
    return read_sensor_log(dir);
}

// Learned model from a file, or nullopt for the oracle.
std::optional<ClassifierModel> load_model(const std::string& spec)
{
    if (spec == "oracle")
        return std::nullopt;
    std::ifstream in(spec);
    if (!in)
        throw UsageError("cannot open model file " + spec);
    return read_model(in);
}

int cmd_simulate(const Common& c, std::optional<std::uint64_t> seed)
{
    PipelineConfig config = resolve(c);
    if (seed)
        config.sim.seed = *seed;
    config.validate();
    const fs::path out = prepare_out(c, config);

    const TerrainProfile terrain = generate_terrain(config.sim.seed, config.terrain);
    const SensorLog log = simulate_traversal(terrain, config.sim);
    const FilterSpec spec = design_highpass(config.sim.pose_rate, config.labeling.cutoff_hz, config.labeling.taps);
    const double rate =
        ground_truth_positive_rate(terrain, config.sim, config.patches.patch_length,
                                   config.labeling.association_radius, config.training.ruggedness_threshold,
                                   strike_gain(spec));
    const json extra = {{"seed", config.sim.seed},
                        {"config_hash", config_hash(config)},
                        {"positive_label_rate", rate}};
    write_sensor_log(out, log, extra);
    std::cout << "simulated " << log.end_s << " m, " << terrain.bumps.size() << " bumps, " << log.scans.size()
              << " scans; ground-truth positive rate " << rate << '\n';
    return kOk;
}

int cmd_label(const Common& c, const std::string& log_dir)
{
    const PipelineConfig config = resolve(c);
    const SensorLog log = load_log(log_dir);
    const fs::path out = prepare_out(c, config);
    const LabeledLog labeled = label_log(log, config);

    {
        std::ofstream f = open_out(out / "events.tsv");
        f << "t_peak\tpeak_accel\tspeed\truggedness\tlocation\n";
        char buf[160];
        for (const ShockEvent& e : labeled.labels.events.events) {
            std::snprintf(buf, sizeof buf, "%.17g\t%.17g\t%.17g\t%.17g\t%.17g\n", e.t_peak, e.peak_accel, e.speed,
                          e.ruggedness, e.location);
            f << buf;
        }
    }
    std::size_t scorable = 0, positives = 0;
    {
        std::ofstream f = open_out(out / "patches.tsv");
        f << "location\truggedness_label\tleft_points\tright_points\tacquired_time\n";
        char buf[160];
        for (const Patch& p : labeled.patches) {
            std::snprintf(buf, sizeof buf, "%.17g\t%.17g\t%zu\t%zu\t%.17g\n", p.sample.location,
                          p.sample.ruggedness_label, p.sample.left_points.size(), p.sample.right_points.size(),
                          p.acquired_time);
            f << buf;
            if (p.sample.scorable()) {
                ++scorable;
                positives += p.sample.ruggedness_label >= config.training.ruggedness_threshold ? 1 : 0;
            }
        }
    }
    const double rate = scorable > 0 ? static_cast<double>(positives) / static_cast<double>(scorable) : 0.0;
    write_json(out / "summary.json", {{"config_hash", config_hash(config)},
                                      {"patches", labeled.patches.size()},
                                      {"scorable_patches", scorable},
                                      {"positive_patches", positives},
                                      {"positive_rate", rate},
                                      {"events", labeled.labels.events.events.size()},
                                      {"discarded_events", labeled.labels.events.discarded}});
    std::cout << labeled.patches.size() << " patches (" << scorable << " scorable), " << positives
              << " positive, " << labeled.labels.events.events.size() << " events\n";
    return kOk;
}

int cmd_train(const Common& c, const std::string& log_dir)
{
    const PipelineConfig config = resolve(c);
    const SensorLog log = load_log(log_dir);
    const fs::path out = prepare_out(c, config);
    const LabeledLog labeled = label_log(log, config);
    const std::vector<PatchSample> samples = samples_of(labeled.patches);
    const TrainingSet dataset(samples, config.training.ruggedness_threshold);
    const TrainingResult result = coordinate_ascent(dataset, config.training);

    {
        std::ofstream f = open_out(out / "model.txt");
        write_model(f, result.model);
    }
    {
        std::ofstream f = open_out(out / "progress.tsv");
        write_progress(f, result.progress);
    }
    const ClassificationRates& r = result.final_choice.rates;
    write_json(out / "summary.json", {{"config_hash", config_hash(config)},
                                      {"objective", result.final_choice.objective},
                                      {"mu", result.model.mu},
                                      {"tp_rate", r.tp_rate},
                                      {"fp_rate", r.fp_rate},
                                      {"patches", dataset.size()},
                                      {"positives", dataset.positives()},
                                      {"dropped_unscorable", dataset.dropped()},
                                      {"evaluations", result.evaluations},
                                      {"skipped_invalid", result.skipped_invalid},
                                      {"accepted_steps", result.progress.size() - 1}});
    std::cout << "objective " << result.final_choice.objective << " (tp " << r.tp_rate << ", fp " << r.fp_rate
              << ") after " << result.evaluations << " evaluations\n";
    return kOk;
}

json evaluate_one(const fs::path& out, const std::string& tag, const SensorLog& log, const PipelineConfig& config,
                  const std::optional<ClassifierModel>& model)
{
    const LabeledLog labeled = label_log(log, config);
    const PatchScores scores =
        score_patches(labeled.patches, model ? &*model : nullptr, config.training.ruggedness_threshold);
    const RocCurve learned = roc_curve(scores.model, scores.positive);
    const RocCurve naive = roc_curve(scores.naive, scores.positive);
    {
        std::ofstream f = open_out(out / ("roc_" + tag + ".tsv"));
        write_roc(f, learned);
    }
    {
        std::ofstream f = open_out(out / ("roc_baseline_" + tag + ".tsv"));
        write_roc(f, naive);
    }
    {
        std::ofstream f = open_out(out / ("scores_" + tag + ".tsv"));
        f << "location\tscore\tbaseline_score\tpositive\n";
        char buf[128];
        for (std::size_t i = 0; i < scores.index.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g\t%.17g\t%.17g\t%d\n",
                          labeled.patches[scores.index[i]].sample.location, scores.model[i], scores.naive[i],
                          static_cast<int>(scores.positive[i]));
            f << buf;
        }
    }

    // Learned versus naive on a fixed false-positive grid.
    json grid = json::array();
    bool at_least_naive = true;
    for (int i = 0; i <= 20; ++i) {
        const double fp = config.evaluation.fp_grid_max * i / 20.0;
        const double a = tp_at_fp(learned, fp);
        const double b = tp_at_fp(naive, fp);
        at_least_naive = at_least_naive && a >= b;
        grid.push_back({{"fp_rate", fp}, {"tp_rate", a}, {"baseline_tp_rate", b}});
    }
    std::size_t positives = 0;
    for (char p : scores.positive)
        positives += p ? 1 : 0;
    return {{"auc", learned.auc},
            {"baseline_auc", naive.auc},
            {"tp_at_fp_0.05", tp_at_fp(learned, 0.05)},
            {"baseline_tp_at_fp_0.05", tp_at_fp(naive, 0.05)},
            {"patches", scores.model.size()},
            {"positives", positives},
            {"learned_at_least_baseline", at_least_naive},
            {"grid", grid}};
}

int cmd_eval(const Common& c, const std::string& model_spec, const std::string& log_dir,
             const std::string& train_log_dir)
{
    const PipelineConfig config = resolve(c);
    const std::optional<ClassifierModel> model = load_model(model_spec);
    const SensorLog test = load_log(log_dir);
    const fs::path out = prepare_out(c, config);

    json summary = {{"config_hash", config_hash(config)}, {"model", model ? "learned" : "oracle"}};
    summary["test"] = evaluate_one(out, "test", test, config, model);
    if (!train_log_dir.empty())
        summary["train"] = evaluate_one(out, "train", read_sensor_log(train_log_dir), config, model);
    write_json(out / "summary.json", summary);
    std::cout << "test AUC " << summary["test"]["auc"].get<double>();
    if (summary.contains("train"))
        std::cout << ", train AUC " << summary["train"]["auc"].get<double>();
    std::cout << '\n';
    return kOk;
}

int cmd_speedsim(const Common& c, const std::string& model_spec, const std::string& log_dir)
{
    const PipelineConfig config = resolve(c);
    const std::optional<ClassifierModel> model = load_model(model_spec);
    const SensorLog log = load_log(log_dir);
    const fs::path out = prepare_out(c, config);
    const EvaluationConfig& ev = config.evaluation;

    const LabeledLog labeled = label_log(log, config);
    const double threshold = config.training.ruggedness_threshold;
    const PatchScores scored = score_patches(labeled.patches, model ? &*model : nullptr, threshold);
    std::vector<double> all_scores(labeled.patches.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < scored.index.size(); ++i)
        all_scores[scored.index[i]] = scored.model[i];
    // The oracle flags exactly the positive labels.
    const double own_mu = model ? model->mu : std::nextafter(threshold, -std::numeric_limits<double>::infinity());

    ControllerSettings settings;
    settings.slow_speed = ev.slow_speed;
    settings.recovery_rate = ev.recovery_rate;
    settings.labeling = config.labeling;

    const RunResult baseline = unmodified_run(log, settings);
    const std::vector<TradeoffPoint> reactive = tradeoff_curve(baseline, ev.reactive_triggers, [&](double trigger) {
        return reactive_controller(log, trigger, settings);
    });
    std::vector<double> mus = proactive_sweep(scored.model, ev.proactive_settings);
    mus.push_back(own_mu);
    const double plen = config.patches.patch_length;
    const std::vector<TradeoffPoint> proactive = tradeoff_curve(baseline, mus, [&](double mu) {
        const std::vector<Forecast> f = forecasts_from_scores(labeled.patches, all_scores, mu, plen);
        return proactive_controller(log, f, ev.lookahead, settings);
    });
    const Comparison cmp = compare_tradeoffs(reactive, proactive, ev.match_tolerance);

    {
        std::ofstream f = open_out(out / "reactive.tsv");
        write_tradeoff(f, reactive);
    }
    {
        std::ofstream f = open_out(out / "proactive.tsv");
        write_tradeoff(f, proactive);
    }
    json pairs = json::array();
    for (const MatchedPair& p : cmp.pairs)
        pairs.push_back({{"reactive_time", p.reactive_time},
                         {"reactive_shock", p.reactive_shock},
                         {"proactive_shock", p.proactive_shock},
                         {"reduction", p.reduction},
                         {"matched", p.matched}});
    const TradeoffPoint& own = proactive.back();
    const OperatingPointComparison at_own = compare_operating_point(own, reactive, ev.match_tolerance);
    write_json(out / "summary.json", {{"config_hash", config_hash(config)},
                                      {"model", model ? "learned" : "oracle"},
                                      {"baseline_time", baseline.completion_time},
                                      {"baseline_shock", baseline.total_shock},
                                      {"model_operating_point",
                                       {{"completion_time", own.completion_time},
                                        {"total_shock", own.total_shock},
                                        {"matched_reactive", at_own.matched},
                                        {"min_shock_reduction", at_own.min_reduction},
                                        {"mean_shock_reduction", at_own.mean_reduction}}},
                                      {"reactive_settings_modifying_speed", cmp.pairs.size()},
                                      {"matched", cmp.matched},
                                      {"dominated", cmp.dominated},
                                      {"dominance_fraction", cmp.dominance_fraction},
                                      {"mean_shock_reduction", cmp.mean_reduction},
                                      {"pairs", pairs}});
    std::cout << "model operating point: shock " << own.total_shock << " at time " << own.completion_time << ", "
              << at_own.min_reduction << " lower than " << at_own.matched << " matched reactive runs\n";
    std::cout << "mean shock reduction along the front " << cmp.mean_reduction << ", proactive dominates "
              << cmp.dominated << "/" << cmp.pairs.size() << " reactive settings\n";
    return kOk;
}

int run(int argc, char** argv)
{
    CLI::App app{"Terrain roughness estimation from laser data with IMU-derived labels"};
    app.require_subcommand(1);

    Common sim_c, label_c, train_c, eval_c, speed_c;
    std::optional<std::uint64_t> seed;
    std::string label_log, train_log, eval_log, eval_train_log, eval_model, speed_log, speed_model;

    CLI::App* sim = app.add_subcommand("simulate", "Generate a course and write its sensor log directory");
    add_common(sim, sim_c);
    sim->add_option("--seed", seed, "Seed (overrides sim.seed)");

    CLI::App* label = app.add_subcommand("label", "Extract shock events and label terrain patches");
    add_common(label, label_c);
    label->add_option("--log", label_log, "Sensor log directory")->required();

    CLI::App* train = app.add_subcommand("train", "Fit the classifier by coordinate ascent");
    add_common(train, train_c);
    train->add_option("--log", train_log, "Training sensor log directory")->required();

    CLI::App* eval = app.add_subcommand("eval", "ROC of a model against the naive baseline");
    add_common(eval, eval_c);
    eval->add_option("--model", eval_model, "Model file, or 'oracle'")->required();
    eval->add_option("--log", eval_log, "Test sensor log directory")->required();
    eval->add_option("--train-log", eval_train_log, "Also report on this training log");

    CLI::App* speed = app.add_subcommand("speedsim", "Compare reactive and proactive speed control");
    add_common(speed, speed_c);
    speed->add_option("--model", speed_model, "Model file, or 'oracle'")->required();
    speed->add_option("--log", speed_log, "Sensor log directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(sim_c, seed);
        if (label->parsed())
            return cmd_label(label_c, label_log);
        if (train->parsed())
            return cmd_train(train_c, train_log);
        if (eval->parsed())
            return cmd_eval(eval_c, eval_model, eval_log, eval_train_log);
        if (speed->parsed())
            return cmd_speedsim(speed_c, speed_model, speed_log);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.kind()) {
        case ErrorKind::usage:
            return kUsage;
        case ErrorKind::schema:
            return kSchema;
        case ErrorKind::data:
            return kData;
        case ErrorKind::config:
            return kConfig;
        }
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
    return kUsage;
}

}  // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}
