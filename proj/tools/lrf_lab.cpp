// lrf-lab: batch experiment runner and verification entry point for the
// slate-ranking laboratory. Subcommands: run, oracle-check, eval, plot.

#include "lrf/config.hpp"
#include "lrf/oracle_check.hpp"
#include "lrf/plot.hpp"
#include "lrf/trajectory_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

namespace fs = std::filesystem;
using namespace lrf;

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed_override,
            std::optional<std::string> out_override) {
    ExperimentConfig cfg = load_experiment_config(config_path);
    if (seed_override) cfg.train.seed = *seed_override;
    if (out_override) cfg.output_dir = *out_override;
    if (cfg.output_dir.empty()) cfg.output_dir = "out/run";

    const GroundTruth gt = init_world(cfg.world);
    const TrainResult result =
        cfg.world.reward_dim >= 2 ? run_algorithm2(gt, cfg) : run_algorithm1(gt, cfg);

    fs::create_directories(cfg.output_dir);
    {
        std::ofstream metrics(cfg.output_dir + "/metrics.csv");
        result.metrics.write_csv(metrics);
        if (!metrics) throw std::runtime_error("failed writing metrics CSV");
    }
    {
        std::ofstream snap(cfg.output_dir + "/snapshot.bin", std::ios::binary);
        save_snapshot(snap, result.snapshot.params, result.snapshot.weights.vec(),
                      result.snapshot.epsilon, result.snapshot.rule);
    }
    {
        std::ofstream manifest(cfg.output_dir + "/run_manifest.json");
        manifest << run_manifest_json(cfg) << '\n';
    }
    if (cfg.log_trajectories) {
        std::ofstream log(cfg.output_dir + "/trajectories.jsonl");
        write_trajectory_log(log, result.buffer_trajectories);
    }
    std::cout << "run complete: " << cfg.iterations << " iterations, outputs in " << cfg.output_dir
              << "\n";
    return 0;
}

int cmd_oracle_check(int cases, std::uint64_t seed, const std::string& replay_path,
                     bool inject_score_bug) {
    const ScoreRule rule = inject_score_bug ? ScoreRule::ctr_lift : ScoreRule::cascade_lift;

    if (!replay_path.empty()) {
        std::ifstream in(replay_path);
        if (!in) throw ValidationError("cannot open replay file: " + replay_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        const OracleInstance inst = instance_from_json(buf.str());
        double gap = 0.0;
        const bool ok = check_instance(inst, rule, 1e-9, &gap);
        std::printf("replayed instance: %s (optimality gap %.3e)\n", ok ? "pass" : "FAIL", gap);
        return ok ? 0 : 1;
    }

    const OracleSuiteResult result = run_oracle_suite(cases, seed, rule);
    std::printf("ranking-vs-enumeration: %d/%d passed\n",
                result.ranking_cases - result.ranking_failures, result.ranking_cases);
    std::printf("cascade normalization:  %d/%d passed\n",
                result.normalization_cases - result.normalization_failures,
                result.normalization_cases);
    if (!result.ok()) {
        if (!result.first_failure_json.empty()) {
            std::printf("first failing instance (save and re-run with --replay):\n%s\n",
                        result.first_failure_json.c_str());
        }
        return 1;
    }
    return 0;
}

int cmd_eval(const std::string& snapshot_path, const std::string& config_path, int trajectories) {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    std::ifstream in(snapshot_path, std::ios::binary);
    if (!in) throw ValidationError("cannot open snapshot file: " + snapshot_path);
    const Snapshot snap = load_snapshot(in);

    const GroundTruth gt = init_world(cfg.world);
    const int expected_hidden =
        cfg.arch_change ? cfg.arch_change->hidden_width : cfg.model.hidden_width;
    const ModelConfig& mc = snap.params.cfg;
    if (mc.user_dim != gt.user_dim() || mc.item_dim != gt.item_dim() ||
        mc.reward_dim != cfg.world.reward_dim || mc.hidden_width != expected_hidden ||
        mc.mode != cfg.model.mode)
        throw ValidationError("snapshot architecture descriptor does not match the config");

    PolicySnapshot policy{snap.params, WeightVector(snap.weights), snap.epsilon, snap.rule};
    RandomStream rng(cfg.train.seed ^ 0xE7A1u);
    const PolicyEvaluation eval = evaluate_policy(gt, policy, trajectories, cfg.horizon, rng);

    const std::string out_dir = cfg.output_dir.empty() ? "." : cfg.output_dir;
    fs::create_directories(out_dir);
    std::ofstream csv(out_dir + "/eval.csv");
    csv << "objective,surface,mean,se\n";
    for (int k = 0; k < cfg.world.reward_dim; ++k) {
        std::printf("J_%d platform:   %.6f +/- %.6f\n", k + 1, eval.platform_mean[k],
                    eval.platform_se[k]);
        std::printf("J_%d on-surface: %.6f +/- %.6f\n", k + 1, eval.onsurface_mean[k],
                    eval.onsurface_se[k]);
        char line[160];
        std::snprintf(line, sizeof(line), "%d,platform,%.12g,%.12g\n", k + 1, eval.platform_mean[k],
                      eval.platform_se[k]);
        csv << line;
        std::snprintf(line, sizeof(line), "%d,on_surface,%.12g,%.12g\n", k + 1,
                      eval.onsurface_mean[k], eval.onsurface_se[k]);
        csv << line;
    }
    return 0;
}

int cmd_plot(const std::string& metrics_path, const std::string& out_dir) {
    const MetricsTable table = read_metrics_csv(metrics_path);
    const auto written = plot_metrics(table, out_dir);
    std::printf("wrote %zu chart(s) to %s\n", written.size(), out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"slate-ranking laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir, snapshot_path, metrics_path, replay_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_override;
    int cases = 1000;
    std::uint64_t oracle_seed = 7;
    int trajectories = 200;
    bool inject_score_bug = false;

    auto* run = app.add_subcommand("run", "run a training experiment from a config file");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--seed", seed_override, "override the training seed");
    run->add_option("--out", out_override, "override the output directory");

    auto* oracle = app.add_subcommand(
        "oracle-check", "check the ranking rule against exhaustive permutation enumeration");
    oracle->add_option("--cases", cases, "number of random instances");
    oracle->add_option("--seed", oracle_seed, "random seed");
    oracle->add_option("--replay", replay_path, "re-run one serialized failing instance");
    oracle->add_flag("--inject-score-bug", inject_score_bug, "")->group("");  // test harness hook

    auto* eval = app.add_subcommand("eval", "evaluate a saved policy snapshot");
    eval->add_option("--snapshot", snapshot_path, "snapshot file")->required();
    eval->add_option("--config", config_path, "experiment config (JSON)")->required();
    eval->add_option("--trajectories", trajectories, "Monte Carlo sample size");

    auto* plot = app.add_subcommand("plot", "render metric curves from a metrics CSV");
    plot->add_option("--metrics", metrics_path, "metrics CSV file")->required();
    plot->add_option("--out", out_dir, "output directory for SVG files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, seed_override, out_override);
        if (oracle->parsed()) return cmd_oracle_check(cases, oracle_seed, replay_path, inject_score_bug);
        if (eval->parsed()) return cmd_eval(snapshot_path, config_path, trajectories);
        if (plot->parsed()) return cmd_plot(metrics_path, out_dir);
    } catch (const lrf::ValidationError& e) {
        std::fprintf(stderr, "config/usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
