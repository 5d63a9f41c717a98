#pragma once

#include "lrf/constraint.hpp"
#include "lrf/domain.hpp"
#include "lrf/model.hpp"
#include "lrf/ranker.hpp"
#include "lrf/simulator.hpp"
#include "lrf/types.hpp"
#include "lrf/weights.hpp"

#include <deque>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lrf {

/// FIFO trajectory store sizing: at most `capacity` trajectories are kept,
/// `k` fresh ones arrive per iteration.
struct BufferConfig {
    int capacity = 100;
    int k = 20;
};

void validate(const BufferConfig& cfg);

struct BufferedTrajectory {
    int iteration = 0;  // which snapshot produced it
    Trajectory traj;
    std::vector<RewardVector> returns;  // Monte Carlo return per step
};

/// Whole-trajectory FIFO buffer; oldest trajectories are evicted first, so
/// buffered data never outlives ceil(capacity / k) snapshot refreshes.
class TrajectoryBuffer {
public:
    explicit TrajectoryBuffer(const BufferConfig& cfg, const DiscountConfig& discount);

    void push(int iteration, Trajectory traj);

    std::size_t size() const { return items_.size(); }
    const std::deque<BufferedTrajectory>& items() const { return items_; }
    std::vector<const Trajectory*> trajectories() const;

    /// Flat minibatch-sampling view. When exclude_promoted_from_click is set,
    /// exploration-promoted impressions are left out of the click-loss pool
    /// (they remain in the reward pools).
    TrainingSet training_view(bool exclude_promoted_from_click = false) const;

private:
    BufferConfig cfg_;
    DiscountConfig discount_;
    std::deque<BufferedTrajectory> items_;
};

/// Everything serving needs: parameters, scalarization weights, exploration
/// rate, and the score rule. Immutable; each iteration produces a fresh one.
struct PolicySnapshot {
    ModelParams params;
    WeightVector weights;
    double epsilon = 0.0;
    ScoreRule rule = ScoreRule::cascade_lift;
};

/// Policy that ranks with the snapshot's score rule and explores with its
/// epsilon.
SlatePolicy serving_policy(const PolicySnapshot& snapshot);
/// Same ranking with exploration disabled.
SlatePolicy greedy_policy(const PolicySnapshot& snapshot);

/// Model knobs that are configuration rather than derived from the world.
struct ModelSettings {
    int hidden_width = 32;
    LiftMode mode = LiftMode::lift_direct;
    bool joint_lift_grad = false;
};

struct ArchChange {
    int iteration = 0;
    int hidden_width = 64;
};

/// One batch experiment, fully specified.
struct ExperimentConfig {
    WorldConfig world;
    TrainConfig train;
    BufferConfig buffer;
    ModelSettings model;
    std::optional<ConstraintTargets> targets;
    double epsilon = 0.1;
    int iterations = 20;
    int horizon = 12;
    ScoreRule score_rule = ScoreRule::cascade_lift;
    /// Re-solve scalarization weights every iteration (multi-objective runs).
    bool solve_weights = true;
    /// Hand-set w_2..w_m used when solve_weights is off.
    std::vector<double> fixed_weights;
    std::optional<ArchChange> arch_change;
    /// Exclude exploration-promoted impressions from click-loss batches.
    bool exclude_exploration_clicks = false;
    /// Dump the final buffer contents as a trajectory log next to the
    /// metrics.
    bool log_trajectories = false;
    std::string output_dir;
    std::string preset;
};

void validate(const ExperimentConfig& cfg);

/// Initial scalarization weights of a run (pinned primary; fixed_weights when
/// the solver is off).
WeightVector initial_weights(const ExperimentConfig& cfg);

struct MetricsRow {
    int iteration = 0;
    double loss_abd = 0.0, loss_lift = 0.0, loss_click = 0.0;
    RewardVector j_platform;   // mean discounted return of fresh rollouts
    RewardVector j_onsurface;  // same, counting click rewards only
    Vector weights;            // m entries
    std::vector<double> corr;  // m entries, NaN when undefined
    std::vector<bool> feasible;
    bool solver_ran = false;
};

struct MetricsSeries {
    int m = 1;
    bool constrained = false;  // whether the w/corr columns are present
    std::vector<MetricsRow> rows;

    std::string header() const;
    void write_csv(std::ostream& out) const;
};

struct TrainResult {
    PolicySnapshot snapshot;
    MetricsSeries metrics;
    /// Final buffer contents, kept only when the config asks for a
    /// trajectory log.
    std::vector<Trajectory> buffer_trajectories;
};

/// Test observation points.
struct TrainHooks {
    std::function<void(int iteration, const TrajectoryBuffer&)> on_buffer;
    std::function<void(int iteration, const std::vector<EvalRecord>&, const SolveReport&)> on_weights;
};

/// Single-objective training loop: collect K rollouts under the current
/// snapshot (with exploration), push into the FIFO buffer, run one
/// optimization round, refresh the snapshot. Requires reward_dim == 1.
TrainResult run_algorithm1(const GroundTruth& gt, const ExperimentConfig& cfg,
                           const TrainHooks* hooks = nullptr);

/// Multi-objective loop: algorithm 1 plus per-iteration offline evaluation
/// and weight solving, serving with the weighted score. Requires
/// reward_dim >= 2 and constraint targets.
TrainResult run_algorithm2(const GroundTruth& gt, const ExperimentConfig& cfg,
                           const TrainHooks* hooks = nullptr);

struct PolicyEvaluation {
    RewardVector platform_mean, platform_se;
    RewardVector onsurface_mean, onsurface_se;
    int num_trajectories = 0;
};

/// Monte Carlo estimate of the policy's expected discounted return, with
/// exploration disabled so the deployed ranking is what is measured.
/// Platform-wide and on-surface (click-sourced) returns are reported
/// separately.
PolicyEvaluation evaluate_policy(const GroundTruth& gt, const PolicySnapshot& snapshot,
                                 int num_trajectories, int horizon, RandomStream& rng);

enum class BaselineKind { ctr_only, heuristic_fixed_w, no_lift, two_model, pure_ctr };

BaselineKind baseline_kind_from_string(const std::string& s);
const char* to_string(BaselineKind kind);

/// Serving-time comparison policy built from trained components: ctr_only
/// scores by p_clk * <lift, w>, pure_ctr by p_clk alone, no_lift serves with
/// the abandon value pinned to zero, two_model serves the differenced
/// estimator, heuristic_fixed_w serves the snapshot unchanged (its weights
/// are whatever was hand-set).
PolicySnapshot baseline_policy(BaselineKind kind, const PolicySnapshot& trained);

/// Full-system variant of an experiment config: the returned config trains
/// and serves the baseline end to end (score rule or lift mode adjusted,
/// solver disabled for heuristic_fixed_w).
ExperimentConfig apply_baseline(ExperimentConfig cfg, BaselineKind kind);

}  // namespace lrf
