#include "lrf/trainer.hpp"

#include "lrf/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace lrf {

namespace {

constexpr std::uint64_t kInitTag = 0x01;
constexpr std::uint64_t kTrainTag = 0x02;
constexpr std::uint64_t kRolloutTag = 0x03;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

void validate(const BufferConfig& cfg) {
    if (cfg.k < 1) throw ValidationError("buffer config: k must be >= 1");
    if (cfg.capacity < cfg.k) throw ValidationError("buffer config: capacity must be >= k");
}

TrajectoryBuffer::TrajectoryBuffer(const BufferConfig& cfg, const DiscountConfig& discount)
    : cfg_(cfg), discount_(discount) {
    validate(cfg_);
}

void TrajectoryBuffer::push(int iteration, Trajectory traj) {
    BufferedTrajectory item;
    item.iteration = iteration;
    item.returns = all_returns(traj, discount_);
    item.traj = std::move(traj);
    items_.push_back(std::move(item));
    while (items_.size() > static_cast<std::size_t>(cfg_.capacity)) items_.pop_front();
}

std::vector<const Trajectory*> TrajectoryBuffer::trajectories() const {
    std::vector<const Trajectory*> out;
    out.reserve(items_.size());
    for (const auto& item : items_) out.push_back(&item.traj);
    return out;
}

TrainingSet TrajectoryBuffer::training_view(bool exclude_promoted_from_click) const {
    TrainingSet set;
    for (const auto& item : items_) {
        for (std::size_t t = 0; t < item.traj.steps.size(); ++t) {
            const Step& step = item.traj.steps[t];
            const TrainExample ex{&step, &item.returns[t]};
            if (step.click_pos == 0)
                set.abandoned.push_back(ex);
            else
                set.clicked.push_back(ex);
            if (!(exclude_promoted_from_click && step.promoted_candidate)) set.all.push_back(ex);
        }
    }
    return set;
}

SlatePolicy serving_policy(const PolicySnapshot& snapshot) {
    return [snapshot](const UserState& state, RandomStream& rng) {
        const SlateBeliefs sb = predict_beliefs(snapshot.params, state);
        const Permutation ranked = rank_slate(sb, snapshot.weights, snapshot.rule);
        ExploreResult explored = explore(ranked, snapshot.epsilon, rng);
        return PolicyDecision{std::move(explored.perm), explored.promoted_candidate};
    };
}

SlatePolicy greedy_policy(const PolicySnapshot& snapshot) {
    PolicySnapshot greedy = snapshot;
    greedy.epsilon = 0.0;
    return serving_policy(greedy);
}

void validate(const ExperimentConfig& cfg) {
    validate(cfg.world);
    validate(cfg.train);
    validate(cfg.buffer);
    if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0))
        throw ValidationError("experiment config: epsilon must lie in [0,1]");
    if (cfg.iterations < 0) throw ValidationError("experiment config: iterations must be >= 0");
    if (cfg.horizon < 1) throw ValidationError("experiment config: horizon must be >= 1");
    if (cfg.model.hidden_width < 1)
        throw ValidationError("experiment config: hidden width must be >= 1");
    if (cfg.targets) {
        validate(*cfg.targets);
        if (cfg.targets->m() != cfg.world.reward_dim)
            throw ValidationError("experiment config: constraint targets imply m = " +
                                  std::to_string(cfg.targets->m()) + ", world has reward_dim = " +
                                  std::to_string(cfg.world.reward_dim));
    }
    if (!cfg.fixed_weights.empty() &&
        static_cast<int>(cfg.fixed_weights.size()) != cfg.world.reward_dim - 1)
        throw ValidationError("experiment config: fixed_weights must list w_2..w_m");
    if (cfg.arch_change) {
        if (cfg.arch_change->iteration < 0 || cfg.arch_change->hidden_width < 1)
            throw ValidationError("experiment config: invalid architecture change");
    }
}

WeightVector initial_weights(const ExperimentConfig& cfg) {
    const int m = cfg.world.reward_dim;
    if (!cfg.solve_weights && !cfg.fixed_weights.empty()) {
        Vector w(m);
        w[0] = 1.0;
        for (int i = 1; i < m; ++i) w[i] = cfg.fixed_weights[static_cast<std::size_t>(i - 1)];
        return WeightVector(std::move(w));
    }
    return WeightVector::primary_only(m);
}

std::string MetricsSeries::header() const {
    std::ostringstream out;
    out << "iteration,loss_abd,loss_lift,loss_click";
    for (int k = 1; k <= m; ++k) out << ",j_platform_" << k;
    for (int k = 1; k <= m; ++k) out << ",j_onsurface_" << k;
    if (constrained) {
        for (int k = 2; k <= m; ++k) out << ",w_" << k;
        for (int k = 1; k <= m; ++k) out << ",corr_" << k;
        for (int k = 2; k <= m; ++k) out << ",feasible_" << k;
        out << ",solver_ran";
    }
    return out.str();
}

void MetricsSeries::write_csv(std::ostream& out) const {
    out << header() << '\n';
    for (const MetricsRow& row : rows) {
        out << row.iteration << ',' << fmt_double(row.loss_abd) << ',' << fmt_double(row.loss_lift)
            << ',' << fmt_double(row.loss_click);
        for (int k = 0; k < m; ++k) out << ',' << fmt_double(row.j_platform[k]);
        for (int k = 0; k < m; ++k) out << ',' << fmt_double(row.j_onsurface[k]);
        if (constrained) {
            for (int k = 1; k < m; ++k) out << ',' << fmt_double(row.weights[k]);
            for (int k = 0; k < m; ++k) out << ',' << fmt_double(row.corr[static_cast<std::size_t>(k)]);
            for (int k = 0; k + 1 < m; ++k)
                out << ',' << (row.feasible[static_cast<std::size_t>(k)] ? 1 : 0);
            out << ',' << (row.solver_ran ? 1 : 0);
        }
        out << '\n';
    }
}

namespace {

ModelConfig model_config_for(const GroundTruth& gt, const ModelSettings& settings) {
    ModelConfig cfg;
    cfg.user_dim = gt.user_dim();
    cfg.item_dim = gt.item_dim();
    cfg.reward_dim = gt.cfg.reward_dim;
    cfg.hidden_width = settings.hidden_width;
    cfg.mode = settings.mode;
    cfg.joint_lift_grad = settings.joint_lift_grad;
    return cfg;
}

TrainResult run_loop(const GroundTruth& gt, const ExperimentConfig& cfg, bool constrained,
                     const TrainHooks* hooks) {
    validate(cfg);
    const int m = gt.cfg.reward_dim;

    RandomStream root(cfg.train.seed);
    RandomStream init_rng = root.substream(kInitTag);
    RandomStream train_rng = root.substream(kTrainTag);
    const RandomStream rollout_root = root.substream(kRolloutTag);

    ModelConfig model_cfg = model_config_for(gt, cfg.model);
    ModelParams params = ModelParams::initialized(model_cfg, init_rng);
    WeightVector weights = initial_weights(cfg);

    PolicySnapshot snapshot{params, weights, cfg.epsilon, cfg.score_rule};
    TrajectoryBuffer buffer(cfg.buffer, gt.cfg.discount);

    MetricsSeries metrics;
    metrics.m = m;
    metrics.constrained = constrained;

    std::uint64_t next_traj_id = 0;
    for (int iter = 0; iter < cfg.iterations; ++iter) {
        if (cfg.arch_change && iter == cfg.arch_change->iteration) {
            // Architecture change mid-run: fresh parameters at the new width,
            // trained from the retained buffer; weights carry over.
            model_cfg.hidden_width = cfg.arch_change->hidden_width;
            params = ModelParams::initialized(model_cfg, init_rng);
            snapshot = PolicySnapshot{params, weights, cfg.epsilon, cfg.score_rule};
        }

        // All rollouts of the iteration use the same snapshot; per-trajectory
        // streams keep the collection deterministic under any thread count.
        const SlatePolicy policy = serving_policy(snapshot);
        std::vector<Trajectory> fresh(static_cast<std::size_t>(cfg.buffer.k));
        parallel_for(fresh.size(), [&](std::size_t j) {
            RandomStream stream = rollout_root.substream(next_traj_id + j);
            fresh[j] = rollout(gt, policy, cfg.horizon, stream);
        });
        next_traj_id += static_cast<std::uint64_t>(cfg.buffer.k);

        MetricsRow row;
        row.iteration = iter;
        row.j_platform = RewardVector::Zero(m);
        row.j_onsurface = RewardVector::Zero(m);
        for (const Trajectory& traj : fresh) {
            row.j_platform += all_returns(traj, gt.cfg.discount).front();
            row.j_onsurface += all_returns_on_surface(traj, gt.cfg.discount).front();
        }
        row.j_platform /= static_cast<double>(fresh.size());
        row.j_onsurface /= static_cast<double>(fresh.size());

        for (Trajectory& traj : fresh) buffer.push(iter, std::move(traj));
        if (hooks && hooks->on_buffer) hooks->on_buffer(iter, buffer);

        IterationLosses losses;
        params = train_iteration(params, buffer.training_view(cfg.exclude_exploration_clicks),
                                 cfg.train, train_rng, &losses);
        row.loss_abd = losses.abd;
        row.loss_lift = losses.lift;
        row.loss_click = losses.click;

        row.corr.assign(static_cast<std::size_t>(m), std::numeric_limits<double>::quiet_NaN());
        row.feasible.assign(static_cast<std::size_t>(std::max(0, m - 1)), false);
        if (constrained) {
            if (cfg.solve_weights && cfg.targets) {
                try {
                    const std::vector<EvalRecord> records = build_eval_set(buffer.trajectories(), params);
                    const SolveReport report = solve_weights(records, *cfg.targets, weights);
                    weights = report.w;
                    row.feasible = report.feasible;
                    row.corr = report.achieved;
                    row.solver_ran = true;
                    if (hooks && hooks->on_weights) hooks->on_weights(iter, records, report);
                } catch (const RefusalError&) {
                    // No exploration data this iteration; keep previous weights.
                }
            } else {
                // Fixed weights: still report the achieved offline correlations.
                try {
                    const std::vector<EvalRecord> records = build_eval_set(buffer.trajectories(), params);
                    for (int i = 1; i <= m; ++i) {
                        try {
                            row.corr[static_cast<std::size_t>(i - 1)] = offline_corr(records, weights, i);
                        } catch (const UndefinedCorrelation&) {
                        }
                    }
                } catch (const RefusalError&) {
                }
            }
        }
        row.weights = weights.vec();

        snapshot = PolicySnapshot{params, weights, cfg.epsilon, cfg.score_rule};
        metrics.rows.push_back(std::move(row));
    }

    TrainResult result{std::move(snapshot), std::move(metrics), {}};
    if (cfg.log_trajectories)
        for (const auto& item : buffer.items()) result.buffer_trajectories.push_back(item.traj);
    return result;
}

}  // namespace

TrainResult run_algorithm1(const GroundTruth& gt, const ExperimentConfig& cfg,
                           const TrainHooks* hooks) {
    if (gt.cfg.reward_dim != 1)
        throw ValidationError("single-objective training requires reward_dim = 1");
    if (cfg.world.reward_dim != gt.cfg.reward_dim ||
        cfg.world.feature_dim != gt.cfg.feature_dim || cfg.world.slate_size != gt.cfg.slate_size)
        throw ValidationError("experiment config does not match the initialized world");
    return run_loop(gt, cfg, false, hooks);
}

TrainResult run_algorithm2(const GroundTruth& gt, const ExperimentConfig& cfg,
                           const TrainHooks* hooks) {
    if (gt.cfg.reward_dim < 2)
        throw ValidationError("constrained training requires reward_dim >= 2");
    if (cfg.world.reward_dim != gt.cfg.reward_dim ||
        cfg.world.feature_dim != gt.cfg.feature_dim || cfg.world.slate_size != gt.cfg.slate_size)
        throw ValidationError("experiment config does not match the initialized world");
    if (cfg.solve_weights && !cfg.targets)
        throw ValidationError("constrained training requires correlation targets");
    return run_loop(gt, cfg, true, hooks);
}

PolicyEvaluation evaluate_policy(const GroundTruth& gt, const PolicySnapshot& snapshot,
                                 int num_trajectories, int horizon, RandomStream& rng) {
    if (num_trajectories < 1) throw ValidationError("evaluation needs at least one trajectory");
    const int m = gt.cfg.reward_dim;
    const SlatePolicy policy = greedy_policy(snapshot);
    const RandomStream base = rng.substream(0x9A11);

    Matrix platform(num_trajectories, m);
    Matrix onsurface(num_trajectories, m);
    parallel_for(static_cast<std::size_t>(num_trajectories), [&](std::size_t j) {
        RandomStream stream = base.substream(j);
        const Trajectory traj = rollout(gt, policy, horizon, stream);
        platform.row(static_cast<Eigen::Index>(j)) = all_returns(traj, gt.cfg.discount).front();
        onsurface.row(static_cast<Eigen::Index>(j)) =
            all_returns_on_surface(traj, gt.cfg.discount).front();
    });

    const auto summarize = [num_trajectories](const Matrix& data, RewardVector& mean, RewardVector& se) {
        mean = data.colwise().mean();
        se = RewardVector::Zero(data.cols());
        if (num_trajectories > 1) {
            for (Eigen::Index k = 0; k < data.cols(); ++k) {
                const double var = (data.col(k).array() - mean[k]).square().sum() /
                                   static_cast<double>(num_trajectories - 1);
                se[k] = std::sqrt(var / static_cast<double>(num_trajectories));
            }
        }
    };
    PolicyEvaluation eval;
    eval.num_trajectories = num_trajectories;
    summarize(platform, eval.platform_mean, eval.platform_se);
    summarize(onsurface, eval.onsurface_mean, eval.onsurface_se);
    return eval;
}

BaselineKind baseline_kind_from_string(const std::string& s) {
    if (s == "ctr_only") return BaselineKind::ctr_only;
    if (s == "heuristic_fixed_w") return BaselineKind::heuristic_fixed_w;
    if (s == "no_lift") return BaselineKind::no_lift;
    if (s == "two_model") return BaselineKind::two_model;
    if (s == "pure_ctr") return BaselineKind::pure_ctr;
    throw ValidationError("unknown baseline kind: " + s);
}

const char* to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::ctr_only: return "ctr_only";
        case BaselineKind::heuristic_fixed_w: return "heuristic_fixed_w";
        case BaselineKind::no_lift: return "no_lift";
        case BaselineKind::two_model: return "two_model";
        case BaselineKind::pure_ctr: return "pure_ctr";
    }
    throw ContractViolation("unknown baseline kind");
}

PolicySnapshot baseline_policy(BaselineKind kind, const PolicySnapshot& trained) {
    PolicySnapshot out = trained;
    switch (kind) {
        case BaselineKind::ctr_only:
            out.rule = ScoreRule::ctr_lift;
            break;
        case BaselineKind::pure_ctr:
            out.rule = ScoreRule::pure_ctr;
            break;
        case BaselineKind::no_lift:
            out.params.cfg.mode = LiftMode::no_abandon;
            out.rule = ScoreRule::cascade_lift;
            break;
        case BaselineKind::two_model:
            out.params.cfg.mode = LiftMode::two_model;
            out.rule = ScoreRule::cascade_lift;
            break;
        case BaselineKind::heuristic_fixed_w:
            break;
    }
    return out;
}

ExperimentConfig apply_baseline(ExperimentConfig cfg, BaselineKind kind) {
    switch (kind) {
        case BaselineKind::ctr_only:
            cfg.score_rule = ScoreRule::ctr_lift;
            break;
        case BaselineKind::pure_ctr:
            cfg.score_rule = ScoreRule::pure_ctr;
            break;
        case BaselineKind::no_lift:
            cfg.model.mode = LiftMode::no_abandon;
            break;
        case BaselineKind::two_model:
            cfg.model.mode = LiftMode::two_model;
            break;
        case BaselineKind::heuristic_fixed_w:
            cfg.solve_weights = false;
            break;
    }
    return cfg;
}

}  // namespace lrf
