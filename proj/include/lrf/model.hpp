#pragma once

#include "lrf/domain.hpp"
#include "lrf/random.hpp"
#include "lrf/ranker.hpp"
#include "lrf/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace lrf {

/// What the third head estimates and how the lift used for ranking is
/// assembled from the heads.
///
///   lift_direct:    one head regresses the lift itself (click return minus
///                   abandon return); ranking uses it as-is.
///   no_abandon:     the abandon-value head is pinned to zero, so the "lift"
///                   head actually learns the full click return.
///   two_model:      the head regresses the full click return and ranking
///                   uses (click return - abandon value), differencing two
///                   models.
enum class LiftMode { lift_direct, no_abandon, two_model };

const char* to_string(LiftMode mode);
LiftMode lift_mode_from_string(const std::string& s);

/// Architecture of the four heads. Each is a feed-forward net with two
/// hidden tanh layers; the click/abandon probabilities come from one trunk
/// emitting three logits softmaxed over {click, abandon, continue}, which
/// keeps p_clk + p_abd <= 1 for any parameter values.
struct ModelConfig {
    int user_dim = 0;
    int item_dim = 0;
    int reward_dim = 1;
    int hidden_width = 32;
    LiftMode mode = LiftMode::lift_direct;
    /// Let the clicked-step loss push gradients into the abandon head
    /// instead of treating its output as a constant.
    bool joint_lift_grad = false;

    std::size_t param_count() const;
};

void validate(const ModelConfig& cfg);

/// One two-hidden-layer feed-forward block. Weight matrices are stored
/// row-major-by-layer: W[0] (hidden x in), W[1] (hidden x hidden),
/// W[2] (out x hidden), with matching bias vectors.
struct Mlp {
    std::vector<Matrix> W;
    std::vector<Vector> b;

    static Mlp shaped(int in, int hidden, int out);
    /// Hidden layers drawn from a symmetric uniform range scaled by fan-in;
    /// output layer zeroed so the initial prediction is exactly zero (and
    /// softmaxed heads start uniform).
    static Mlp initialized(int in, int hidden, int out, RandomStream& rng);

    Vector forward(const Vector& x) const;
    std::size_t param_count() const;
    void set_zero();
};

/// Immutable parameter snapshot of the four heads.
struct ModelParams {
    ModelConfig cfg;
    Mlp abd_reward;   // user features            -> reward_dim
    Mlp lift_reward;  // user + item features     -> reward_dim (see LiftMode)
    Mlp prob_trunk;   // user + item features     -> 3 logits

    static ModelParams initialized(const ModelConfig& cfg, RandomStream& rng);

    std::size_t param_count() const;

    /// Flat view in a fixed block order (abd, lift, prob; per layer W then b;
    /// Eigen's column-major element order within a block).
    Vector to_vector() const;
    static ModelParams from_vector(const ModelConfig& cfg, const Vector& flat);
};

/// Gradient accumulator with the same shape as ModelParams.
struct ModelGrad {
    Mlp abd_reward;
    Mlp lift_reward;
    Mlp prob_trunk;

    static ModelGrad zeros(const ModelConfig& cfg);
    Vector to_vector() const;
    void axpy_into(ModelParams& params, double step) const;
};

/// Evaluates all four heads for every candidate of the state. Deterministic
/// given (params, state). Throws ValidationError on feature-length mismatch.
SlateBeliefs predict_beliefs(const ModelParams& params, const UserState& state);

/// Click/abandon probabilities for one (user, item) pair.
void predict_probs(const ModelParams& params, const Vector& user_features,
                   const Vector& item_features, double& p_clk, double& p_abd);

/// One training example: a logged step plus its Monte Carlo return.
struct TrainExample {
    const Step* step = nullptr;
    const RewardVector* mc_return = nullptr;
};

/// Mean over batch and reward components of |abd_head(u) - return|^2.
/// Every step must be an abandoned page (click_pos = 0).
double loss_abd(const ModelParams& params, const std::vector<TrainExample>& batch);
double loss_abd_grad(const ModelParams& params, const std::vector<TrainExample>& batch,
                     ModelGrad& grad);

/// Mean over batch and components of
/// |lift_head(u, clicked item) + abd_term(u) - return|^2 on clicked pages;
/// abd_term is the abandon head in lift_direct mode (a constant w.r.t. the
/// gradient unless joint_lift_grad) and zero otherwise.
double loss_lift(const ModelParams& params, const std::vector<TrainExample>& batch);
double loss_lift_grad(const ModelParams& params, const std::vector<TrainExample>& batch,
                      ModelGrad& grad);

/// Mean of -log P(observed click position) under the cascade process with
/// the probability heads evaluated along the displayed order. Used on every
/// page, clicked or abandoned.
double loss_click(const ModelParams& params, const std::vector<TrainExample>& batch);
double loss_click_grad(const ModelParams& params, const std::vector<TrainExample>& batch,
                       ModelGrad& grad);

struct TrainConfig {
    double learning_rate = 1e-2;
    int batch_size = 32;
    int steps_per_iteration = 100;
    std::uint64_t seed = 0;
};

void validate(const TrainConfig& cfg);

/// Flat view over buffered trajectories used for minibatch sampling.
struct TrainingSet {
    std::vector<TrainExample> abandoned;
    std::vector<TrainExample> clicked;
    std::vector<TrainExample> all;

    bool empty() const { return all.empty(); }
};

/// Mean minibatch losses observed while updating.
struct IterationLosses {
    double abd = 0.0;
    double lift = 0.0;
    double click = 0.0;
};

/// One optimization round: plain SGD on loss_abd, then loss_lift, then
/// loss_click, cfg.steps_per_iteration minibatches each, sampled uniformly
/// with replacement via `rng`. Returns the updated snapshot; deterministic
/// given (params, data, cfg, rng state). A loss whose example pool is empty
/// is skipped. Throws RefusalError when the whole set is empty.
ModelParams train_iteration(const ModelParams& params, const TrainingSet& data,
                            const TrainConfig& cfg, RandomStream& rng,
                            IterationLosses* losses_out = nullptr);

/// Versioned binary snapshot with an embedded architecture descriptor.
void save_snapshot(std::ostream& out, const ModelParams& params, const Vector& weights,
                   double epsilon, ScoreRule rule);
struct Snapshot {
    ModelParams params;
    Vector weights;
    double epsilon = 0.0;
    ScoreRule rule = ScoreRule::cascade_lift;
};
Snapshot load_snapshot(std::istream& in);

}  // namespace lrf
