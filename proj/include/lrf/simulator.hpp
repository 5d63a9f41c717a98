#pragma once

#include "lrf/domain.hpp"
#include "lrf/random.hpp"
#include "lrf/ranker.hpp"
#include "lrf/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace lrf {

/// Generative constants of the synthetic world. Click/abandon logits are
/// affine in latent dot products and pass through a shared three-way softmax
/// (so true p_clk + p_abd <= 1 by construction); per-click reward means are
/// softplus of projected latent dot products; abandoning pays a lump-sum
/// "offsite" reward with a user-dependent mean.
struct GenParams {
    double clk_bias = -1.2;
    double clk_scale = 1.6;
    double abd_bias = -1.4;
    double abd_scale = 1.4;
    double reward_bias = 0.4;
    double reward_scale = 1.5;
    double reward_noise = 0.25;
    double offsite_bias = 0.3;
    double offsite_noise = 0.25;
    /// Mixing coefficient of the clicked item's latent into the user latent.
    double latent_mix = 0.25;
    /// How strongly the first reward projection follows the click-affinity
    /// geometry (0 = independent, 1 = aligned).
    double reward_click_alignment = 0.35;
};

struct WorldConfig {
    int num_users = 20;
    int num_items = 40;
    int feature_dim = 4;
    int slate_size = 4;
    int reward_dim = 1;
    DiscountConfig discount;
    double session_continue_prob = 0.75;
    /// Strength of the reward a user collects after abandoning the slate
    /// (value earned elsewhere on the platform). 0 disables it exactly.
    double offsite_value_scale = 0.0;
    std::uint64_t seed = 0;
    GenParams gen;
};

void validate(const WorldConfig& cfg);

/// Frozen latent structure of a synthetic world. Immutable after init;
/// observable item features are the concatenation of the two item latent
/// blocks, observable user features are the (session-evolving) user latent.
struct GroundTruth {
    WorldConfig cfg;
    Matrix user_base;       // num_users x d, unit rows
    Matrix item_click_vec;  // num_items x d, unit rows
    Matrix item_abd_vec;    // num_items x d, unit rows
    std::vector<Matrix> reward_proj;  // reward_dim matrices, d x d
    Matrix offsite_dir;     // reward_dim x d

    int user_dim() const { return cfg.feature_dim; }
    int item_dim() const { return 2 * cfg.feature_dim; }

    /// True inspection-conditional probabilities for a (user latent, item).
    void true_probs(const Vector& user_latent, int item, double& p_clk, double& p_abd) const;
    /// Mean immediate reward vector of a click on `item`.
    RewardVector click_reward_mean(const Vector& user_latent, int item) const;
    /// Mean immediate reward vector collected after abandoning.
    RewardVector offsite_reward_mean(const Vector& user_latent) const;
    /// User latent after clicking `item`.
    Vector next_latent(const Vector& user_latent, int item) const;
    Vector item_features(int item) const;
};

GroundTruth init_world(const WorldConfig& cfg);

/// A serving policy: produces a display order for the state, drawing any
/// exploration randomness from the provided stream, and reports which
/// candidate (if any) was promoted to the top.
struct PolicyDecision {
    Permutation order;
    std::optional<int> promoted_candidate;
};
using SlatePolicy = std::function<PolicyDecision(const UserState&, RandomStream&)>;

/// Uniformly random display order; the fixed behavior policy used by
/// estimation experiments.
SlatePolicy random_policy();

/// Samples one user session of at most `horizon` steps: draw a fresh user
/// and candidate slate, apply the policy, sample the interaction through the
/// cascade sampler, emit the reward (click reward, or offsite reward on
/// abandonment), shift the user latent on clicks, and continue with
/// probability session_continue_prob.
Trajectory rollout(const GroundTruth& gt, const SlatePolicy& policy, int horizon,
                   RandomStream& rng);

/// Ground-truth beliefs for one state, estimated by conditional Monte Carlo:
/// abandonment value from rollouts whose first step is forced to abandon,
/// per-item click values from rollouts forced to click that item. Lift is
/// the difference. Standard errors accompany every estimate.
struct TrueBeliefs {
    SlateBeliefs beliefs;
    RewardVector r_abd_se;
    std::vector<RewardVector> r_lift_se;
    RewardVector r_clk_mean(int item) const {
        return beliefs.items[static_cast<std::size_t>(item)].r_lift + beliefs.r_abd;
    }
};

TrueBeliefs true_slate_beliefs(const GroundTruth& gt, const UserState& state,
                               const SlatePolicy& policy, int eval_horizon, int num_rollouts,
                               RandomStream& rng);

/// A fresh session state for user `user` with a deterministic candidate draw
/// from `rng`.
UserState initial_state(const GroundTruth& gt, int user, RandomStream& rng);

}  // namespace lrf
