#include "lrf/simulator.hpp"

#include "lrf/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace lrf {

namespace {

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

Matrix unit_rows(int rows, int cols, RandomStream& rng) {
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        double norm2 = 0.0;
        for (int c = 0; c < cols; ++c) {
            m(r, c) = rng.normal();
            norm2 += m(r, c) * m(r, c);
        }
        const double norm = std::sqrt(norm2);
        if (norm > 0.0) m.row(r) /= norm;
    }
    return m;
}

/// First n entries of a seeded partial Fisher-Yates pass over 0..count-1.
std::vector<int> sample_distinct(int count, int n, RandomStream& rng) {
    std::vector<int> pool(static_cast<std::size_t>(count));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < n; ++i) {
        const int j = i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(count - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(n));
    return pool;
}

RewardVector sample_reward(const RewardVector& mean, double noise, RandomStream& rng) {
    RewardVector r = mean;
    if (noise > 0.0)
        for (Eigen::Index k = 0; k < r.size(); ++k) r[k] += noise * rng.normal();
    return r;
}

}  // namespace

void validate(const WorldConfig& cfg) {
    if (cfg.num_users < 1 || cfg.num_items < 1)
        throw ValidationError("world config: user and item counts must be positive");
    if (cfg.feature_dim < 1) throw ValidationError("world config: feature_dim must be positive");
    if (cfg.slate_size < 1 || cfg.slate_size > cfg.num_items)
        throw ValidationError("world config: slate size must lie in 1..num_items");
    if (cfg.reward_dim < 1) throw ValidationError("world config: reward_dim must be positive");
    validate(cfg.discount);
    if (!(cfg.session_continue_prob >= 0.0 && cfg.session_continue_prob < 1.0) &&
        cfg.session_continue_prob != 1.0)
        throw ValidationError("world config: session_continue_prob must lie in [0,1]");
    if (!(cfg.offsite_value_scale >= 0.0))
        throw ValidationError("world config: offsite_value_scale must be nonnegative");
}

void GroundTruth::true_probs(const Vector& user_latent, int item, double& p_clk,
                             double& p_abd) const {
    const double zc = cfg.gen.clk_bias + cfg.gen.clk_scale * user_latent.dot(item_click_vec.row(item));
    const double za = cfg.gen.abd_bias + cfg.gen.abd_scale * user_latent.dot(item_abd_vec.row(item));
    const double mx = std::max({zc, za, 0.0});
    const double ec = std::exp(zc - mx);
    const double ea = std::exp(za - mx);
    const double eq = std::exp(0.0 - mx);
    const double s = ec + ea + eq;
    p_clk = ec / s;
    p_abd = ea / s;
    if (p_clk + p_abd > 1.0) p_abd = 1.0 - p_clk;
}

RewardVector GroundTruth::click_reward_mean(const Vector& user_latent, int item) const {
    RewardVector r(cfg.reward_dim);
    for (int k = 0; k < cfg.reward_dim; ++k) {
        const double affinity =
            user_latent.dot(reward_proj[static_cast<std::size_t>(k)] * item_click_vec.row(item).transpose());
        r[k] = cfg.gen.reward_scale * softplus(cfg.gen.reward_bias + affinity);
    }
    return r;
}

RewardVector GroundTruth::offsite_reward_mean(const Vector& user_latent) const {
    RewardVector r(cfg.reward_dim);
    for (int k = 0; k < cfg.reward_dim; ++k)
        r[k] = cfg.offsite_value_scale *
               softplus(cfg.gen.offsite_bias + user_latent.dot(offsite_dir.row(k)));
    return r;
}

Vector GroundTruth::next_latent(const Vector& user_latent, int item) const {
    Vector next = (1.0 - cfg.gen.latent_mix) * user_latent +
                  cfg.gen.latent_mix * item_click_vec.row(item).transpose();
    const double norm = next.norm();
    return norm > 0.0 ? Vector(next / norm) : user_latent;
}

Vector GroundTruth::item_features(int item) const {
    Vector f(item_dim());
    f.head(cfg.feature_dim) = item_click_vec.row(item);
    f.tail(cfg.feature_dim) = item_abd_vec.row(item);
    return f;
}

GroundTruth init_world(const WorldConfig& cfg) {
    validate(cfg);
    GroundTruth gt;
    gt.cfg = cfg;
    RandomStream rng(cfg.seed);
    RandomStream users = rng.substream(1);
    RandomStream items = rng.substream(2);
    RandomStream projections = rng.substream(3);

    const int d = cfg.feature_dim;
    gt.user_base = unit_rows(cfg.num_users, d, users);
    gt.item_click_vec = unit_rows(cfg.num_items, d, items);
    gt.item_abd_vec = unit_rows(cfg.num_items, d, items);

    gt.reward_proj.reserve(static_cast<std::size_t>(cfg.reward_dim));
    for (int k = 0; k < cfg.reward_dim; ++k) {
        Matrix p(d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) p(r, c) = projections.normal() / std::sqrt(static_cast<double>(d));
        // The primary projection leans toward the click-affinity geometry so
        // clickable items tend to be somewhat rewarding; later objectives are
        // independent directions.
        if (k == 0)
            p = cfg.gen.reward_click_alignment * Matrix::Identity(d, d) +
                (1.0 - cfg.gen.reward_click_alignment) * p;
        gt.reward_proj.push_back(std::move(p));
    }
    gt.offsite_dir = unit_rows(cfg.reward_dim, d, projections);
    return gt;
}

SlatePolicy random_policy() {
    return [](const UserState& state, RandomStream& rng) {
        const int n = static_cast<int>(state.candidates.size());
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 1);
        for (int i = n - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i + 1)));
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }
        return PolicyDecision{Permutation(std::move(order)), std::nullopt};
    };
}

UserState initial_state(const GroundTruth& gt, int user, RandomStream& rng) {
    UserState state;
    state.user_id = "u" + std::to_string(user);
    state.user_features = gt.user_base.row(user);
    const std::vector<int> picks = sample_distinct(gt.cfg.num_items, gt.cfg.slate_size, rng);
    state.candidates.reserve(picks.size());
    for (const int item : picks)
        state.candidates.push_back(CandidateItem{"i" + std::to_string(item), gt.item_features(item)});
    return state;
}

namespace {

int item_index(const CandidateItem& item) { return std::stoi(item.item_id.substr(1)); }

UserState make_state(const GroundTruth& gt, const std::string& user_id, const Vector& latent,
                     RandomStream& rng) {
    UserState state;
    state.user_id = user_id;
    state.user_features = latent;
    const std::vector<int> picks = sample_distinct(gt.cfg.num_items, gt.cfg.slate_size, rng);
    state.candidates.reserve(picks.size());
    for (const int item : picks)
        state.candidates.push_back(CandidateItem{"i" + std::to_string(item), gt.item_features(item)});
    return state;
}

cascade::SlateProbs true_slate_probs(const GroundTruth& gt, const UserState& state,
                                     const Permutation& order) {
    const int n = order.n();
    Vector clk(n), abd(n);
    for (int pos = 0; pos < n; ++pos) {
        const CandidateItem& item = state.candidates[static_cast<std::size_t>(order.candidate_at(pos))];
        gt.true_probs(state.user_features, item_index(item), clk[pos], abd[pos]);
    }
    return cascade::SlateProbs(std::move(clk), std::move(abd));
}

/// Continues a session after its (possibly forced) first step. Accumulates
/// discounted rewards starting at discount `gamma_pow`.
RewardVector continue_session(const GroundTruth& gt, Vector latent, const std::string& user_id,
                              const SlatePolicy& policy, int steps_left, double gamma_pow,
                              RandomStream& rng) {
    RewardVector acc = RewardVector::Zero(gt.cfg.reward_dim);
    const double gamma = gt.cfg.discount.gamma;
    for (int t = 0; t < steps_left; ++t) {
        UserState state = make_state(gt, user_id, latent, rng);
        const PolicyDecision decision = policy(state, rng);
        const cascade::SlateProbs sp = true_slate_probs(gt, state, decision.order);
        const int click_pos = cascade::sample_interaction(sp, rng);
        RewardVector reward;
        if (click_pos >= 1) {
            const int cand = decision.order.candidate_at(click_pos - 1);
            const int item = item_index(state.candidates[static_cast<std::size_t>(cand)]);
            reward = sample_reward(gt.click_reward_mean(latent, item), gt.cfg.gen.reward_noise, rng);
            latent = gt.next_latent(latent, item);
        } else {
            reward = sample_reward(gt.offsite_reward_mean(latent),
                                   gt.cfg.offsite_value_scale > 0.0 ? gt.cfg.gen.offsite_noise : 0.0,
                                   rng);
        }
        acc += gamma_pow * reward;
        gamma_pow *= gamma;
        if (t + 1 < steps_left && rng.uniform01() >= gt.cfg.session_continue_prob) break;
    }
    return acc;
}

}  // namespace

Trajectory rollout(const GroundTruth& gt, const SlatePolicy& policy, int horizon,
                   RandomStream& rng) {
    if (horizon < 1) throw ValidationError("rollout horizon must be >= 1");
    Trajectory traj;
    const int user = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(gt.cfg.num_users)));
    const std::string user_id = "u" + std::to_string(user);
    Vector latent = gt.user_base.row(user);

    for (int t = 0; t < horizon; ++t) {
        UserState state = make_state(gt, user_id, latent, rng);
        const PolicyDecision decision = policy(state, rng);
        const cascade::SlateProbs sp = true_slate_probs(gt, state, decision.order);
        const int click_pos = cascade::sample_interaction(sp, rng);

        RewardVector reward;
        if (click_pos >= 1) {
            const int cand = decision.order.candidate_at(click_pos - 1);
            const int item = item_index(state.candidates[static_cast<std::size_t>(cand)]);
            reward = sample_reward(gt.click_reward_mean(latent, item), gt.cfg.gen.reward_noise, rng);
            latent = gt.next_latent(latent, item);
        } else {
            reward = sample_reward(gt.offsite_reward_mean(latent),
                                   gt.cfg.offsite_value_scale > 0.0 ? gt.cfg.gen.offsite_noise : 0.0,
                                   rng);
        }

        traj.steps.push_back(Step{std::move(state), decision.order, click_pos, std::move(reward),
                                  decision.promoted_candidate});
        if (t + 1 < horizon && rng.uniform01() >= gt.cfg.session_continue_prob) break;
    }
    return traj;
}

TrueBeliefs true_slate_beliefs(const GroundTruth& gt, const UserState& state,
                               const SlatePolicy& policy, int eval_horizon, int num_rollouts,
                               RandomStream& rng) {
    if (eval_horizon < 1 || num_rollouts < 2)
        throw ValidationError("true_slate_beliefs: horizon must be >= 1 and rollouts >= 2");
    const int n = static_cast<int>(state.candidates.size());
    const double budget = static_cast<double>(num_rollouts) * (n + 1) * eval_horizon;
    if (budget > 5e8)
        throw RefusalError("true_slate_beliefs: rollout budget too large for a test-time oracle");

    const int m = gt.cfg.reward_dim;
    const double gamma = gt.cfg.discount.gamma;

    // One forced first step, then the plain generative process.
    const auto conditional_value = [&](std::optional<int> clicked_item, RandomStream stream) {
        RewardVector sum = RewardVector::Zero(m);
        RewardVector sumsq = RewardVector::Zero(m);
        for (int r = 0; r < num_rollouts; ++r) {
            RandomStream run = stream.substream(static_cast<std::uint64_t>(r));
            RewardVector total(m);
            Vector latent = state.user_features;
            if (clicked_item) {
                total = sample_reward(gt.click_reward_mean(latent, *clicked_item),
                                      gt.cfg.gen.reward_noise, run);
                latent = gt.next_latent(latent, *clicked_item);
            } else {
                total = sample_reward(gt.offsite_reward_mean(latent),
                                      gt.cfg.offsite_value_scale > 0.0 ? gt.cfg.gen.offsite_noise : 0.0,
                                      run);
            }
            if (eval_horizon > 1 && run.uniform01() < gt.cfg.session_continue_prob)
                total += continue_session(gt, latent, state.user_id, policy, eval_horizon - 1,
                                          gamma, run);
            sum += total;
            sumsq += total.cwiseProduct(total);
        }
        const RewardVector mean = sum / num_rollouts;
        RewardVector se(m);
        for (int k = 0; k < m; ++k) {
            const double var =
                std::max(0.0, (sumsq[k] - num_rollouts * mean[k] * mean[k]) / (num_rollouts - 1));
            se[k] = std::sqrt(var / num_rollouts);
        }
        return std::make_pair(mean, se);
    };

    TrueBeliefs out;
    const auto [abd_mean, abd_se] = conditional_value(std::nullopt, rng.substream(0));
    out.beliefs.r_abd = abd_mean;
    out.r_abd_se = abd_se;
    out.beliefs.items.resize(static_cast<std::size_t>(n));
    out.r_lift_se.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int item = item_index(state.candidates[static_cast<std::size_t>(i)]);
        const auto [clk_mean, clk_se] =
            conditional_value(item, rng.substream(static_cast<std::uint64_t>(i) + 1));
        ItemBeliefs& b = out.beliefs.items[static_cast<std::size_t>(i)];
        gt.true_probs(state.user_features, item, b.p_clk, b.p_abd);
        b.r_lift = clk_mean - abd_mean;
        RewardVector se(m);
        for (int k = 0; k < m; ++k) se[k] = std::sqrt(clk_se[k] * clk_se[k] + abd_se[k] * abd_se[k]);
        out.r_lift_se[static_cast<std::size_t>(i)] = se;
    }
    return out;
}

}  // namespace lrf
