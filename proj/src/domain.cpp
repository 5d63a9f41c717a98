#include "lrf/domain.hpp"

#include <numeric>

namespace lrf {

Permutation::Permutation(std::vector<int> order) : order_(std::move(order)) {
    const int n = static_cast<int>(order_.size());
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (const int idx : order_) {
        if (idx < 1 || idx > n)
            throw ValidationError("permutation index out of range: " + std::to_string(idx));
        if (seen[static_cast<std::size_t>(idx - 1)])
            throw ValidationError("duplicate permutation index: " + std::to_string(idx));
        seen[static_cast<std::size_t>(idx - 1)] = 1;
    }
}

Permutation Permutation::identity(int n) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 1);
    return Permutation(std::move(order));
}

Permutation validate_permutation(const std::vector<int>& order) {
    return Permutation(order);
}

void validate(const DiscountConfig& cfg) {
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0))
        throw ValidationError("gamma must lie strictly inside (0,1)");
}

RewardVector discounted_return(const Trajectory& traj, std::size_t t, const DiscountConfig& cfg) {
    if (traj.steps.empty()) throw ContractViolation("discounted_return: empty trajectory");
    if (t >= traj.steps.size())
        throw ContractViolation("discounted_return: step index " + std::to_string(t) +
                                " out of range for trajectory of length " +
                                std::to_string(traj.steps.size()));
    RewardVector acc = traj.steps.back().reward;
    for (std::size_t i = traj.steps.size() - 1; i > t; --i)
        acc = traj.steps[i - 1].reward + cfg.gamma * acc;
    return acc;
}

namespace {

std::vector<RewardVector> backward_returns(const Trajectory& traj, const DiscountConfig& cfg,
                                           bool clicked_only) {
    std::vector<RewardVector> out(traj.steps.size());
    const Eigen::Index m = traj.steps.empty() ? 0 : traj.steps.front().reward.size();
    RewardVector acc = RewardVector::Zero(m);
    for (std::size_t i = traj.steps.size(); i > 0; --i) {
        const Step& step = traj.steps[i - 1];
        const bool counted = !clicked_only || step.click_pos >= 1;
        acc = (counted ? step.reward : RewardVector(RewardVector::Zero(m))) + cfg.gamma * acc;
        out[i - 1] = acc;
    }
    return out;
}

}  // namespace

std::vector<RewardVector> all_returns(const Trajectory& traj, const DiscountConfig& cfg) {
    return backward_returns(traj, cfg, false);
}

std::vector<RewardVector> all_returns_on_surface(const Trajectory& traj, const DiscountConfig& cfg) {
    return backward_returns(traj, cfg, true);
}

}  // namespace lrf
