#pragma once

#include "lrf/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lrf {

/// One candidate offered for ranking. Feature length is constant within an
/// experiment.
struct CandidateItem {
    std::string item_id;
    Vector item_features;
};

/// State seen by the ranking policy: the user plus the candidate slate.
/// Candidates are non-empty and carry distinct item ids; their count n is
/// fixed per experiment.
struct UserState {
    std::string user_id;
    Vector user_features;
    std::vector<CandidateItem> candidates;
};

/// A display order for n candidates: a bijection on 1..n. order()[p] is the
/// 1-based candidate index shown at display position p+1.
class Permutation {
public:
    explicit Permutation(std::vector<int> order);

    static Permutation identity(int n);

    int n() const { return static_cast<int>(order_.size()); }
    const std::vector<int>& order() const { return order_; }

    /// 0-based candidate index at 0-based display position.
    int candidate_at(int pos) const { return order_[static_cast<std::size_t>(pos)] - 1; }

    bool operator==(const Permutation& other) const { return order_ == other.order_; }

private:
    std::vector<int> order_;
};

/// Checks that `order` is a bijection on 1..n. The error message names the
/// first offending index.
Permutation validate_permutation(const std::vector<int>& order);

/// One impression: the state, the displayed order, the observed click
/// position (0 = the user abandoned the slate without clicking, 1..n = click
/// at that displayed rank), and the immediate reward vector.
///
/// `promoted_candidate` is an in-memory annotation set when exploration moved
/// a random candidate to the top (1-based candidate index); it never appears
/// in the serialized log format.
struct Step {
    UserState state;
    Permutation action;
    int click_pos = 0;
    RewardVector reward;
    std::optional<int> promoted_candidate;
};

/// An ordered, finite, non-empty list of steps for one user session.
struct Trajectory {
    std::vector<Step> steps;

    std::size_t size() const { return steps.size(); }
};

struct DiscountConfig {
    double gamma = 0.9;
};

void validate(const DiscountConfig& cfg);

/// Discounted return from step t to the end of the trajectory, componentwise:
/// sum over t' >= t of gamma^(t'-t) * reward(t'). Computed by a single
/// backward pass, so the recurrence G(t) = r(t) + gamma * G(t+1) holds
/// exactly in floating point.
RewardVector discounted_return(const Trajectory& traj, std::size_t t, const DiscountConfig& cfg);

/// Returns for every step at once (one backward pass).
std::vector<RewardVector> all_returns(const Trajectory& traj, const DiscountConfig& cfg);

/// Same backward pass restricted to clicked steps: rewards of abandoned steps
/// count as zero. Used to split platform-wide value from on-surface value.
std::vector<RewardVector> all_returns_on_surface(const Trajectory& traj, const DiscountConfig& cfg);

}  // namespace lrf
