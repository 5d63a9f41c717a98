#pragma once

#include "lrf/domain.hpp"
#include "lrf/random.hpp"
#include "lrf/types.hpp"
#include "lrf/weights.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace lrf {

/// Per-item quantities the ranking rule consumes: inspection-conditional
/// click and abandon probabilities plus the lift vector, i.e. how much more
/// long-term reward a click on this item yields than abandoning the slate.
struct ItemBeliefs {
    double p_clk = 0.0;
    double p_abd = 0.0;
    RewardVector r_lift;
};

/// Beliefs for a whole candidate slate, plus the user-level abandonment
/// value vector.
struct SlateBeliefs {
    std::vector<ItemBeliefs> items;
    RewardVector r_abd;

    int n() const { return static_cast<int>(items.size()); }
};

void validate(const ItemBeliefs& b);
void validate(const SlateBeliefs& sb);

/// How serving turns beliefs into a per-item score.
enum class ScoreRule {
    cascade_lift,  // p_clk / (p_clk + p_abd) * <r_lift, w>   (the optimal rule)
    ctr_lift,      // p_clk * <r_lift, w>
    pure_ctr,      // p_clk
};

const char* to_string(ScoreRule rule);
ScoreRule score_rule_from_string(const std::string& s);

/// The optimal single-item score: p_clk / (p_clk + p_abd) * <r_lift, w>.
/// Defined as 0 when p_clk + p_abd = 0: such an item is never clicked and
/// never blocks the cascade, so its position cannot change the slate value.
double item_score(const ItemBeliefs& b, const WeightVector& w);

double item_score(const ItemBeliefs& b, const WeightVector& w, ScoreRule rule);

/// Sorts candidates by score, descending; ties broken by ascending candidate
/// index so runs diff cleanly.
Permutation rank_slate(const SlateBeliefs& sb, const WeightVector& w,
                       ScoreRule rule = ScoreRule::cascade_lift);

/// Exploration outcome: the (possibly modified) display order, plus the
/// 1-based candidate index that was promoted to the top, if any.
struct ExploreResult {
    Permutation perm;
    std::optional<int> promoted_candidate;
};

/// With probability epsilon promotes one uniformly random candidate to the
/// top display position, keeping the relative order of everything else.
ExploreResult explore(const Permutation& perm, double epsilon, RandomStream& rng);

/// Deterministic promotion used by explore: moves the given candidate
/// (1-based) to the front, preserving relative order of the rest.
Permutation promote_to_top(const Permutation& perm, int candidate);

/// Expected slate value of showing `perm`:
///   <r_abd, w> + sum_i P_i(perm) * <r_lift of item at position i, w>
/// with P_i the cascade click-position probabilities of the permuted slate.
double slate_value(const SlateBeliefs& sb, const Permutation& perm, const WeightVector& w);

/// Enumerates all n! display orders and returns one maximizing slate_value,
/// ties broken toward the lexicographically first order. Verification oracle
/// only; refuses n > 8.
std::pair<Permutation, double> brute_force_best(const SlateBeliefs& sb, const WeightVector& w);

}  // namespace lrf
