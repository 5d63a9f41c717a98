#pragma once

#include "lrf/random.hpp"
#include "lrf/types.hpp"

namespace lrf {
namespace cascade {

/// Floor applied to an outcome probability before taking its log, keeping
/// cross-entropy losses finite when a model assigns ~0 to an observed
/// outcome.
inline constexpr double kProbFloor = 1e-9;

/// Per-position interaction probabilities of one displayed slate. Entry i is
/// the probability of the event when the user inspects position i+1:
/// click with p_clk[i], abandon with p_abd[i], otherwise continue.
/// p_clk[i] + p_abd[i] = 1 exactly is allowed (continuation probability 0);
/// anything above 1 is rejected at construction, never clamped.
struct SlateProbs {
    Vector p_clk;
    Vector p_abd;

    SlateProbs(Vector clk, Vector abd);

    int n() const { return static_cast<int>(p_clk.size()); }
};

/// Probability of each click position under the sequential inspection
/// process. Index i in 1..n holds
///   prod_{j<i} (1 - p_clk[j] - p_abd[j]) * p_clk[i],
/// index 0 holds the abandonment probability 1 - sum of the others.
/// Entries are in [0,1] and sum to 1 within 1e-12.
Vector click_position_probs(const SlateProbs& sp);

/// Samples the inspection process position by position; returns the click
/// position in 0..n (0 = no click).
int sample_interaction(const SlateProbs& sp, RandomStream& rng);

/// log of click_position_probs(sp)[click_pos], floored at kProbFloor.
double log_likelihood(const SlateProbs& sp, int click_pos);

}  // namespace cascade
}  // namespace lrf
