#include "lrf/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lrf {
namespace cascade {

SlateProbs::SlateProbs(Vector clk, Vector abd) : p_clk(std::move(clk)), p_abd(std::move(abd)) {
    if (p_clk.size() != p_abd.size())
        throw ValidationError("slate probabilities: p_clk and p_abd lengths differ");
    if (p_clk.size() == 0) throw ValidationError("slate probabilities: empty slate");
    for (Eigen::Index i = 0; i < p_clk.size(); ++i) {
        const double c = p_clk[i];
        const double a = p_abd[i];
        if (!(std::isfinite(c) && std::isfinite(a)) || c < 0.0 || c > 1.0 || a < 0.0 || a > 1.0)
            throw ValidationError("slate probabilities: entry outside [0,1] at position " +
                                  std::to_string(i + 1));
        if (c + a > 1.0)
            throw ValidationError("slate probabilities: p_clk + p_abd > 1 at position " +
                                  std::to_string(i + 1));
    }
}

Vector click_position_probs(const SlateProbs& sp) {
    const int n = sp.n();
    Vector probs = Vector::Zero(n + 1);
    // Running prefix product of continuation probabilities; n is small, no
    // underflow concern.
    double reach = 1.0;
    double clicked_mass = 0.0;
    for (int i = 0; i < n; ++i) {
        probs[i + 1] = reach * sp.p_clk[i];
        clicked_mass += probs[i + 1];
        reach *= 1.0 - sp.p_clk[i] - sp.p_abd[i];
    }
    probs[0] = std::max(0.0, 1.0 - clicked_mass);
    return probs;
}

int sample_interaction(const SlateProbs& sp, RandomStream& rng) {
    const int n = sp.n();
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        if (u < sp.p_clk[i]) return i + 1;
        if (u < sp.p_clk[i] + sp.p_abd[i]) return 0;
    }
    return 0;
}

double log_likelihood(const SlateProbs& sp, int click_pos) {
    if (click_pos < 0 || click_pos > sp.n())
        throw ContractViolation("log_likelihood: click position " + std::to_string(click_pos) +
                                " outside 0.." + std::to_string(sp.n()));
    const Vector probs = click_position_probs(sp);
    return std::log(std::max(probs[click_pos], kProbFloor));
}

}  // namespace cascade
}  // namespace lrf
