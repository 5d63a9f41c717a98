#include "lrf/ranker.hpp"

#include "lrf/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace lrf {

namespace {

cascade::SlateProbs permuted_probs(const SlateBeliefs& sb, const Permutation& perm) {
    const int n = sb.n();
    Vector clk(n), abd(n);
    for (int pos = 0; pos < n; ++pos) {
        const ItemBeliefs& b = sb.items[static_cast<std::size_t>(perm.candidate_at(pos))];
        clk[pos] = b.p_clk;
        abd[pos] = b.p_abd;
    }
    return cascade::SlateProbs(std::move(clk), std::move(abd));
}

}  // namespace

void validate(const ItemBeliefs& b) {
    if (!(b.p_clk >= 0.0 && b.p_abd >= 0.0 && b.p_clk + b.p_abd <= 1.0))
        throw ValidationError("item beliefs: probabilities must be nonnegative with sum <= 1");
    if (!b.r_lift.allFinite()) throw ValidationError("item beliefs: non-finite lift");
}

void validate(const SlateBeliefs& sb) {
    if (sb.items.empty()) throw ValidationError("slate beliefs: empty candidate list");
    for (const auto& b : sb.items) {
        validate(b);
        if (b.r_lift.size() != sb.r_abd.size())
            throw ValidationError("slate beliefs: reward dimension mismatch");
    }
}

const char* to_string(ScoreRule rule) {
    switch (rule) {
        case ScoreRule::cascade_lift: return "cascade_lift";
        case ScoreRule::ctr_lift: return "ctr_lift";
        case ScoreRule::pure_ctr: return "pure_ctr";
    }
    return "?";
}

ScoreRule score_rule_from_string(const std::string& s) {
    if (s == "cascade_lift") return ScoreRule::cascade_lift;
    if (s == "ctr_lift") return ScoreRule::ctr_lift;
    if (s == "pure_ctr") return ScoreRule::pure_ctr;
    throw ValidationError("unknown score rule: " + s);
}

double item_score(const ItemBeliefs& b, const WeightVector& w) {
    return item_score(b, w, ScoreRule::cascade_lift);
}

double item_score(const ItemBeliefs& b, const WeightVector& w, ScoreRule rule) {
    switch (rule) {
        case ScoreRule::cascade_lift: {
            const double denom = b.p_clk + b.p_abd;
            if (denom == 0.0) return 0.0;
            return b.p_clk / denom * b.r_lift.dot(w.vec());
        }
        case ScoreRule::ctr_lift:
            return b.p_clk * b.r_lift.dot(w.vec());
        case ScoreRule::pure_ctr:
            return b.p_clk;
    }
    throw ContractViolation("unknown score rule");
}

Permutation rank_slate(const SlateBeliefs& sb, const WeightVector& w, ScoreRule rule) {
    const int n = sb.n();
    std::vector<double> scores(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        scores[static_cast<std::size_t>(i)] = item_score(sb.items[static_cast<std::size_t>(i)], w, rule);

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 1);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return scores[static_cast<std::size_t>(a - 1)] > scores[static_cast<std::size_t>(b - 1)];
    });
    return Permutation(std::move(order));
}

Permutation promote_to_top(const Permutation& perm, int candidate) {
    if (candidate < 1 || candidate > perm.n())
        throw ContractViolation("promote_to_top: candidate index out of range");
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(perm.n()));
    order.push_back(candidate);
    for (const int idx : perm.order())
        if (idx != candidate) order.push_back(idx);
    return Permutation(std::move(order));
}

ExploreResult explore(const Permutation& perm, double epsilon, RandomStream& rng) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw ValidationError("exploration probability must lie in [0,1]");
    if (epsilon > 0.0 && rng.uniform01() < epsilon) {
        const int candidate = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(perm.n()))) + 1;
        return ExploreResult{promote_to_top(perm, candidate), candidate};
    }
    return ExploreResult{perm, std::nullopt};
}

double slate_value(const SlateBeliefs& sb, const Permutation& perm, const WeightVector& w) {
    const Vector probs = cascade::click_position_probs(permuted_probs(sb, perm));
    double value = sb.r_abd.dot(w.vec());
    for (int pos = 0; pos < sb.n(); ++pos)
        value += probs[pos + 1] * sb.items[static_cast<std::size_t>(perm.candidate_at(pos))].r_lift.dot(w.vec());
    return value;
}

std::pair<Permutation, double> brute_force_best(const SlateBeliefs& sb, const WeightVector& w) {
    const int n = sb.n();
    if (n > 8)
        throw RefusalError("brute_force_best: n = " + std::to_string(n) +
                           " exceeds the factorial guard (8)");
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 1);

    std::vector<int> best_order = order;
    double best_value = slate_value(sb, Permutation(order), w);
    while (std::next_permutation(order.begin(), order.end())) {
        const double value = slate_value(sb, Permutation(order), w);
        if (value > best_value) {
            best_value = value;
            best_order = order;
        }
    }
    return {Permutation(std::move(best_order)), best_value};
}

}  // namespace lrf
