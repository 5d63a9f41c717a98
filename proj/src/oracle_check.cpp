#include "lrf/oracle_check.hpp"

#include "lrf/cascade.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace lrf {

using nlohmann::json;

OracleInstance random_oracle_instance(RandomStream& rng) {
    const int n = 2 + static_cast<int>(rng.uniform_int(5));
    const int m = 1 + static_cast<int>(rng.uniform_int(3));

    SlateBeliefs sb;
    sb.r_abd = RewardVector(m);
    for (int k = 0; k < m; ++k) sb.r_abd[k] = rng.uniform(-2.0, 2.0);
    sb.items.resize(static_cast<std::size_t>(n));
    for (auto& b : sb.items) {
        const double edge = rng.uniform01();
        if (edge < 0.1) {
            // Transparent item: never clicked, never blocks the cascade.
            b.p_clk = 0.0;
            b.p_abd = 0.0;
        } else if (edge < 0.2) {
            // Continuation probability exactly zero.
            b.p_clk = rng.uniform01();
            b.p_abd = 1.0 - b.p_clk;
        } else {
            b.p_clk = rng.uniform01();
            b.p_abd = rng.uniform(0.0, 1.0 - b.p_clk);
        }
        b.r_lift = RewardVector(m);
        for (int k = 0; k < m; ++k) b.r_lift[k] = rng.uniform(-5.0, 5.0);
    }

    Vector w(m);
    w[0] = 1.0;
    for (int k = 1; k < m; ++k) w[k] = rng.uniform(-1.0, 1.0);
    return OracleInstance{std::move(sb), WeightVector(std::move(w))};
}

bool check_instance(const OracleInstance& inst, ScoreRule rule, double tol, double* gap_out) {
    const Permutation ranked = rank_slate(inst.sb, inst.w, rule);
    const double achieved = slate_value(inst.sb, ranked, inst.w);
    const double best = brute_force_best(inst.sb, inst.w).second;
    if (gap_out) *gap_out = best - achieved;
    return best - achieved <= tol;
}

std::string instance_to_json(const OracleInstance& inst) {
    json j;
    const int n = inst.sb.n();
    const int m = static_cast<int>(inst.sb.r_abd.size());
    j["n"] = n;
    j["m"] = m;
    std::vector<double> pc, pa;
    std::vector<std::vector<double>> lifts;
    for (const auto& b : inst.sb.items) {
        pc.push_back(b.p_clk);
        pa.push_back(b.p_abd);
        lifts.emplace_back(b.r_lift.data(), b.r_lift.data() + b.r_lift.size());
    }
    j["p_clk"] = pc;
    j["p_abd"] = pa;
    j["r_lift"] = lifts;
    j["r_abd"] = std::vector<double>(inst.sb.r_abd.data(), inst.sb.r_abd.data() + m);
    j["w"] = std::vector<double>(inst.w.vec().data(), inst.w.vec().data() + m);
    return j.dump();
}

OracleInstance instance_from_json(const std::string& text) {
    const json j = json::parse(text);
    const int n = j.at("n").get<int>();
    const int m = j.at("m").get<int>();
    SlateBeliefs sb;
    const auto pc = j.at("p_clk").get<std::vector<double>>();
    const auto pa = j.at("p_abd").get<std::vector<double>>();
    const auto lifts = j.at("r_lift").get<std::vector<std::vector<double>>>();
    const auto abd = j.at("r_abd").get<std::vector<double>>();
    const auto wv = j.at("w").get<std::vector<double>>();
    if (static_cast<int>(pc.size()) != n || static_cast<int>(lifts.size()) != n ||
        static_cast<int>(abd.size()) != m)
        throw ValidationError("oracle instance: inconsistent dimensions");
    sb.r_abd = Eigen::Map<const Vector>(abd.data(), m);
    for (int i = 0; i < n; ++i) {
        ItemBeliefs b;
        b.p_clk = pc[static_cast<std::size_t>(i)];
        b.p_abd = pa[static_cast<std::size_t>(i)];
        b.r_lift = Eigen::Map<const Vector>(lifts[static_cast<std::size_t>(i)].data(), m);
        sb.items.push_back(std::move(b));
    }
    validate(sb);
    return OracleInstance{std::move(sb),
                          WeightVector(Eigen::Map<const Vector>(wv.data(), m))};
}

OracleSuiteResult run_oracle_suite(int cases, std::uint64_t seed, ScoreRule rule) {
    OracleSuiteResult result;
    RandomStream rng(seed);
    RandomStream ranking = rng.substream(1);
    RandomStream slates = rng.substream(2);

    for (int c = 0; c < cases; ++c) {
        const OracleInstance inst = random_oracle_instance(ranking);
        ++result.ranking_cases;
        if (!check_instance(inst, rule, 1e-9)) {
            ++result.ranking_failures;
            if (result.first_failure_json.empty()) result.first_failure_json = instance_to_json(inst);
        }
    }

    for (int c = 0; c < cases; ++c) {
        const int n = 1 + static_cast<int>(slates.uniform_int(20));
        Vector pc(n), pa(n);
        for (int i = 0; i < n; ++i) {
            pc[i] = slates.uniform01();
            pa[i] = slates.uniform(0.0, 1.0 - pc[i]);
        }
        const Vector probs = cascade::click_position_probs(cascade::SlateProbs(pc, pa));
        ++result.normalization_cases;
        if (std::abs(probs.sum() - 1.0) > 1e-12) ++result.normalization_failures;
    }
    return result;
}

}  // namespace lrf
