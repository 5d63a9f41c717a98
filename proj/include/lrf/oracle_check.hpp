#pragma once

#include "lrf/random.hpp"
#include "lrf/ranker.hpp"

#include <string>

namespace lrf {

/// One randomly drawn ranking instance for the exhaustive-enumeration
/// agreement suite.
struct OracleInstance {
    SlateBeliefs sb;
    WeightVector w;
};

/// Draws an instance with n in 2..6 candidates, m in 1..3 objectives, lifts
/// uniform in [-5, 5], and deliberate degenerate probability edges
/// (p_clk + p_abd equal to 0 or exactly 1) mixed in.
OracleInstance random_oracle_instance(RandomStream& rng);

/// True when the sort-rule permutation attains the enumerated optimum within
/// tol. `gap_out`, when given, receives optimum minus achieved value.
bool check_instance(const OracleInstance& inst, ScoreRule rule, double tol,
                    double* gap_out = nullptr);

std::string instance_to_json(const OracleInstance& inst);
OracleInstance instance_from_json(const std::string& text);

struct OracleSuiteResult {
    int ranking_cases = 0;
    int ranking_failures = 0;
    int normalization_cases = 0;
    int normalization_failures = 0;
    std::string first_failure_json;  // empty when everything passed

    bool ok() const { return ranking_failures == 0 && normalization_failures == 0; }
};

/// Runs `cases` random ranking instances against the enumeration oracle plus
/// the same number of cascade normalization checks (random valid slates with
/// n in 1..20; position probabilities must sum to 1 within 1e-12). `rule`
/// is the scoring rule under test (anything but cascade_lift is expected to
/// fail; used to prove the checker catches an injected bug).
OracleSuiteResult run_oracle_suite(int cases, std::uint64_t seed,
                                   ScoreRule rule = ScoreRule::cascade_lift);

}  // namespace lrf
