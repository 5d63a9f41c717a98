#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lrf/cascade.hpp"
#include "test_support.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <vector>

using namespace lrf;
using namespace lrf::cascade;
using lrf::test::make_vector;

namespace {

SlateProbs random_slate(RandomStream& rng, int max_n = 20) {
    const int n = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(max_n)));
    Vector clk(n), abd(n);
    for (int i = 0; i < n; ++i) {
        clk[i] = rng.uniform01();
        abd[i] = rng.uniform(0.0, 1.0 - clk[i]);
    }
    return SlateProbs(clk, abd);
}

/// Independent sampler of the sequential inspect/click/abandon/continue
/// process, written directly from its definition (two draws per position)
/// so it shares nothing with the production sampler.
int reference_process(const SlateProbs& sp, RandomStream& rng) {
    for (int i = 0; i < sp.n(); ++i) {
        const double total = sp.p_clk[i] + sp.p_abd[i];
        if (rng.uniform01() < total) {
            return (total > 0.0 && rng.uniform01() < sp.p_clk[i] / total) ? i + 1 : 0;
        }
    }
    return 0;
}

}  // namespace

TEST_CASE("construction rejects invalid probabilities") {
    CHECK_THROWS_AS(SlateProbs(make_vector({0.7}), make_vector({0.4})), ValidationError);
    CHECK_THROWS_AS(SlateProbs(make_vector({-0.1}), make_vector({0.4})), ValidationError);
    CHECK_THROWS_AS(SlateProbs(make_vector({0.5, 0.5}), make_vector({0.5})), ValidationError);
    // continuation probability exactly zero is allowed
    CHECK_NOTHROW(SlateProbs(make_vector({0.6}), make_vector({0.4})));
}

TEST_CASE("click position probabilities on worked slates") {
    const Vector certain = click_position_probs(SlateProbs(make_vector({1.0}), make_vector({0.0})));
    CHECK(certain[0] == 0.0);
    CHECK(certain[1] == 1.0);

    const Vector dead =
        click_position_probs(SlateProbs(make_vector({0.0, 0.0}), make_vector({0.0, 0.0})));
    CHECK(dead[0] == 1.0);
    CHECK(dead[1] == 0.0);
    CHECK(dead[2] == 0.0);

    const Vector probs =
        click_position_probs(SlateProbs(make_vector({0.5, 0.4}), make_vector({0.2, 0.1})));
    CHECK(probs[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(probs[2] == doctest::Approx(0.12).epsilon(1e-14));
    CHECK(probs[0] == doctest::Approx(0.38).epsilon(1e-14));
}

TEST_CASE("worked slate agrees with a reference simulation of the process") {
    const SlateProbs sp(make_vector({0.5, 0.4}), make_vector({0.2, 0.1}));
    const int samples = 1'000'000;
    RandomStream rng(99);
    std::vector<int> counts(3, 0);
    for (int s = 0; s < samples; ++s) ++counts[static_cast<std::size_t>(reference_process(sp, rng))];

    const Vector probs = click_position_probs(sp);
    for (int c = 0; c <= 2; ++c) {
        const double p = probs[c];
        const double freq = static_cast<double>(counts[static_cast<std::size_t>(c)]) / samples;
        const double sigma = std::sqrt(p * (1.0 - p) / samples);
        CHECK(std::abs(freq - p) <= 3.0 * sigma);
    }
}

TEST_CASE("normalization over random slates") {
    RandomStream rng(5);
    for (int rep = 0; rep < 3000; ++rep) {
        const Vector probs = click_position_probs(random_slate(rng));
        CHECK(std::abs(probs.sum() - 1.0) <= 1e-12);
        CHECK(probs.minCoeff() >= 0.0);
        CHECK(probs.maxCoeff() <= 1.0);
    }
}

TEST_CASE("prefix property: positions after i do not affect P_i") {
    RandomStream rng(6);
    for (int rep = 0; rep < 200; ++rep) {
        SlateProbs sp = random_slate(rng, 10);
        const int n = sp.n();
        if (n < 2) continue;
        const Vector before = click_position_probs(sp);
        const int cut = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        Vector clk = sp.p_clk, abd = sp.p_abd;
        for (int j = cut; j < n; ++j) {
            clk[j] = rng.uniform01();
            abd[j] = rng.uniform(0.0, 1.0 - clk[j]);
        }
        const Vector after = click_position_probs(SlateProbs(clk, abd));
        for (int i = 1; i <= cut; ++i) CHECK(after[i] == before[i]);
    }
}

TEST_CASE("sampler distribution matches the probabilities (chi-square)") {
    RandomStream rng(7);
    for (int rep = 0; rep < 3; ++rep) {
        const SlateProbs sp = random_slate(rng, 6);
        const Vector probs = click_position_probs(sp);
        const int samples = 1'000'000;
        RandomStream draw = rng.substream(static_cast<std::uint64_t>(rep));
        std::vector<int> counts(static_cast<std::size_t>(sp.n()) + 1, 0);
        for (int s = 0; s < samples; ++s)
            ++counts[static_cast<std::size_t>(sample_interaction(sp, draw))];

        double stat = 0.0;
        int dof = -1;
        for (int c = 0; c <= sp.n(); ++c) {
            const double expected = probs[c] * samples;
            if (expected < 5.0) continue;  // skip sparse cells
            const double observed = counts[static_cast<std::size_t>(c)];
            stat += (observed - expected) * (observed - expected) / expected;
            ++dof;
        }
        if (dof < 1) continue;
        const boost::math::chi_squared dist(dof);
        CHECK(stat < boost::math::quantile(dist, 0.99));
    }
}

TEST_CASE("degenerate samplers") {
    RandomStream rng(8);
    const SlateProbs abandon_now(make_vector({0.0, 0.3}), make_vector({1.0, 0.2}));
    const SlateProbs click_now(make_vector({1.0, 0.3}), make_vector({0.0, 0.2}));
    for (int s = 0; s < 200; ++s) {
        CHECK(sample_interaction(abandon_now, rng) == 0);
        CHECK(sample_interaction(click_now, rng) == 1);
    }
}

TEST_CASE("log likelihood values and the probability floor") {
    const SlateProbs certain(make_vector({1.0}), make_vector({0.0}));
    CHECK(log_likelihood(certain, 1) == 0.0);
    CHECK(log_likelihood(certain, 0) == doctest::Approx(std::log(1e-9)));

    const SlateProbs sp(make_vector({0.5, 0.4}), make_vector({0.2, 0.1}));
    CHECK(log_likelihood(sp, 2) == doctest::Approx(std::log(0.12)).epsilon(1e-12));
    CHECK_THROWS_AS(log_likelihood(sp, 3), ContractViolation);
}
