#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rsnell/errors.hpp"
#include "rsnell/snell.hpp"
#include "testutil.hpp"

#include <cmath>
#include <random>

using namespace rsnell;
using namespace rsnell::testutil;

namespace {

// Uncertain-volatility one-period set on the {2, 0.5} tree.
TreeModel uv_one_period() {
    TreeModel m = one_period_model();
    m.family.local[0] = {{1.0 / 3.0, 2.0 / 3.0}, {0.4, 0.6}};
    return m;
}

} // namespace

TEST_CASE("classical envelope: constant payoff stays constant") {
    std::mt19937_64 rng(1);
    TreeModel m = random_model(rng, RandomModelOptions{});
    for (double& v : m.payoff) v = 0.75;
    Measure mu = select_uniform_mixture(m.tree, m.family);
    for (double y : classical_snell(m.tree, mu, m.payoff))
        CHECK(y == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("classical envelope: one-period martingale call is worth 1/3") {
    TreeModel m = one_period_model();
    Measure mu = select_extreme(m.tree, m.family, 0);
    ScalarProcess y = classical_snell(m.tree, mu, m.payoff);
    CHECK(y[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("classical envelope: decreasing payoff stops immediately") {
    TreeModel m = chain_model(3);
    m.payoff = {4.0, 3.0, 2.0, 1.0};
    Measure mu = select_extreme(m.tree, m.family, 0);
    ScalarProcess y = classical_snell(m.tree, mu, m.payoff);
    CHECK(y[0] == doctest::Approx(4.0));
    ExerciseRule rule = optimal_exercise(m.tree, y, m.payoff);
    CHECK(rule.stops(0));
}

TEST_CASE("robust envelope: singleton family equals the classical envelope") {
    std::mt19937_64 rng(2);
    RandomModelOptions opt;
    opt.max_extremes = 1;
    for (int trial = 0; trial < 20; ++trial) {
        TreeModel m = random_model(rng, opt);
        Measure mu = select_extreme(m.tree, m.family, 0);
        ScalarProcess robust = robust_snell(m.tree, m.family, m.payoff);
        ScalarProcess classical = classical_snell(m.tree, mu, m.payoff);
        for (size_t u = 0; u < robust.size(); ++u)
            CHECK(robust[u] == doctest::Approx(classical[u]).epsilon(1e-14));
    }
}

TEST_CASE("robust envelope: two-candidate uncertain volatility picks 0.4") {
    TreeModel m = uv_one_period();
    ScalarProcess y = robust_snell(m.tree, m.family, m.payoff);
    CHECK(y[0] == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("robust envelope: zero payoff prices to zero") {
    TreeModel m = uv_one_period();
    m.payoff = {0.0, 0.0, 0.0};
    for (double y : robust_snell(m.tree, m.family, m.payoff)) CHECK(y == 0.0);
}

TEST_CASE("brute force agrees with hand examples") {
    SUBCASE("singleton one-period family") {
        TreeModel m = one_period_model();
        Measure mu = select_extreme(m.tree, m.family, 0);
        CHECK(brute_force_value(m.tree, m.family, m.payoff) ==
              doctest::Approx(classical_snell(m.tree, mu, m.payoff)[0]));
    }
    SUBCASE("uncertain volatility 0.4 example") {
        TreeModel m = uv_one_period();
        CHECK(brute_force_value(m.tree, m.family, m.payoff) == doctest::Approx(0.4));
    }
    SUBCASE("cap exceeded is an error") {
        TreeModel m = uv_one_period();
        CHECK_THROWS_AS(brute_force_value(m.tree, m.family, m.payoff, 3.0),
                        CapExceededError);
    }
}

TEST_CASE("optimal exercise follows first contact") {
    SUBCASE("constant payoff stops at the root") {
        TreeModel m = one_period_model();
        m.payoff = {1.0, 1.0, 1.0};
        ScalarProcess y = robust_snell(m.tree, m.family, m.payoff);
        ExerciseRule rule = optimal_exercise(m.tree, y, m.payoff);
        CHECK(rule.stops(0));
    }
    SUBCASE("the 0.4 example continues at the root") {
        TreeModel m = uv_one_period();
        ScalarProcess y = robust_snell(m.tree, m.family, m.payoff);
        ExerciseRule rule = optimal_exercise(m.tree, y, m.payoff);
        CHECK(!rule.stops(0));
        CHECK(rule.stops(1));
        CHECK(rule.stops(2));
    }
}

TEST_CASE("supermartingale check") {
    TreeModel m = chain_model(2);
    Measure mu = select_extreme(m.tree, m.family, 0);
    SUBCASE("strictly increasing deterministic payoff is not a supermartingale") {
        ScalarProcess y = {1.0, 2.0, 3.0};
        CHECK(!check_supermartingale(m.tree, y, mu));
    }
    SUBCASE("constants always pass") {
        ScalarProcess y = {1.0, 1.0, 1.0};
        CHECK(check_supermartingale(m.tree, y, mu));
    }
}

TEST_CASE("oracle equivalence on randomized trees") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 120; ++trial) {
        TreeModel m = random_model(rng, RandomModelOptions{});
        const double robust = robust_snell(m.tree, m.family, m.payoff)[m.tree.root];
        const double oracle = brute_force_value(m.tree, m.family, m.payoff);
        CHECK(std::abs(robust - oracle) <= 1e-12);
    }
}

TEST_CASE("robust envelope dominates every extreme-selection classical envelope") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> coin(0, 1 << 20);
    for (int trial = 0; trial < 30; ++trial) {
        TreeModel m = random_model(rng, RandomModelOptions{});
        ScalarProcess robust = robust_snell(m.tree, m.family, m.payoff);
        const auto interior = m.tree.interior();
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<int> pick;
            for (size_t i = 0; i < interior.size(); ++i) pick.push_back(coin(rng));
            Measure mu = measure_from_selection(m.tree, m.family, pick);
            ScalarProcess classical = classical_snell(m.tree, mu, m.payoff);
            for (size_t u = 0; u < robust.size(); ++u)
                CHECK(robust[u] >= classical[u] - 1e-12);
            CHECK(check_supermartingale(m.tree, robust, mu));
        }
        // The supermartingale property is per-node, so checking every extreme
        // vector at every node covers every product selection.
        for (int u : interior)
            for (const Vec& p : m.family.at(u))
                CHECK(robust[u] >= step_expectation(m.tree, u, p, robust) - 1e-9);
    }
}

TEST_CASE("robust envelope is minimal: any downward dent breaks a property") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        TreeModel m = random_model(rng, RandomModelOptions{});
        ScalarProcess y = robust_snell(m.tree, m.family, m.payoff);
        std::uniform_int_distribution<int> node_pick(0, m.tree.node_count() - 1);
        ScalarProcess dented = y;
        const int u = node_pick(rng);
        dented[u] -= 1e-6;

        bool dominates = true;
        for (size_t v = 0; v < dented.size(); ++v)
            dominates = dominates && dented[v] >= m.payoff[v] - 1e-12;
        bool robust_supermart = true;
        for (int v : m.tree.interior()) {
            double best = -1e300;
            for (const Vec& p : m.family.at(v))
                best = std::max(best, step_expectation(m.tree, v, p, dented));
            robust_supermart = robust_supermart && dented[v] >= best - 1e-12;
        }
        CHECK(!(dominates && robust_supermart));
    }
}

TEST_CASE("enlarging a local set never decreases the envelope") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        TreeModel m = random_model(rng, RandomModelOptions{});
        ScalarProcess before = robust_snell(m.tree, m.family, m.payoff);

        const auto interior = m.tree.interior();
        std::uniform_int_distribution<int> pick(0, static_cast<int>(interior.size()) - 1);
        const int u = interior[pick(rng)];
        MeasureFamily enlarged = m.family;
        enlarged.local[u].push_back(
            random_prob_vector(rng, static_cast<int>(m.tree.nodes[u].succ.size())));

        ScalarProcess after = robust_snell(m.tree, enlarged, m.payoff);
        for (size_t v = 0; v < before.size(); ++v) CHECK(after[v] >= before[v] - 1e-12);
    }
}
