#include "rsnell/snell.hpp"

#include "rsnell/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rsnell {

double step_expectation(const ScenarioTree& tree, int node, const Vec& p,
                        const ScalarProcess& v) {
    const auto& succ = tree.nodes[node].succ;
    double e = 0.0;
    for (size_t i = 0; i < succ.size(); ++i) e += p[i] * v[succ[i]];
    return e;
}

ScalarProcess classical_snell(const ScenarioTree& tree, const Measure& measure,
                              const ScalarProcess& xi) {
    check_scalar_total(tree, xi, "classical_snell payoff");
    ScalarProcess y = xi;
    auto order = tree.by_time();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int u = *it;
        if (tree.is_terminal(u)) continue;
        if (!measure.covers(u))
            throw ModelError("classical_snell: measure misses node '" + tree.id_of(u) + "'");
        y[u] = std::max(xi[u], step_expectation(tree, u, measure.at(u), y));
    }
    return y;
}

ScalarProcess robust_snell(const ScenarioTree& tree, const MeasureFamily& family,
                           const ScalarProcess& xi) {
    check_scalar_total(tree, xi, "robust_snell payoff");
    ScalarProcess y = xi;
    auto order = tree.by_time();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int u = *it;
        if (tree.is_terminal(u)) continue;
        if (!family.covers(u))
            throw ModelError("robust_snell: family misses node '" + tree.id_of(u) + "'");
        double best = -std::numeric_limits<double>::infinity();
        for (const Vec& p : family.at(u))
            best = std::max(best, step_expectation(tree, u, p, y));
        y[u] = std::max(xi[u], best);
    }
    return y;
}

namespace {

// E^P[xi_tau] for one selection and one stop rule: weight each first-stop
// node by its path probability.
double stopped_expectation(const ScenarioTree& tree, const std::vector<const Vec*>& sel,
                           const std::vector<char>& stop, const ScalarProcess& xi) {
    double acc = 0.0;
    std::vector<std::pair<int, double>> stack{{tree.root, 1.0}};
    while (!stack.empty()) {
        auto [u, prob] = stack.back();
        stack.pop_back();
        if (stop[u] || tree.is_terminal(u)) {
            acc += prob * xi[u];
            continue;
        }
        const auto& succ = tree.nodes[u].succ;
        const Vec& p = *sel[u];
        for (size_t i = 0; i < succ.size(); ++i)
            stack.emplace_back(succ[i], prob * p[i]);
    }
    return acc;
}

} // namespace

double brute_force_value(const ScenarioTree& tree, const MeasureFamily& family,
                         const ScalarProcess& xi, double cap) {
    check_scalar_total(tree, xi, "brute_force payoff");
    const std::vector<int> interior = tree.interior();
    const int k = static_cast<int>(interior.size());

    double n_selections = 1.0;
    for (int u : interior) {
        if (!family.covers(u))
            throw ModelError("brute_force: family misses node '" + tree.id_of(u) + "'");
        n_selections *= static_cast<double>(family.at(u).size());
    }
    const double n_rules = std::ldexp(1.0, k); // 2^k
    if (n_selections * n_rules > cap || k >= 63)
        throw CapExceededError("brute_force: selections x rules = " +
                               std::to_string(n_selections * n_rules) +
                               " exceeds cap " + std::to_string(cap));

    std::vector<int> odometer(k, 0);
    std::vector<const Vec*> sel(tree.nodes.size(), nullptr);
    for (int i = 0; i < k; ++i) sel[interior[i]] = &family.at(interior[i])[0];

    double best = -std::numeric_limits<double>::infinity();
    std::vector<char> stop(tree.nodes.size(), 0);
    const std::uint64_t rule_count = std::uint64_t(1) << k;

    while (true) {
        for (std::uint64_t mask = 0; mask < rule_count; ++mask) {
            for (int i = 0; i < k; ++i) stop[interior[i]] = (mask >> i) & 1u;
            best = std::max(best, stopped_expectation(tree, sel, stop, xi));
        }
        // advance the selection odometer
        int pos = 0;
        while (pos < k) {
            const auto& extremes = family.at(interior[pos]);
            if (++odometer[pos] < static_cast<int>(extremes.size())) {
                sel[interior[pos]] = &extremes[odometer[pos]];
                break;
            }
            odometer[pos] = 0;
            sel[interior[pos]] = &extremes[0];
            ++pos;
        }
        if (pos == k) break;
    }
    return best;
}

ExerciseRule optimal_exercise(const ScenarioTree& tree, const ScalarProcess& snell,
                              const ScalarProcess& xi) {
    ExerciseRule rule;
    rule.stop.assign(tree.nodes.size(), 0);
    for (int u = 0; u < tree.node_count(); ++u) {
        const double tol = 1e-9 * (1.0 + std::abs(xi[u]));
        rule.stop[u] = tree.is_terminal(u) || std::abs(snell[u] - xi[u]) <= tol;
    }
    return rule;
}

bool check_supermartingale(const ScenarioTree& tree, const ScalarProcess& y,
                           const Measure& measure) {
    check_scalar_total(tree, y, "check_supermartingale");
    for (int u = 0; u < tree.node_count(); ++u) {
        if (tree.is_terminal(u)) continue;
        if (y[u] < step_expectation(tree, u, measure.at(u), y) - 1e-9) return false;
    }
    return true;
}

} // namespace rsnell
