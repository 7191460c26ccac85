// Shared helpers for the test suites: deterministic random tree/model
// generation and a few hand-built fixtures reused across files.
#pragma once

#include "rsnell/measure.hpp"
#include "rsnell/model_io.hpp"
#include "rsnell/tree.hpp"

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsnell::testutil {

struct RandomModelOptions {
    int max_depth = 3;
    int max_succ = 3;
    int max_extremes = 3;
    int dim = 1;
    bool arbitrage_free = false; // shift increments so 0 lies in conv{dS}
    double dt = 1.0;
    double product_cap = 2e5;    // #selections x #rules budget (brute force)
};

inline Vec random_prob_vector(std::mt19937_64& rng, int m) {
    std::exponential_distribution<double> expo(1.0);
    Vec p(m);
    double sum = 0.0;
    for (double& w : p) {
        w = expo(rng) + 1e-3;
        sum += w;
    }
    for (double& w : p) w /= sum;
    // Re-normalize exactly so the 1e-12 validation never trips.
    double s2 = 0.0;
    for (size_t i = 0; i + 1 < p.size(); ++i) s2 += p[i];
    p.back() = 1.0 - s2;
    return p;
}

inline TreeModel random_model(std::mt19937_64& rng, const RandomModelOptions& opt) {
    for (int attempt = 0;; ++attempt) {
        std::uniform_int_distribution<int> depth_pick(1, opt.max_depth);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const int depth = depth_pick(rng);

        TreeModel model;
        ScenarioTree& tree = model.tree;
        tree.horizon = depth;
        tree.dim = opt.dim;

        TreeNode root;
        root.id = "n0";
        root.t = 0;
        root.dt = opt.dt;
        for (int j = 0; j < opt.dim; ++j) root.price.push_back(0.5 + 1.5 * unit(rng));
        tree.nodes.push_back(root);
        tree.root = 0;

        std::vector<int> frontier{0};
        for (int t = 1; t <= depth; ++t) {
            std::vector<int> next;
            for (int parent : frontier) {
                std::uniform_int_distribution<int> succ_pick(1, opt.max_succ);
                const int m = succ_pick(rng);
                std::vector<Vec> incs(m, Vec(opt.dim, 0.0));
                if (m > 1)
                    for (auto& inc : incs)
                        for (double& x : inc) x = 2.0 * unit(rng) - 1.0;
                if (opt.arbitrage_free && m > 1) {
                    Vec w = random_prob_vector(rng, m);
                    Vec shift(opt.dim, 0.0);
                    for (int i = 0; i < m; ++i)
                        for (int j = 0; j < opt.dim; ++j) shift[j] += w[i] * incs[i][j];
                    for (int i = 0; i < m; ++i)
                        for (int j = 0; j < opt.dim; ++j) incs[i][j] -= shift[j];
                }
                for (int i = 0; i < m; ++i) {
                    TreeNode n;
                    n.id = tree.nodes[parent].id + "." + std::to_string(i);
                    n.t = t;
                    n.parent = parent;
                    n.dt = opt.dt;
                    n.price = tree.nodes[parent].price;
                    for (int j = 0; j < opt.dim; ++j) n.price[j] += incs[i][j];
                    const int idx = tree.node_count();
                    tree.nodes.push_back(std::move(n));
                    tree.nodes[parent].succ.push_back(idx);
                    next.push_back(idx);
                }
            }
            frontier = std::move(next);
        }

        model.family.local.resize(tree.nodes.size());
        double selections = 1.0;
        int interior_count = 0;
        for (int u = 0; u < tree.node_count(); ++u) {
            if (tree.is_terminal(u)) continue;
            ++interior_count;
            std::uniform_int_distribution<int> ex_pick(1, opt.max_extremes);
            const int k = ex_pick(rng);
            for (int e = 0; e < k; ++e)
                model.family.local[u].push_back(
                    random_prob_vector(rng, static_cast<int>(tree.nodes[u].succ.size())));
            selections *= k;
        }

        model.payoff = make_scalar(tree);
        for (double& v : model.payoff) v = 2.0 * unit(rng) - 1.0;

        if (opt.product_cap > 0 &&
            selections * std::ldexp(1.0, interior_count) > opt.product_cap) {
            if (attempt > 200) throw std::runtime_error("random_model: cap unreachable");
            continue; // resample a smaller shape
        }
        tree.validate();
        validate_family(tree, model.family);
        return model;
    }
}

/// One-period tree 1 -> {2, 0.5} with a single martingale vector (1/3, 2/3)
/// and payoff (S - 1)^+ at the leaves.
inline TreeModel one_period_model() {
    TreeModel m;
    m.tree.horizon = 1;
    m.tree.dim = 1;
    m.tree.root = 0;
    TreeNode r{"r", 0, -1, {1, 2}, {1.0}, 1.0};
    TreeNode u{"u", 1, 0, {}, {2.0}, 1.0};
    TreeNode d{"d", 1, 0, {}, {0.5}, 1.0};
    m.tree.nodes = {r, u, d};
    m.family.local.resize(3);
    m.family.local[0] = {{1.0 / 3.0, 2.0 / 3.0}};
    m.payoff = {0.0, 1.0, 0.0};
    return m;
}

/// Deterministic chain of the given length with constant price.
inline TreeModel chain_model(int length, double dt = 1.0) {
    TreeModel m;
    m.tree.horizon = length;
    m.tree.dim = 1;
    m.tree.root = 0;
    for (int t = 0; t <= length; ++t) {
        TreeNode n;
        n.id = "c" + std::to_string(t);
        n.t = t;
        n.parent = t == 0 ? -1 : t - 1;
        n.price = {1.0};
        n.dt = dt;
        if (t < length) n.succ = {t + 1};
        m.tree.nodes.push_back(n);
    }
    m.family.local.resize(m.tree.nodes.size());
    for (int t = 0; t < length; ++t) m.family.local[t] = {{1.0}};
    m.payoff = make_scalar(m.tree);
    return m;
}

inline Measure measure_from_selection(const ScenarioTree& tree, const MeasureFamily& family,
                                      const std::vector<int>& pick) {
    Measure m;
    m.sel.resize(tree.nodes.size());
    int i = 0;
    for (int u : tree.interior()) {
        const auto& ex = family.at(u);
        m.sel[u] = ex[pick[i++] % ex.size()];
    }
    return m;
}

} // namespace rsnell::testutil
