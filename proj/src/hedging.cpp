#include "rsnell/hedging.hpp"

#include "rsnell/errors.hpp"
#include "rsnell/simplex.hpp"
#include "rsnell/snell.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace rsnell {

namespace {

constexpr double kBindTol = 1e-9;
constexpr double kVertexFeasTol = 1e-10;
constexpr double kVertexDedupTol = 1e-9;

std::vector<Vec> edge_increments(const ScenarioTree& tree, int node) {
    std::vector<Vec> ds;
    ds.reserve(tree.nodes[node].succ.size());
    for (int s : tree.nodes[node].succ) ds.push_back(tree.increment(s));
    return ds;
}

} // namespace

NodeHedge node_hedge(const std::vector<Vec>& increments, const Vec& targets,
                     const std::string& node_id) {
    if (increments.empty() || increments.size() != targets.size())
        throw ModelError("node_hedge: empty or mismatched inputs");
    const int m = static_cast<int>(increments.size());
    const int d = static_cast<int>(increments[0].size());

    // Dual standard form: max p.V s.t. 1'p = 1, sum p_i dS_i = 0, p >= 0.
    Mat A(d + 1, Vec(m, 0.0));
    Vec b(d + 1, 0.0);
    b[0] = 1.0;
    for (int i = 0; i < m; ++i) {
        A[0][i] = 1.0;
        for (int j = 0; j < d; ++j) A[j + 1][i] = increments[i][j];
    }
    SimplexResult lp = simplex_max(A, b, targets);
    if (lp.status != SimplexResult::Status::Optimal)
        throw ArbitrageError("node_hedge: one-step capital unbounded below; 0 outside "
                             "conv{dS} at node '" + node_id + "'",
                             node_id);

    NodeHedge h;
    h.y = lp.dual[0];
    h.strategy.assign(lp.dual.begin() + 1, lp.dual.end());
    h.witness = lp.x;
    double scale = 1.0;
    for (double v : targets) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < m; ++i) {
        const double slack = h.y + dot(h.strategy, increments[i]) - targets[i];
        if (slack <= kBindTol * scale) h.active.push_back(i);
    }
    if (h.active.empty())
        throw InternalError("node_hedge: optimum without a binding constraint");
    return h;
}

HedgeReport superhedge(const ScenarioTree& tree, const ScalarProcess& xi) {
    check_scalar_total(tree, xi, "superhedge payoff");

    HedgeReport rep;
    rep.strategy.assign(tree.nodes.size(), Vec{});
    rep.consumption = make_scalar(tree, 0.0);

    ScalarProcess value = xi;
    auto order = tree.by_time();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int u = *it;
        if (tree.is_terminal(u)) continue;
        Vec targets;
        for (int s : tree.nodes[u].succ) targets.push_back(value[s]);
        NodeHedge h = node_hedge(edge_increments(tree, u), targets, tree.id_of(u));
        rep.strategy[u] = h.strategy;
        value[u] = std::max(xi[u], h.y);
    }
    rep.price = value[tree.root];

    // Consumption along each edge: portfolio value minus the target carried.
    for (int u = 0; u < tree.node_count(); ++u) {
        if (tree.is_terminal(u)) continue;
        for (int s : tree.nodes[u].succ)
            rep.consumption[s] = value[u] + dot(rep.strategy[u], tree.increment(s)) - value[s];
    }

    rep.duality_gap = duality_gap(tree, xi, saturate(tree));
    rep.certified = rep.duality_gap <= 1e-8;
    return rep;
}

bool verify_superhedge(const ScenarioTree& tree, const ScalarProcess& xi,
                       double y0, const VectorProcess& strategy) {
    ScalarProcess wealth = make_scalar(tree);
    for (int u : tree.by_time()) {
        if (u == tree.root) {
            wealth[u] = y0;
        } else {
            const int p = tree.nodes[u].parent;
            if (strategy[p].size() != static_cast<size_t>(tree.dim))
                throw ModelError("verify_superhedge: strategy misses node '" + tree.id_of(p) + "'");
            wealth[u] = wealth[p] + dot(strategy[p], tree.increment(u));
        }
        if (wealth[u] < xi[u] - 1e-9) return false;
    }
    return true;
}

std::vector<Vec> polytope_vertices(const Mat& eq_lhs, const Vec& eq_rhs) {
    const int rows = static_cast<int>(eq_lhs.size());
    const int m = rows == 0 ? 0 : static_cast<int>(eq_lhs[0].size());
    std::vector<Vec> vertices;

    // Enumerate candidate supports of size <= #rows; a vertex is a basic
    // feasible solution, so some such support realizes it.
    std::vector<int> support;
    auto try_support = [&]() {
        Mat sub(rows, Vec(support.size(), 0.0));
        for (int r = 0; r < rows; ++r)
            for (size_t k = 0; k < support.size(); ++k) sub[r][k] = eq_lhs[r][support[k]];
        auto sol = solve_unique(sub, eq_rhs, kVertexFeasTol);
        if (!sol) return;
        Vec p(m, 0.0);
        for (size_t k = 0; k < support.size(); ++k) {
            if ((*sol)[k] < -kVertexFeasTol) return;
            p[support[k]] = std::max((*sol)[k], 0.0);
        }
        Vec residual = mat_vec(eq_lhs, p);
        for (int r = 0; r < rows; ++r)
            if (std::abs(residual[r] - eq_rhs[r]) > 1e-9) return;
        for (const Vec& q : vertices) {
            double dist = 0.0;
            for (int i = 0; i < m; ++i) dist = std::max(dist, std::abs(q[i] - p[i]));
            if (dist <= kVertexDedupTol) return;
        }
        vertices.push_back(std::move(p));
    };

    std::function<void(int, int)> rec = [&](int start, int remaining) {
        if (!support.empty()) try_support();
        if (remaining == 0) return;
        for (int i = start; i < m; ++i) {
            support.push_back(i);
            rec(i + 1, remaining - 1);
            support.pop_back();
        }
    };
    rec(0, std::min(rows, m));

    std::sort(vertices.begin(), vertices.end());
    return vertices;
}

std::vector<Vec> martingale_polytope_vertices(const std::vector<Vec>& increments) {
    if (increments.empty())
        throw ModelError("martingale_polytope_vertices: empty increment list");
    const int m = static_cast<int>(increments.size());
    const int d = static_cast<int>(increments[0].size());
    Mat eq(d + 1, Vec(m, 0.0));
    Vec rhs(d + 1, 0.0);
    rhs[0] = 1.0;
    for (int i = 0; i < m; ++i) {
        eq[0][i] = 1.0;
        for (int j = 0; j < d; ++j) eq[j + 1][i] = increments[i][j];
    }
    return polytope_vertices(eq, rhs);
}

MeasureFamily saturate(const ScenarioTree& tree) {
    MeasureFamily family;
    family.local.resize(tree.nodes.size());
    for (int u = 0; u < tree.node_count(); ++u) {
        if (tree.is_terminal(u)) continue;
        auto verts = martingale_polytope_vertices(edge_increments(tree, u));
        if (verts.empty())
            throw ArbitrageError("saturate: empty martingale polytope at node '" +
                                 tree.id_of(u) + "'",
                                 tree.id_of(u));
        family.insert({u, std::move(verts)});
    }
    return family;
}

std::vector<int> full_support_warnings(const ScenarioTree& tree,
                                       const MeasureFamily& saturated) {
    std::vector<int> flagged;
    for (int u = 0; u < tree.node_count(); ++u) {
        if (!saturated.covers(u)) continue;
        const size_t m = tree.nodes[u].succ.size();
        std::vector<char> hit(m, 0);
        for (const Vec& p : saturated.at(u))
            for (size_t i = 0; i < m; ++i)
                if (p[i] > kVertexDedupTol) hit[i] = 1;
        if (std::find(hit.begin(), hit.end(), 0) != hit.end()) flagged.push_back(u);
    }
    return flagged;
}

double duality_gap(const ScenarioTree& tree, const ScalarProcess& xi,
                   const MeasureFamily& family) {
    ScalarProcess primal = robust_snell(tree, family, xi);

    // Dual side: plain backward LP recursion, without the report plumbing.
    ScalarProcess value = xi;
    auto order = tree.by_time();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int u = *it;
        if (tree.is_terminal(u)) continue;
        Vec targets;
        for (int s : tree.nodes[u].succ) targets.push_back(value[s]);
        NodeHedge h = node_hedge(edge_increments(tree, u), targets, tree.id_of(u));
        value[u] = std::max(xi[u], h.y);
    }
    return std::abs(value[tree.root] - primal[tree.root]);
}

bool optional_decomposition_check(const ScenarioTree& tree, const MeasureFamily& family,
                                  const ScalarProcess& y, const VectorProcess& strategy) {
    check_scalar_total(tree, y, "optional_decomposition_check");
    for (int u = 0; u < tree.node_count(); ++u) {
        if (tree.is_terminal(u)) continue;
        double best = -std::numeric_limits<double>::infinity();
        for (const Vec& p : family.at(u))
            best = std::max(best, step_expectation(tree, u, p, y));
        if (y[u] < best - 1e-9) return false; // not a robust supermartingale
        for (int s : tree.nodes[u].succ)
            if (y[s] - y[u] - dot(strategy[u], tree.increment(s)) > 1e-9) return false;
    }
    return true;
}

bool families_equal(const ScenarioTree& tree, const MeasureFamily& a,
                    const MeasureFamily& b) {
    auto close = [](const Vec& x, const Vec& y) {
        if (x.size() != y.size()) return false;
        for (size_t i = 0; i < x.size(); ++i)
            if (std::abs(x[i] - y[i]) > 1e-9) return false;
        return true;
    };
    for (int u = 0; u < tree.node_count(); ++u) {
        if (a.covers(u) != b.covers(u)) return false;
        if (!a.covers(u)) continue;
        const auto& sa = a.at(u);
        const auto& sb = b.at(u);
        auto subset = [&](const std::vector<Vec>& lhs, const std::vector<Vec>& rhs) {
            for (const Vec& p : lhs) {
                bool found = false;
                for (const Vec& q : rhs)
                    if (close(p, q)) { found = true; break; }
                if (!found) return false;
            }
            return true;
        };
        if (!subset(sa, sb) || !subset(sb, sa)) return false;
    }
    return true;
}

} // namespace rsnell
