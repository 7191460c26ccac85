#include "rsnell/measure.hpp"

#include "rsnell/errors.hpp"

#include <cmath>

namespace rsnell {

void MeasureFamily::insert(LocalTransitionSet set) {
    if (set.node < 0 || set.node >= static_cast<int>(local.size()))
        throw ModelError("family: local set for unknown node");
    local[set.node] = std::move(set.extremes);
}

void check_transition_vector(const ScenarioTree& tree, int node, const Vec& p,
                             const std::string& what) {
    const TreeNode& n = tree.nodes[node];
    if (p.size() != n.succ.size())
        throw ModelError(what + ": node '" + n.id + "' vector length != successor count");
    double sum = 0.0;
    for (double w : p) {
        if (!std::isfinite(w) || w < 0.0)
            throw ModelError(what + ": node '" + n.id + "' has a negative or non-finite weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > kProbTol)
        throw ModelError(what + ": node '" + n.id + "' weights sum to " + std::to_string(sum) +
                         ", not 1 within 1e-12");
}

void validate_family(const ScenarioTree& tree, const MeasureFamily& family, int root) {
    if (family.local.size() != tree.nodes.size())
        throw ModelError("family: storage not aligned with the tree");
    if (root < 0) root = tree.root;
    for (int u : tree.subtree(root)) {
        if (tree.is_terminal(u)) {
            if (family.covers(u))
                throw ModelError("family: terminal node '" + tree.id_of(u) + "' carries a local set");
            continue;
        }
        if (!family.covers(u))
            throw ModelError("family: non-terminal node '" + tree.id_of(u) + "' has no local set");
        for (const Vec& p : family.at(u))
            check_transition_vector(tree, u, p, "family");
    }
}

void validate_measure(const ScenarioTree& tree, const Measure& measure, int root) {
    if (measure.sel.size() != tree.nodes.size())
        throw ModelError("measure: storage not aligned with the tree");
    if (root < 0) root = tree.root;
    for (int u : tree.subtree(root)) {
        if (tree.is_terminal(u)) continue;
        if (!measure.covers(u))
            throw ModelError("measure: non-terminal node '" + tree.id_of(u) + "' has no selection");
        check_transition_vector(tree, u, measure.at(u), "measure");
    }
}

MeasureFamily condition(const ScenarioTree& tree, const MeasureFamily& family, int node) {
    if (node < 0 || node >= tree.node_count())
        throw ModelError("condition: unknown node");
    MeasureFamily out;
    out.local.resize(tree.nodes.size());
    for (int u : tree.subtree(node))
        if (!tree.is_terminal(u)) {
            if (!family.covers(u))
                throw ModelError("condition: family does not cover node '" + tree.id_of(u) + "'");
            out.local[u] = family.at(u);
        }
    return out;
}

Measure paste(const ScenarioTree& tree, const MeasureFamily& family,
              const Measure& outer, int t, const std::map<int, Measure>& kernel) {
    (void)family; // membership is structural: selections come from outer/kernel
    if (t < 0 || t > tree.horizon)
        throw ModelError("paste: time out of range");
    Measure out;
    out.sel.resize(tree.nodes.size());
    for (int u = 0; u < tree.node_count(); ++u) {
        if (tree.is_terminal(u)) continue;
        if (tree.nodes[u].t < t) {
            if (!outer.covers(u))
                throw ModelError("paste: outer measure misses node '" + tree.id_of(u) + "'");
            out.sel[u] = outer.at(u);
        }
    }
    for (int anchor : tree.at_time(t)) {
        if (tree.is_terminal(anchor)) continue;
        auto it = kernel.find(anchor);
        if (it == kernel.end())
            throw ModelError("paste: kernel missing node '" + tree.id_of(anchor) + "'");
        for (int u : tree.subtree(anchor)) {
            if (tree.is_terminal(u)) continue;
            if (!it->second.covers(u))
                throw ModelError("paste: kernel at '" + tree.id_of(anchor) +
                                 "' misses node '" + tree.id_of(u) + "'");
            out.sel[u] = it->second.at(u);
        }
    }
    return out;
}

double path_probability(const ScenarioTree& tree, const Measure& measure, int leaf) {
    if (leaf < 0 || leaf >= tree.node_count() || !tree.is_terminal(leaf))
        throw ModelError("path_probability: node is not terminal");
    double prob = 1.0;
    int u = leaf;
    while (tree.nodes[u].parent >= 0) {
        int par = tree.nodes[u].parent;
        if (!measure.covers(par))
            throw ModelError("path_probability: measure misses node '" + tree.id_of(par) + "'");
        const auto& succ = tree.nodes[par].succ;
        for (size_t i = 0; i < succ.size(); ++i)
            if (succ[i] == u) {
                prob *= measure.at(par)[i];
                break;
            }
        u = par;
    }
    return prob;
}

Measure select_extreme(const ScenarioTree& tree, const MeasureFamily& family, int index) {
    Measure m;
    m.sel.resize(tree.nodes.size());
    for (int u = 0; u < tree.node_count(); ++u)
        if (family.covers(u)) {
            int k = static_cast<int>(family.at(u).size());
            int j = index < 0 ? 0 : (index >= k ? k - 1 : index);
            m.sel[u] = family.at(u)[j];
        }
    return m;
}

Measure select_uniform_mixture(const ScenarioTree& tree, const MeasureFamily& family) {
    Measure m;
    m.sel.resize(tree.nodes.size());
    for (int u = 0; u < tree.node_count(); ++u) {
        if (!family.covers(u)) continue;
        const auto& ex = family.at(u);
        Vec avg(ex[0].size(), 0.0);
        for (const Vec& p : ex)
            for (size_t i = 0; i < p.size(); ++i) avg[i] += p[i] / ex.size();
        m.sel[u] = avg;
    }
    return m;
}

} // namespace rsnell
