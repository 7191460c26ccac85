// Node-wise measure families and single measures on a scenario tree.
// A family assigns each non-terminal node a finite set of extreme transition
// vectors; rectangularity (closure under conditioning and pasting) is then
// automatic from the node-wise representation.
#pragma once

#include "rsnell/tree.hpp"

#include <map>
#include <vector>

namespace rsnell {

/// Finite extreme set of transition probability vectors at one node.
struct LocalTransitionSet {
    int node = -1;
    std::vector<Vec> extremes;
};

/// One LocalTransitionSet per covered non-terminal node. A full family covers
/// every non-terminal node; `condition` produces families covering a subtree.
struct MeasureFamily {
    // Indexed like tree.nodes; empty entry = node not covered.
    std::vector<std::vector<Vec>> local;

    bool covers(int u) const {
        return u >= 0 && u < static_cast<int>(local.size()) && !local[u].empty();
    }
    const std::vector<Vec>& at(int u) const { return local[u]; }

    void insert(LocalTransitionSet set);
    LocalTransitionSet set_at(int u) const { return {u, local[u]}; }
};

/// A single measure: one transition vector per covered non-terminal node.
/// The vector may be any valid probability vector; it need not be an extreme
/// of any family.
struct Measure {
    std::vector<Vec> sel;         // indexed like tree.nodes; empty = not covered

    bool covers(int u) const {
        return u >= 0 && u < static_cast<int>(sel.size()) && !sel[u].empty();
    }
    const Vec& at(int u) const { return sel[u]; }
};

/// Probability-vector tolerance used everywhere: entries >= 0 and the sum
/// within 1e-12 of one, leaving head-room for products over long horizons.
inline constexpr double kProbTol = 1e-12;

/// Validates a transition vector against a node's successor count.
void check_transition_vector(const ScenarioTree& tree, int node, const Vec& p,
                             const std::string& what);

/// Family must cover exactly the non-terminal nodes of the subtree rooted at
/// `root` (defaults to the tree root), each set nonempty and valid.
void validate_family(const ScenarioTree& tree, const MeasureFamily& family,
                     int root = -1);

/// Measure must cover exactly the non-terminal nodes of the subtree at `root`.
void validate_measure(const ScenarioTree& tree, const Measure& measure,
                      int root = -1);

/// Restriction of the family to the subtree rooted at `node`; the local sets
/// on that subtree are carried over unchanged.
MeasureFamily condition(const ScenarioTree& tree, const MeasureFamily& family,
                        int node);

/// Pasted measure: `outer` selections strictly before time t, kernel
/// selections from t on. Each kernel entry is a measure on the subtree of a
/// node at time t. If outer and every kernel entry select extremes of
/// `family`, so does the result.
Measure paste(const ScenarioTree& tree, const MeasureFamily& family,
              const Measure& outer, int t, const std::map<int, Measure>& kernel);

/// Product of selected transition weights along the root-to-leaf path.
double path_probability(const ScenarioTree& tree, const Measure& measure,
                        int leaf);

/// Measure selecting extreme `index` at every covered node (clamped to the
/// node's set size). Convenience for tests and the CLI's measure selector.
Measure select_extreme(const ScenarioTree& tree, const MeasureFamily& family,
                       int index);

/// Measure averaging each node's extremes (a convex combination, hence valid).
Measure select_uniform_mixture(const ScenarioTree& tree, const MeasureFamily& family);

} // namespace rsnell
