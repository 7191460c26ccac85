// Finite scenario tree: the discrete carrier for pricing, hedging and the
// penalization ladder. Nodes live in a flat vector; operations address them
// by index and report them by their string id.
#pragma once

#include <string>
#include <vector>

namespace rsnell {

using Vec = std::vector<double>;

struct TreeNode {
    std::string id;
    int t = 0;
    int parent = -1;             // -1 for the root
    std::vector<int> succ;       // ordered successor indices; empty at t == horizon
    Vec price;                   // length dim
    double dt = 1.0;             // time increment to successors; unused at t == horizon
};

/// Event tree with d-dimensional prices per node. Immutable after
/// construction; `validate` enforces the structural invariants.
struct ScenarioTree {
    int horizon = 0;
    int dim = 0;
    std::vector<TreeNode> nodes;
    int root = -1;

    int node_count() const { return static_cast<int>(nodes.size()); }
    bool is_terminal(int u) const { return nodes[u].succ.empty(); }
    const std::string& id_of(int u) const { return nodes[u].id; }

    /// Index of a node by id, -1 if unknown.
    int index_of(const std::string& id) const;

    /// Price increment S_child - S_parent along the edge into `child`.
    Vec increment(int child) const;

    /// Node indices in non-decreasing time order (root first).
    std::vector<int> by_time() const;

    /// Non-terminal node indices in non-decreasing time order.
    std::vector<int> interior() const;

    /// All nodes of the subtree rooted at u, in non-decreasing time order.
    std::vector<int> subtree(int u) const;

    /// Nodes at an exact time slice.
    std::vector<int> at_time(int t) const;

    /// Throws ModelError naming the offending node and rule.
    void validate() const;
};

// Adapted processes are plain per-node arrays indexed like `tree.nodes`.
// Scalar processes are total; vector processes carry entries on non-terminal
// nodes (empty slots elsewhere).
using ScalarProcess = std::vector<double>;
using VectorProcess = std::vector<Vec>;

/// Scalar process with every entry set to `fill`.
ScalarProcess make_scalar(const ScenarioTree& tree, double fill = 0.0);

/// Checks a scalar process is total and finite; throws ModelError otherwise.
void check_scalar_total(const ScenarioTree& tree, const ScalarProcess& p,
                        const std::string& what);

} // namespace rsnell
