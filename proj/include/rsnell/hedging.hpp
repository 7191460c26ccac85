// Minimal superhedging via per-node linear programs, the martingale-measure
// polytope (saturation), duality-gap certification and the optional
// decomposition check.
//
// At each node the one-step problem is: minimize y over (y, Z) subject to
// y + Z . dS_i >= V_i for every successor i. Its LP dual maximizes p . V over
// the node's martingale polytope {p >= 0, sum p = 1, sum p_i dS_i = 0}, so
// solving the dual in standard form hands back the capital y and strategy Z
// as equality multipliers and an optimal polytope point as certificate.
#pragma once

#include "rsnell/linalg.hpp"
#include "rsnell/measure.hpp"
#include "rsnell/tree.hpp"

#include <string>
#include <vector>

namespace rsnell {

/// One-step hedge at a node: minimal capital, strategy, binding successors.
struct NodeHedge {
    double y = 0.0;
    Vec strategy;                 // Z in R^d
    std::vector<int> active;      // successor positions where the constraint binds
    Vec witness;                  // optimal martingale vector (complementary slackness)
};

struct HedgeReport {
    double price = 0.0;
    VectorProcess strategy;       // Z per non-terminal node
    ScalarProcess consumption;    // nonnegative increment per node (0 at the root)
    double duality_gap = 0.0;     // |price - robust Snell root under saturate(tree)|
    bool certified = false;       // duality_gap <= 1e-8
};

/// Solves min y s.t. y + Z . increments[i] >= targets[i]. Throws
/// ArbitrageError when 0 lies outside conv{increments} (unbounded below).
NodeHedge node_hedge(const std::vector<Vec>& increments, const Vec& targets,
                     const std::string& node_id = "");

/// Backward superhedge of an American claim: V = max(xi, node-level minimal
/// capital). The report's gap and certificate compare against the robust
/// envelope under the saturated family.
HedgeReport superhedge(const ScenarioTree& tree, const ScalarProcess& xi);

/// Pathwise check: y0 + sum of Z . dS along root->node >= xi_node - 1e-9
/// at every node.
bool verify_superhedge(const ScenarioTree& tree, const ScalarProcess& xi,
                       double y0, const VectorProcess& strategy);

/// Vertices of {p >= 0, sum p = 1, sum p_i dS_i = 0}, one vector per basic
/// feasible support (support size <= d+1). Empty result = empty polytope.
std::vector<Vec> martingale_polytope_vertices(const std::vector<Vec>& increments);

/// Vertex enumeration for a general small system E p = e, p >= 0; used by the
/// martingale polytope and by generators that add moment constraints.
std::vector<Vec> polytope_vertices(const Mat& eq_lhs, const Vec& eq_rhs);

/// Family whose local sets are the per-node martingale polytope vertex sets.
/// Throws ArbitrageError naming the first node with an empty polytope.
MeasureFamily saturate(const ScenarioTree& tree);

/// Nodes whose polytope vertices do not jointly cover every successor; on a
/// tree this is the obstruction to an equivalent martingale measure.
std::vector<int> full_support_warnings(const ScenarioTree& tree,
                                       const MeasureFamily& saturated);

/// |superhedge price - robust Snell root under `family`|.
double duality_gap(const ScenarioTree& tree, const ScalarProcess& xi,
                   const MeasureFamily& family);

/// True iff Y is a robust supermartingale for `family` and
/// Y_i - Y_n - Z_n . (S_i - S_n) <= 1e-9 along every edge.
bool optional_decomposition_check(const ScenarioTree& tree, const MeasureFamily& family,
                                  const ScalarProcess& y, const VectorProcess& strategy);

/// Node-wise set equality of extreme lists up to permutation and 1e-9.
bool families_equal(const ScenarioTree& tree, const MeasureFamily& a,
                    const MeasureFamily& b);

} // namespace rsnell
