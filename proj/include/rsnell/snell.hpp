// Classical and robust (aggregated) Snell envelopes on scenario trees, the
// exhaustive sup-sup oracle, and exercise-rule extraction.
//
// The robust envelope runs one backward sweep, maximizing the one-step
// expectation over each node's extreme vectors; rectangularity of the family
// makes this equal to the global sup over measures and stopping rules, which
// `brute_force_value` certifies by plain enumeration.
#pragma once

#include "rsnell/measure.hpp"
#include "rsnell/tree.hpp"

namespace rsnell {

/// Stop/continue flag per node. Terminal nodes always stop; the induced
/// stopping time is the first stopping node along each path.
struct ExerciseRule {
    std::vector<char> stop; // indexed like tree.nodes

    bool stops(int u) const { return stop[u] != 0; }
};

/// Backward-induction Snell envelope under a single measure:
/// Y = xi at the leaves, Y = max(xi, E_p[Y_next]) inside.
ScalarProcess classical_snell(const ScenarioTree& tree, const Measure& measure,
                              const ScalarProcess& xi);

/// Robust envelope: the one-step expectation is maximized over each node's
/// extreme transition vectors.
ScalarProcess robust_snell(const ScenarioTree& tree, const MeasureFamily& family,
                           const ScalarProcess& xi);

inline constexpr double kDefaultBruteForceCap = 1e7;

/// Exact max of E^P[xi_tau] over all extreme-selection measures P and all
/// exercise rules tau, by full enumeration. Throws CapExceededError when
/// (#selections) x (#rules) exceeds `cap`.
double brute_force_value(const ScenarioTree& tree, const MeasureFamily& family,
                         const ScalarProcess& xi, double cap = kDefaultBruteForceCap);

/// First-contact rule: stop where |Y - xi| <= 1e-9 (1 + |xi|).
ExerciseRule optimal_exercise(const ScenarioTree& tree, const ScalarProcess& snell,
                              const ScalarProcess& xi);

/// True iff Y_node >= E_p[Y_next] - 1e-9 at every non-terminal node.
bool check_supermartingale(const ScenarioTree& tree, const ScalarProcess& y,
                           const Measure& measure);

/// One-step expectation sum_i p_i v[succ_i] at a non-terminal node.
double step_expectation(const ScenarioTree& tree, int node, const Vec& p,
                        const ScalarProcess& v);

} // namespace rsnell
