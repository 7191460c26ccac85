// Generators for the two example model classes: uncertain-volatility
// lattices (volatility interval per unit sqrt-time, martingale returns) and
// trees discretizing a finite set of Levy triplets, one extreme transition
// law per triplet.
#pragma once

#include "rsnell/measure.hpp"
#include "rsnell/model_io.hpp"
#include "rsnell/tree.hpp"

#include <string>
#include <vector>

namespace rsnell {

struct UVSpec {
    double sigma_lo = 0.0;
    double sigma_hi = 0.0;
    int steps = 0;
    double dt = 1.0;
    double s0 = 1.0;
    int move_grid = 3; // odd count of symmetric log-price moves per step

    void validate() const;
};

struct LevyTripletSpec {
    double drift = 0.0;
    double diffusion = 0.0;                      // c >= 0
    std::vector<std::pair<double, double>> jumps; // (size, rate)
};

struct LevySpec {
    std::vector<LevyTripletSpec> triplets;
    double dt = 1.0;
    int steps = 0;
    double s0 = 1.0;

    void validate() const;
};

/// Per-extreme first and second moment targets used by moment_report.
struct MomentTarget {
    double mean = 0.0;
    double variance = 0.0;
};

struct GeneratedModel {
    ScenarioTree tree;
    MeasureFamily family;
    std::vector<MomentTarget> targets; // one per extreme index
    bool targets_relative = false;     // true: targets speak about dS/S
};

/// Uncertain-volatility lattice. Each node carries the same odd move grid of
/// log-price steps (outermost = sigma_hi sqrt(dt)); the local set holds the
/// two zero-mean return distributions with variance pinned at lo^2 dt and
/// hi^2 dt, each a vertex of its own moment polytope (lo = hi collapses to
/// one vector). Throws ModelError when an endpoint is unattainable.
GeneratedModel uv_lattice(const UVSpec& spec);

/// Levy tree on a common successor grid per step: per triplet, each jump
/// takes weight rate dt on its size bucket, the remaining mass rides the
/// diffusion moves drift dt +- sqrt(c dt) (or stays on the drift bucket when
/// c = 0). First order in dt; throws ModelError when dt is too large.
GeneratedModel levy_tree(const LevySpec& spec);

struct MomentRow {
    int node = -1;
    int extreme = -1;
    double mean_abs = 0.0, var_abs = 0.0;   // price increments
    double mean_rel = 0.0, var_rel = 0.0;   // returns dS/S (scalar trees)
};

/// Realized one-step moments per node and extreme.
std::vector<MomentRow> moment_report(const ScenarioTree& tree, const MeasureFamily& family);

/// Worst deviation of realized moments from the generator's targets.
double max_target_deviation(const GeneratedModel& model);

/// Loads a {"kind":"uv"|"levy"} spec file; `payoff` in the file is optional
/// ({"type":"put"|"call","strike":num}, default: put at s0) and applies at
/// every node of the generated tree.
TreeModel load_generated_model(const std::string& path);

UVSpec parse_uv_spec(const std::string& json_text);
LevySpec parse_levy_spec(const std::string& json_text);

} // namespace rsnell
