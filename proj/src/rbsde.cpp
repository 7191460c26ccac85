#include "rsnell/rbsde.hpp"

#include "rsnell/errors.hpp"
#include "rsnell/snell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace rsnell {

void GeneratorSpec::validate() const {
    if (!(n > 0.0)) throw ModelError("generator spec: penalty n must be > 0");
    if (!(m > 0.0)) throw ModelError("generator spec: truncation m must be > 0");
    if (!(ell > 0.0)) throw ModelError("generator spec: Lipschitz level ell must be > 0");
    if (!(grid_h > 0.0)) throw ModelError("generator spec: grid spacing h must be > 0");
    if (!(grid_radius >= m + 1.0))
        throw ModelError("generator spec: grid radius must be >= m + 1");
}

PenalizedSolution penalized_snell(const ScenarioTree& tree, const Measure& measure,
                                  const ScalarProcess& xi, double n) {
    if (!(n > 0.0)) throw ModelError("penalized_snell: penalty n must be > 0");
    check_scalar_total(tree, xi, "penalized_snell payoff");

    PenalizedSolution sol;
    sol.n = n;
    sol.y = xi;
    sol.reflection = make_scalar(tree, 0.0);

    auto order = tree.by_time();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int u = *it;
        if (tree.is_terminal(u)) continue;
        const double dt = tree.nodes[u].dt;
        const double e = step_expectation(tree, u, measure.at(u), sol.y);
        const double y = xi[u] <= e ? e : (e + n * dt * xi[u]) / (1.0 + n * dt);
        sol.y[u] = y;
        sol.reflection[u] = n * dt * std::max(0.0, xi[u] - y);
    }
    return sol;
}

double penalization_gap(const ScenarioTree& tree, const Measure& measure,
                        const ScalarProcess& xi, double n) {
    ScalarProcess snell = classical_snell(tree, measure, xi);
    PenalizedSolution pen = penalized_snell(tree, measure, xi, n);
    double gap = 0.0;
    for (size_t u = 0; u < snell.size(); ++u) gap = std::max(gap, snell[u] - pen.y[u]);
    return gap;
}

double truncate_terminal(double value, double m) {
    if (!(m > 0.0)) throw ModelError("truncate_terminal: bound m must be > 0");
    return std::min(std::max(value, -m), m);
}

MollifiedGenerator::MollifiedGenerator(const GeneratorSpec& spec, double xi_node)
    : spec_(spec), xi_(xi_node) {
    spec_.validate();
    max_index_ = static_cast<long>(std::floor(spec_.grid_radius / spec_.grid_h + 1e-12));
    if (max_index_ < 1)
        throw ModelError("generator spec: grid has no interior points (h too large)");
}

double MollifiedGenerator::base(double q) const {
    const double pos = spec_.n * std::max(0.0, xi_);
    return spec_.n * std::max(0.0, xi_ - q) - pos +
           std::min(std::max(pos, -spec_.m), spec_.m);
}

double MollifiedGenerator::at_grid(double y, long j) const {
    const double q = grid_point(j);
    return spec_.ell * std::abs(y - q) + base(q);
}

double MollifiedGenerator::operator()(double y) const {
    auto clamp_index = [&](long j) { return std::max(-max_index_, std::min(max_index_, j)); };
    const long near_y = static_cast<long>(std::floor(y / spec_.grid_h));
    const long near_xi = static_cast<long>(std::floor(xi_ / spec_.grid_h));
    const long candidates[6] = {-max_index_,
                                max_index_,
                                clamp_index(near_y),
                                clamp_index(near_y + 1),
                                clamp_index(near_xi),
                                clamp_index(near_xi + 1)};
    double best = std::numeric_limits<double>::infinity();
    for (long j : candidates) best = std::min(best, at_grid(y, j));
    return best;
}

MollifiedGenerator mollify_generator(const GeneratorSpec& spec, double xi_node) {
    return MollifiedGenerator(spec, xi_node);
}

PicardResult picard_solve(const ScenarioTree& tree, const Measure& measure,
                          const ScalarProcess& xi, const GeneratorSpec& spec,
                          int k_max, double tol) {
    spec.validate();
    if (k_max < 1) throw ModelError("picard_solve: k_max must be >= 1");
    check_scalar_total(tree, xi, "picard payoff");

    std::vector<MollifiedGenerator> gen;
    gen.reserve(tree.nodes.size());
    for (int u = 0; u < tree.node_count(); ++u)
        gen.emplace_back(spec, xi[u]);

    // Contraction modulus: ell times the longest accumulated time to the horizon.
    ScalarProcess horizon_time = make_scalar(tree, 0.0);
    auto order = tree.by_time();
    double total_time = 0.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int u = *it;
        if (tree.is_terminal(u)) continue;
        double worst = 0.0;
        for (int s : tree.nodes[u].succ) worst = std::max(worst, horizon_time[s]);
        horizon_time[u] = worst + tree.nodes[u].dt;
        total_time = std::max(total_time, horizon_time[u]);
    }

    PicardResult res;
    res.contraction_warning = spec.ell * total_time >= 1.0;
    res.y = make_scalar(tree, 0.0);

    ScalarProcess next = make_scalar(tree, 0.0);
    for (int k = 0; k < k_max; ++k) {
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const int u = *it;
            if (tree.is_terminal(u)) {
                next[u] = truncate_terminal(xi[u], spec.m);
            } else {
                next[u] = gen[u](res.y[u]) * tree.nodes[u].dt +
                          step_expectation(tree, u, measure.at(u), next);
            }
        }
        double diff = 0.0;
        for (size_t u = 0; u < next.size(); ++u)
            diff = std::max(diff, std::abs(next[u] - res.y[u]));
        res.y = next;
        res.iterations = k + 1;
        res.residual = diff;
        if (diff <= tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

double ladder_value(const ScenarioTree& tree, const Measure& measure,
                    const ScalarProcess& xi, double n, double m, double ell, int k,
                    double grid_h) {
    if (k == 0) return 0.0; // the zero start
    GeneratorSpec spec{n, m, ell, grid_h, m + 1.0};
    PicardResult res = picard_solve(tree, measure, xi, spec, k, 0.0);
    return res.y[tree.root];
}

std::vector<StudyRow> penalization_study(const ScenarioTree& tree, const Measure& measure,
                                         const ScalarProcess& xi,
                                         const std::vector<double>& n_list) {
    std::vector<StudyRow> rows;
    double prev_gap = std::numeric_limits<double>::infinity();
    for (double n : n_list) {
        PenalizedSolution sol = penalized_snell(tree, measure, xi, n);
        StudyRow row;
        row.n = n;
        row.root_value = sol.y[tree.root];
        row.gap = penalization_gap(tree, measure, xi, n);
        rows.push_back(row);
        if (row.gap > prev_gap + 1e-12)
            throw InternalError("penalization gaps must be non-increasing in n");
        prev_gap = row.gap;
    }
    return rows;
}

std::vector<StudyRow> ladder_study(const ScenarioTree& tree, const Measure& measure,
                                   const ScalarProcess& xi, const std::vector<double>& n_list,
                                   double m, double ell, int k_max, double grid_h) {
    ScalarProcess snell = classical_snell(tree, measure, xi);
    std::vector<StudyRow> rows;
    for (double n : n_list) {
        GeneratorSpec spec{n, m, ell, grid_h, m + 1.0};
        PicardResult res = picard_solve(tree, measure, xi, spec, k_max);
        StudyRow row;
        row.n = n;
        row.m = m;
        row.ell = ell;
        row.k = res.iterations;
        row.root_value = res.y[tree.root];
        row.residual = res.residual;
        for (size_t u = 0; u < snell.size(); ++u)
            row.gap = std::max(row.gap, snell[u] - res.y[u]);
        rows.push_back(row);
    }
    return rows;
}

void write_convergence_csv(std::ostream& out, const std::vector<StudyRow>& rows) {
    out << "n,m,ell,k,root_value,gap,residual\n";
    char buf[256];
    for (const StudyRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d,%.17g,%.17g,%.17g\n",
                      r.n, r.m, r.ell, r.k, r.root_value, r.gap, r.residual);
        out << buf;
    }
}

} // namespace rsnell
