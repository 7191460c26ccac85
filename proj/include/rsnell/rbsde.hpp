// Penalized approximation ladder for the reflected backward equation behind
// the Snell envelope: penalty level n, terminal truncation m, Lipschitz
// mollification level ell (inf-convolution over a rational grid), and Picard
// iteration index k. Each rung is computable on its own, and the composed
// limits walk back to the classical envelope.
#pragma once

#include "rsnell/measure.hpp"
#include "rsnell/tree.hpp"

#include <iosfwd>
#include <vector>

namespace rsnell {

struct PenalizedSolution {
    double n = 0.0;
    ScalarProcess y;
    ScalarProcess reflection; // K increments, >= 0, zero at the leaves
};

/// Parameters for one ladder cell. The rational grid has points j*h with
/// |j*h| <= radius.
struct GeneratorSpec {
    double n = 0.0;        // penalty level, > 0
    double m = 0.0;        // terminal truncation bound, > 0
    double ell = 0.0;      // Lipschitz level of the mollification, > 0
    double grid_h = 1e-4;  // grid spacing, > 0
    double grid_radius = 0.0; // >= m + 1

    void validate() const;
};

/// Penalized envelope under one measure. Each node solves the scalar fixed
/// point y = E_p[Y_next] + n dt max(0, xi - y), in closed form:
/// y = E when xi <= E, else (E + n dt xi) / (1 + n dt).
PenalizedSolution penalized_snell(const ScenarioTree& tree, const Measure& measure,
                                  const ScalarProcess& xi, double n);

/// max over nodes of (classical Snell - penalized Y); >= -1e-12 always.
double penalization_gap(const ScenarioTree& tree, const Measure& measure,
                        const ScalarProcess& xi, double n);

/// Clamp to [-m, m].
double truncate_terminal(double value, double m);

/// Inf-convolution mollification of the penalization generator at one node:
///   f(q)   = n max(0, xi - q) - n max(0, xi) + clamp(n max(0, xi), -m, m)
///   f^l(y) = min over grid q of { ell |y - q| + f(q) }.
/// The objective is piecewise linear in q with kinks only at y and xi, so the
/// grid minimum sits at a kink neighbour or at the boundary; eval() scans just
/// those candidates and agrees exactly with a full grid scan.
class MollifiedGenerator {
public:
    MollifiedGenerator(const GeneratorSpec& spec, double xi_node);

    double operator()(double y) const;

    /// f before mollification, for tests and the sandwich bound.
    double base(double q) const;

    const GeneratorSpec& spec() const { return spec_; }
    double xi() const { return xi_; }
    /// Largest grid index: points are j*h for |j| <= max_index.
    long max_index() const { return max_index_; }
    double grid_point(long j) const { return static_cast<double>(j) * spec_.grid_h; }

private:
    double at_grid(double y, long j) const;

    GeneratorSpec spec_;
    double xi_ = 0.0;
    long max_index_ = 0;
};

MollifiedGenerator mollify_generator(const GeneratorSpec& spec, double xi_node);

struct PicardResult {
    ScalarProcess y;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
    bool contraction_warning = false; // ell * (total time) >= 1
};

/// Picard iteration for the mollified backward equation with truncated
/// terminal value, from the zero start:
///   Y^{k+1}_u = f^l_u(Y^k_u) dt_u + E_p[Y^{k+1}_next],  Y^{k+1} = xi^m at leaves.
/// Stops when the sup-norm successive difference falls below tol.
PicardResult picard_solve(const ScenarioTree& tree, const Measure& measure,
                          const ScalarProcess& xi, const GeneratorSpec& spec,
                          int k_max = 10000, double tol = 1e-10);

/// Root value of the (n, m, ell, k)-level iterate (exactly k sweeps).
double ladder_value(const ScenarioTree& tree, const Measure& measure,
                    const ScalarProcess& xi, double n, double m, double ell, int k,
                    double grid_h = 1e-4);

/// One row of the convergence-study CSV.
struct StudyRow {
    double n = 0.0, m = 0.0, ell = 0.0;
    int k = 0;
    double root_value = 0.0, gap = 0.0, residual = 0.0;
};

/// Closed-form study over a penalty list: one row per n, gap against the
/// classical envelope. Throws InternalError if the gaps fail to be
/// non-increasing (they cannot, by the monotone convergence of the ladder).
std::vector<StudyRow> penalization_study(const ScenarioTree& tree, const Measure& measure,
                                         const ScalarProcess& xi,
                                         const std::vector<double>& n_list);

/// Picard-ladder study: for each n, run picard_solve at the given (m, ell).
std::vector<StudyRow> ladder_study(const ScenarioTree& tree, const Measure& measure,
                                   const ScalarProcess& xi, const std::vector<double>& n_list,
                                   double m, double ell, int k_max, double grid_h = 1e-4);

/// CSV with header n,m,ell,k,root_value,gap,residual.
void write_convergence_csv(std::ostream& out, const std::vector<StudyRow>& rows);

} // namespace rsnell
