// Dense two-phase primal simplex for the tiny LPs that arise one node at a
// time: maximize c'x subject to A x = b, x >= 0. Bland's anti-cycling rule
// throughout, so termination is unconditional. Problems here have at most a
// handful of rows and columns; exactness matters, speed does not.
#pragma once

#include "rsnell/linalg.hpp"

namespace rsnell {

struct SimplexResult {
    enum class Status { Optimal, Infeasible, Unbounded };
    Status status = Status::Infeasible;
    double value = 0.0;
    Vec x;    // primal solution (size n)
    Vec dual; // equality multipliers (size m); rows kept in input order
};

inline constexpr double kPivotTol = 1e-11;

/// Solves max c'x s.t. A x = b, x >= 0. Rows with negative b are flipped
/// internally; `dual` is reported for the original row orientation.
SimplexResult simplex_max(const Mat& A, const Vec& b, const Vec& c);

} // namespace rsnell
