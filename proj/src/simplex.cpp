#include "rsnell/simplex.hpp"

#include "rsnell/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rsnell {

namespace {

// Tableau rows 0..m-1 are constraints, row m is the z-row storing z_j - c_j;
// entry n+m of every row is the rhs. Columns 0..n-1 are structural, n..n+m-1
// artificial. Invariant: rhs >= 0 on constraint rows.
struct Tableau {
    int m, n;
    Mat t;
    std::vector<int> basis;
    int rhs() const { return n + m; }
};

int entering_bland(const Tableau& tb, int limit) {
    for (int j = 0; j < limit; ++j)
        if (tb.t[tb.m][j] < -kPivotTol) return j;
    return -1;
}

int leaving_bland(const Tableau& tb, int col) {
    int pick = -1;
    double best = 0.0;
    for (int i = 0; i < tb.m; ++i) {
        const double a = tb.t[i][col];
        if (a <= kPivotTol) continue;
        const double ratio = tb.t[i][tb.rhs()] / a;
        if (pick < 0 || ratio < best - kPivotTol ||
            (std::abs(ratio - best) <= kPivotTol && tb.basis[i] < tb.basis[pick])) {
            pick = i;
            best = ratio;
        }
    }
    return pick;
}

void pivot(Tableau& tb, int row, int col) {
    const int w = tb.rhs() + 1;
    const double piv = tb.t[row][col];
    for (int j = 0; j < w; ++j) tb.t[row][j] /= piv;
    for (int i = 0; i <= tb.m; ++i) {
        if (i == row) continue;
        const double f = tb.t[i][col];
        if (f == 0.0) continue;
        for (int j = 0; j < w; ++j) tb.t[i][j] -= f * tb.t[row][j];
    }
    tb.basis[row] = col;
}

// Runs Bland iterations on the current z-row. Columns >= `limit` never enter.
// Returns false on unboundedness.
bool iterate(Tableau& tb, int limit) {
    for (int guard = 0; guard < 100000; ++guard) {
        const int j = entering_bland(tb, limit);
        if (j < 0) return true;
        const int r = leaving_bland(tb, j);
        if (r < 0) return false;
        pivot(tb, r, j);
    }
    throw NumericError("simplex: iteration guard exceeded");
}

} // namespace

SimplexResult simplex_max(const Mat& A, const Vec& b, const Vec& c) {
    const int m = static_cast<int>(A.size());
    const int n = static_cast<int>(c.size());

    Tableau tb;
    tb.m = m;
    tb.n = n;
    tb.t.assign(m + 1, Vec(n + m + 1, 0.0));
    tb.basis.resize(m);

    std::vector<double> sign(m, 1.0);
    double bscale = 1.0;
    for (int i = 0; i < m; ++i) {
        sign[i] = b[i] < 0.0 ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j) tb.t[i][j] = sign[i] * A[i][j];
        tb.t[i][n + i] = 1.0;
        tb.t[i][tb.rhs()] = sign[i] * b[i];
        tb.basis[i] = n + i;
        bscale = std::max(bscale, std::abs(b[i]));
    }

    // Phase 1: maximize -sum(artificials); z-row for basis = artificials.
    for (int j = 0; j < n; ++j) {
        double colsum = 0.0;
        for (int i = 0; i < m; ++i) colsum += tb.t[i][j];
        tb.t[m][j] = -colsum;
    }
    double bsum = 0.0;
    for (int i = 0; i < m; ++i) bsum += tb.t[i][tb.rhs()];
    tb.t[m][tb.rhs()] = -bsum;

    SimplexResult res;
    if (!iterate(tb, n + m))
        throw NumericError("simplex: phase 1 unbounded (cannot happen)");
    if (tb.t[m][tb.rhs()] < -1e-9 * bscale) {
        res.status = SimplexResult::Status::Infeasible;
        return res;
    }

    // Drive artificials out of the basis where possible; rows that resist are
    // redundant and keep a zero-level artificial (their multiplier is zero).
    for (int i = 0; i < m; ++i) {
        if (tb.basis[i] < n) continue;
        for (int j = 0; j < n; ++j)
            if (std::abs(tb.t[i][j]) > kPivotTol) {
                pivot(tb, i, j);
                break;
            }
    }

    // Phase 2: rebuild the z-row for the real objective.
    auto cost_of = [&](int col) { return col < n ? c[col] : 0.0; };
    for (int j = 0; j <= tb.rhs(); ++j) {
        double z = 0.0;
        for (int i = 0; i < m; ++i) z += cost_of(tb.basis[i]) * tb.t[i][j];
        tb.t[m][j] = z - (j < n ? c[j] : 0.0);
    }
    {
        double z = 0.0;
        for (int i = 0; i < m; ++i) z += cost_of(tb.basis[i]) * tb.t[i][tb.rhs()];
        tb.t[m][tb.rhs()] = z;
    }

    if (!iterate(tb, n)) { // artificials may not re-enter
        res.status = SimplexResult::Status::Unbounded;
        return res;
    }

    res.status = SimplexResult::Status::Optimal;
    res.value = tb.t[m][tb.rhs()];
    res.x.assign(n, 0.0);
    for (int i = 0; i < m; ++i)
        if (tb.basis[i] < n) res.x[tb.basis[i]] = tb.t[i][tb.rhs()];
    res.dual.assign(m, 0.0);
    for (int i = 0; i < m; ++i) res.dual[i] = sign[i] * tb.t[m][n + i];
    return res;
}

} // namespace rsnell
