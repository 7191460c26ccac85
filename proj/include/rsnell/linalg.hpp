// Small dense linear algebra: just enough for desk-scale polytopes and
// d <= 5 symmetric matrices. No external dependencies.
#pragma once

#include <optional>
#include <vector>

namespace rsnell {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>; // row-major, rectangular

/// Solves A x = b for a (possibly rectangular) system by Gauss elimination
/// with partial pivoting. Returns nullopt unless the system is consistent
/// and the solution unique (full column rank), both judged at `tol`.
std::optional<Vec> solve_unique(Mat A, Vec b, double tol = 1e-10);

/// Symmetric eigendecomposition by cyclic Jacobi rotations. `a` must be
/// symmetric; returns eigenvalues (ascending) and orthonormal columns in V.
struct EigenSym {
    Vec values;
    Mat vectors; // vectors[i][j] = component i of eigenvector j
};
EigenSym jacobi_eigensym(const Mat& a, double tol = 1e-13, int max_sweeps = 100);

double dot(const Vec& a, const Vec& b);
Vec mat_vec(const Mat& a, const Vec& x);
Mat mat_mul(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);
Mat identity(int n);

/// Determinant of a symmetric PSD matrix via its Jacobi spectrum.
double det_psd(const Mat& a);

double trace(const Mat& a);

} // namespace rsnell
