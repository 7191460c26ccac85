#include "rsnell/linalg.hpp"

#include "rsnell/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rsnell {

std::optional<Vec> solve_unique(Mat A, Vec b, double tol) {
    const int m = static_cast<int>(A.size());
    const int n = m == 0 ? 0 : static_cast<int>(A[0].size());

    double scale = tol;
    for (const Vec& row : A)
        for (double v : row) scale = std::max(scale, std::abs(v));
    const double eps = tol * std::max(1.0, scale);

    std::vector<int> pivot_col;
    int row = 0;
    for (int col = 0; col < n && row < m; ++col) {
        int best = row;
        for (int r = row + 1; r < m; ++r)
            if (std::abs(A[r][col]) > std::abs(A[best][col])) best = r;
        if (std::abs(A[best][col]) <= eps) continue;
        std::swap(A[best], A[row]);
        std::swap(b[best], b[row]);
        const double piv = A[row][col];
        for (int r = 0; r < m; ++r) {
            if (r == row) continue;
            const double f = A[r][col] / piv;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) A[r][c] -= f * A[row][c];
            b[r] -= f * b[row];
        }
        pivot_col.push_back(col);
        ++row;
    }
    if (static_cast<int>(pivot_col.size()) < n) return std::nullopt; // rank-deficient
    for (int r = row; r < m; ++r)
        if (std::abs(b[r]) > eps) return std::nullopt; // inconsistent

    Vec x(n, 0.0);
    for (int r = 0; r < row; ++r) x[pivot_col[r]] = b[r] / A[r][pivot_col[r]];
    return x;
}

EigenSym jacobi_eigensym(const Mat& a, double tol, int max_sweeps) {
    const int n = static_cast<int>(a.size());
    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(a[i].size()) != n)
            throw NumericError("jacobi: matrix not square");
        for (int j = 0; j < n; ++j) {
            scale = std::max(scale, std::abs(a[i][j]));
            if (std::abs(a[i][j] - a[j][i]) > 1e-12 * std::max(1.0, scale))
                throw NumericError("jacobi: matrix not symmetric within 1e-12");
        }
    }

    Mat d = a;
    Mat v = identity(n);
    const double stop = tol * std::max(1.0, scale);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off = std::max(off, std::abs(d[i][j]));
        if (off <= stop) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(d[p][q]) <= stop * 1e-2) continue;
                // Classic 2x2 rotation annihilating d[p][q].
                const double theta = (d[q][q] - d[p][p]) / (2.0 * d[p][q]);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double dkp = d[k][p], dkq = d[k][q];
                    d[k][p] = c * dkp - s * dkq;
                    d[k][q] = s * dkp + c * dkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double dpk = d[p][k], dqk = d[q][k];
                    d[p][k] = c * dpk - s * dqk;
                    d[q][k] = s * dpk + c * dqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
    }

    EigenSym out;
    out.values.resize(n);
    for (int i = 0; i < n; ++i) out.values[i] = d[i][i];
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return out.values[x] < out.values[y]; });
    EigenSym sorted;
    sorted.values.resize(n);
    sorted.vectors.assign(n, Vec(n, 0.0));
    for (int j = 0; j < n; ++j) {
        sorted.values[j] = out.values[order[j]];
        for (int i = 0; i < n; ++i) sorted.vectors[i][j] = v[i][order[j]];
    }
    return sorted;
}

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vec mat_vec(const Mat& a, const Vec& x) {
    Vec y(a.size(), 0.0);
    for (size_t i = 0; i < a.size(); ++i) y[i] = dot(a[i], x);
    return y;
}

Mat mat_mul(const Mat& a, const Mat& b) {
    const size_t m = a.size(), k = b.size(), n = b.empty() ? 0 : b[0].size();
    Mat c(m, Vec(n, 0.0));
    for (size_t i = 0; i < m; ++i)
        for (size_t l = 0; l < k; ++l) {
            const double ail = a[i][l];
            if (ail == 0.0) continue;
            for (size_t j = 0; j < n; ++j) c[i][j] += ail * b[l][j];
        }
    return c;
}

Mat transpose(const Mat& a) {
    const size_t m = a.size(), n = a.empty() ? 0 : a[0].size();
    Mat t(n, Vec(m, 0.0));
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < n; ++j) t[j][i] = a[i][j];
    return t;
}

Mat identity(int n) {
    Mat id(n, Vec(n, 0.0));
    for (int i = 0; i < n; ++i) id[i][i] = 1.0;
    return id;
}

double det_psd(const Mat& a) {
    EigenSym eig = jacobi_eigensym(a);
    double det = 1.0;
    for (double v : eig.values) det *= v;
    return det;
}

double trace(const Mat& a) {
    double t = 0.0;
    for (size_t i = 0; i < a.size(); ++i) t += a[i][i];
    return t;
}

} // namespace rsnell
