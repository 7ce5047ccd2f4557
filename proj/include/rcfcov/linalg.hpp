#pragma once
// Factorizations and solves: unblocked Cholesky, Householder QR of X^T with
// optional column pivoting, forward substitution, and a Jacobi eigensolver.
// Everything works on the column-major types from matrix.hpp.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "rcfcov/matrix.hpp"

namespace rcfcov::linalg {

// Cholesky factor L of a symmetric positive definite matrix, a = L L^T,
// L with positive diagonal. Pivot threshold dim * eps * max|diag(a)| keeps
// the test scale-invariant.
inline LowerTriangular cholesky(const DenseMatrix& a) {
    if (a.rows() != a.cols())
        throw DimensionError("cholesky: matrix not square");
    if (!is_symmetric(a, 1e-12))
        throw DimensionError("cholesky: matrix not symmetric");
    const int dim = a.rows();
    LowerTriangular l = LowerTriangular::from_dense(a);
    double max_diag = 0.0;
    for (int j = 0; j < dim; ++j) max_diag = std::max(max_diag, std::abs(a(j, j)));
    const double threshold = dim * std::numeric_limits<double>::epsilon() * max_diag;

    for (int k = 0; k < dim; ++k) {
        double* lk = l.col(k);  // rows k..dim-1
        const double pivot = lk[0];
        if (pivot <= threshold)
            throw NotPositiveDefinite("cholesky: non-positive pivot at index " + std::to_string(k));
        const double dkk = std::sqrt(pivot);
        const int len = dim - k;
        lk[0] = dkk;
        for (int i = 1; i < len; ++i) lk[i] /= dkk;
        // Right-looking update of the remaining columns.
        for (int j = k + 1; j < dim; ++j) {
            double* lj = l.col(j);  // rows j..dim-1
            const double s = lk[j - k];
            if (s == 0.0) continue;
            for (int i = 0; i < dim - j; ++i) lj[i] -= s * lk[j - k + i];
        }
    }
    return l;
}

// Solves l * z = b by forward substitution, one right-hand side column at a
// time (column-oriented so the packed columns of l stream contiguously).
inline DenseMatrix tri_solve_lower(const LowerTriangular& l, const DenseMatrix& b) {
    if (l.dim() != b.rows())
        throw DimensionError("tri_solve_lower: dimension mismatch");
    const int dim = l.dim();
    DenseMatrix z = b;
    for (int c = 0; c < b.cols(); ++c) {
        double* zc = z.col(c);
        for (int k = 0; k < dim; ++k) {
            const double* lk = l.col(k);
            const double zk = zc[k] / lk[0];
            zc[k] = zk;
            if (zk == 0.0) continue;
            for (int i = 1; i < dim - k; ++i) zc[k + i] -= lk[i] * zk;
        }
    }
    return z;
}

// x = l * b.
inline DenseMatrix tri_mul_lower(const LowerTriangular& l, const DenseMatrix& b) {
    if (l.dim() != b.rows())
        throw DimensionError("tri_mul_lower: dimension mismatch");
    const int dim = l.dim();
    DenseMatrix x(dim, b.cols());
    for (int c = 0; c < b.cols(); ++c) {
        const double* bc = b.col(c);
        double* xc = x.col(c);
        for (int k = 0; k < dim; ++k) {
            const double s = bc[k];
            if (s == 0.0) continue;
            const double* lk = l.col(k);
            for (int i = 0; i < dim - k; ++i) xc[k + i] += lk[i] * s;
        }
    }
    return x;
}

// Result of factoring X^T (X is p x n, n <= p): X^T Pi = Q H^T with Q an
// n x n orthogonal matrix, H a p x n lower-trapezoidal factor with positive
// diagonal, and perm the row order of X selected by the pivoting (H's row k
// corresponds to row perm[k] of X). With pivoting the diagonal of H is also
// decreasing, which is what makes the factor rank-revealing.
struct PivotedQr {
    DenseMatrix q;
    DenseMatrix h;
    std::vector<int> perm;
};

// Householder QR of X^T. pivot=true selects, at every step, the column of
// X^T (row of X) with the largest remaining norm, lowest index on ties;
// pivot=false keeps the natural order and perm stays the identity.
// Reflector signs are chosen so every h(j,j) > 0.
inline PivotedQr qr_of_transpose(const DenseMatrix& x, bool pivot) {
    const int p = x.rows();
    const int n = x.cols();
    if (n > p)
        throw DimensionError("qr_of_transpose: need n <= p");

    DenseMatrix a = transpose(x);  // n x p, factored in place
    DenseMatrix q = DenseMatrix::identity(n);
    std::vector<int> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> vhouse(n);           // current reflector
    std::vector<double> beta(n, 0.0);
    std::vector<std::vector<double>> vs(n);  // reflectors kept for forming Q

    for (int k = 0; k < n; ++k) {
        if (pivot) {
            // Remaining squared norms, recomputed each step (cheap at these
            // sizes and immune to cancellation in downdating).
            int best = k;
            double best_norm = -1.0;
            for (int j = k; j < p; ++j) {
                const double* aj = a.col(j);
                double s = 0.0;
                for (int i = k; i < n; ++i) s += aj[i] * aj[i];
                if (s > best_norm) {
                    best_norm = s;
                    best = j;
                }
            }
            if (best != k) {
                for (int i = 0; i < n; ++i) std::swap(a(i, k), a(i, best));
                std::swap(perm[k], perm[best]);
            }
        }

        // Householder vector for column k, rows k..n-1.
        double norm2 = 0.0;
        for (int i = k; i < n; ++i) norm2 += a(i, k) * a(i, k);
        const double norm = std::sqrt(norm2);
        double bk = 0.0;
        if (norm > 0.0) {
            const double a0 = a(k, k);
            const double alpha = a0 >= 0.0 ? -norm : norm;
            vhouse[k] = a0 - alpha;
            for (int i = k + 1; i < n; ++i) vhouse[i] = a(i, k);
            const double vnorm2 = vhouse[k] * vhouse[k] + (norm2 - a0 * a0);
            bk = vnorm2 > 0.0 ? 2.0 / vnorm2 : 0.0;
            a(k, k) = alpha;
            for (int i = k + 1; i < n; ++i) a(i, k) = 0.0;
            // Apply the reflector to the remaining columns.
            for (int j = k + 1; j < p; ++j) {
                double* aj = a.col(j);
                double w = 0.0;
                for (int i = k; i < n; ++i) w += vhouse[i] * aj[i];
                w *= bk;
                for (int i = k; i < n; ++i) aj[i] -= w * vhouse[i];
            }
        }
        beta[k] = bk;
        vs[k].assign(vhouse.begin() + k, vhouse.begin() + n);
    }

    // Rank check on the diagonal of R.
    double dmax = 0.0;
    for (int k = 0; k < n; ++k) dmax = std::max(dmax, std::abs(a(k, k)));
    const double dtol = n * std::numeric_limits<double>::epsilon() * dmax;
    for (int k = 0; k < n; ++k)
        if (std::abs(a(k, k)) <= dtol)
            throw RankDeficient("qr_of_transpose: factor diagonal collapsed at column " +
                                std::to_string(k));

    // Accumulate Q = H_0 ... H_{n-1} by applying reflectors to I in reverse.
    for (int k = n - 1; k >= 0; --k) {
        if (beta[k] == 0.0) continue;
        const std::vector<double>& v = vs[k];
        for (int j = 0; j < n; ++j) {
            double* qj = q.col(j);
            double w = 0.0;
            for (int i = k; i < n; ++i) w += v[i - k] * qj[i];
            w *= beta[k];
            for (int i = k; i < n; ++i) qj[i] -= w * v[i - k];
        }
    }

    // Flip signs so the diagonal of H = R^T is positive.
    for (int k = 0; k < n; ++k) {
        if (a(k, k) < 0.0) {
            for (int j = k; j < p; ++j) a(k, j) = -a(k, j);
            for (int i = 0; i < n; ++i) q(i, k) = -q(i, k);
        }
    }

    DenseMatrix h(p, n);
    for (int j = 0; j < n; ++j)
        for (int i = j; i < p; ++i)
            h(i, j) = a(j, i);

    return PivotedQr{std::move(q), std::move(h), std::move(perm)};
}

inline PivotedQr pivoted_qr_of_transpose(const DenseMatrix& x) {
    return qr_of_transpose(x, true);
}

struct SymEigen {
    std::vector<double> values;  // descending
    DenseMatrix vectors;         // column k pairs with values[k]
};

// Cyclic Jacobi eigensolver for symmetric matrices. Plenty accurate for the
// moderate dimensions used here; throws NoConvergence after the sweep cap.
inline SymEigen sym_eigen(const DenseMatrix& a_in) {
    if (a_in.rows() != a_in.cols())
        throw DimensionError("sym_eigen: matrix not square");
    if (!is_symmetric(a_in, 1e-10))
        throw DimensionError("sym_eigen: matrix not symmetric");
    const int n = a_in.rows();
    DenseMatrix a = symmetrized(a_in);
    DenseMatrix v = DenseMatrix::identity(n);
    const double scale = std::max(frobenius_norm(a), 1e-300);

    const int max_sweeps = 100;
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        double off = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = j + 1; i < n; ++i) off += a(i, j) * a(i, j);
        if (std::sqrt(off) <= 1e-14 * scale) {
            converged = true;
            break;
        }
        for (int pcol = 0; pcol < n - 1; ++pcol) {
            for (int qcol = pcol + 1; qcol < n; ++qcol) {
                const double apq = a(pcol, qcol);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(qcol, qcol) - a(pcol, pcol)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double aip = a(i, pcol);
                    const double aiq = a(i, qcol);
                    a(i, pcol) = c * aip - s * aiq;
                    a(i, qcol) = s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    const double api = a(pcol, i);
                    const double aqi = a(qcol, i);
                    a(pcol, i) = c * api - s * aqi;
                    a(qcol, i) = s * api + c * aqi;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = v(i, pcol);
                    const double viq = v(i, qcol);
                    v(i, pcol) = c * vip - s * viq;
                    v(i, qcol) = s * vip + c * viq;
                }
            }
        }
    }
    if (!converged) {
        double off = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = j + 1; i < n; ++i) off += a(i, j) * a(i, j);
        if (std::sqrt(off) > 1e-10 * scale)
            throw NoConvergence("sym_eigen: Jacobi sweeps exhausted");
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a(i, i) > a(j, j); });

    SymEigen out{std::vector<double>(n), DenseMatrix(n, n)};
    for (int k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (int i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

}  // namespace rcfcov::linalg
