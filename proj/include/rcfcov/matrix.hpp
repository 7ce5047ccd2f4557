#pragma once
// Dense column-major matrix and packed lower-triangular storage, plus the
// small set of level-3 helpers the estimators need. Self-contained, doubles
// only, no external linear algebra dependency.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "rcfcov/errors.hpp"

namespace rcfcov::linalg {

class DenseMatrix {
public:
    // Zero-initialized rows x cols matrix.
    DenseMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(checked_size(rows, cols), 0.0) {}

    // Takes ownership of column-major data; rejects NaN/Inf entries.
    DenseMatrix(int rows, int cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != checked_size(rows, cols))
            throw DimensionError("DenseMatrix: data length does not match rows*cols");
        for (double v : data_)
            if (!std::isfinite(v))
                throw std::invalid_argument("DenseMatrix: non-finite entry");
    }

    static DenseMatrix identity(int n) {
        DenseMatrix m(n, n);
        for (int j = 0; j < n; ++j) m(j, j) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<std::size_t>(j) * rows_ + i];
    }
    double operator()(int i, int j) const {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<std::size_t>(j) * rows_ + i];
    }

    double* col(int j) { return data_.data() + static_cast<std::size_t>(j) * rows_; }
    const double* col(int j) const { return data_.data() + static_cast<std::size_t>(j) * rows_; }

    const std::vector<double>& data() const { return data_; }

private:
    static std::size_t checked_size(int rows, int cols) {
        if (rows < 1 || cols < 1)
            throw DimensionError("DenseMatrix: rows and cols must be >= 1");
        return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    }

    int rows_;
    int cols_;
    std::vector<double> data_;
};

// Packed lower-triangular matrix, column-major: column j stores rows j..dim-1
// contiguously. Entries above the diagonal are implicitly zero.
class LowerTriangular {
public:
    explicit LowerTriangular(int dim)
        : dim_(dim), data_(packed_size(dim), 0.0) {
        if (dim < 1) throw DimensionError("LowerTriangular: dim must be >= 1");
    }

    // Copies the lower triangle of a square dense matrix.
    static LowerTriangular from_dense(const DenseMatrix& a) {
        if (a.rows() != a.cols())
            throw DimensionError("LowerTriangular::from_dense: matrix not square");
        LowerTriangular l(a.rows());
        for (int j = 0; j < a.cols(); ++j)
            for (int i = j; i < a.rows(); ++i)
                l.at(i, j) = a(i, j);
        return l;
    }

    int dim() const { return dim_; }

    double entry(int i, int j) const {
        assert(i >= 0 && i < dim_ && j >= 0 && j < dim_);
        return i < j ? 0.0 : data_[offset(j) + (i - j)];
    }
    double& at(int i, int j) {
        assert(j >= 0 && j <= i && i < dim_);
        return data_[offset(j) + (i - j)];
    }
    double diag(int j) const { return data_[offset(j)]; }

    // Pointer to the packed column j (entries for rows j..dim-1).
    double* col(int j) { return data_.data() + offset(j); }
    const double* col(int j) const { return data_.data() + offset(j); }

    DenseMatrix to_dense() const {
        DenseMatrix a(dim_, dim_);
        for (int j = 0; j < dim_; ++j)
            for (int i = j; i < dim_; ++i)
                a(i, j) = entry(i, j);
        return a;
    }

    // L11: leading k x k triangle.
    LowerTriangular leading_block(int k) const {
        check_split(k);
        LowerTriangular b(k);
        for (int j = 0; j < k; ++j)
            for (int i = j; i < k; ++i)
                b.at(i, j) = entry(i, j);
        return b;
    }

    // L21: rows k..dim-1, columns 0..k-1 as a dense block.
    DenseMatrix subdiagonal_block(int k) const {
        check_split(k);
        if (k >= dim_) throw DimensionError("subdiagonal_block: split leaves no rows");
        DenseMatrix b(dim_ - k, k);
        for (int j = 0; j < k; ++j)
            for (int i = k; i < dim_; ++i)
                b(i - k, j) = entry(i, j);
        return b;
    }

    // L22: trailing (dim-k) x (dim-k) triangle.
    LowerTriangular trailing_block(int k) const {
        check_split(k);
        if (k >= dim_) throw DimensionError("trailing_block: split leaves no rows");
        LowerTriangular b(dim_ - k);
        for (int j = k; j < dim_; ++j)
            for (int i = j; i < dim_; ++i)
                b.at(i - k, j - k) = entry(i, j);
        return b;
    }

private:
    static std::size_t packed_size(int dim) {
        return static_cast<std::size_t>(dim) * (dim + 1) / 2;
    }
    std::size_t offset(int j) const {
        return static_cast<std::size_t>(j) * dim_ - static_cast<std::size_t>(j) * (j - 1) / 2;
    }
    void check_split(int k) const {
        if (k < 1 || k > dim_) throw DimensionError("block split out of range");
    }

    int dim_;
    std::vector<double> data_;
};

inline DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols(), a.rows());
    for (int j = 0; j < a.cols(); ++j)
        for (int i = 0; i < a.rows(); ++i)
            t(j, i) = a(i, j);
    return t;
}

// C = A * B, gaxpy ordering so the inner loop runs down columns.
inline DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows())
        throw DimensionError("multiply: inner dimensions do not match");
    DenseMatrix c(a.rows(), b.cols());
    for (int j = 0; j < b.cols(); ++j) {
        double* cj = c.col(j);
        for (int k = 0; k < a.cols(); ++k) {
            const double bkj = b(k, j);
            if (bkj == 0.0) continue;
            const double* ak = a.col(k);
            for (int i = 0; i < a.rows(); ++i) cj[i] += ak[i] * bkj;
        }
    }
    return c;
}

// G * diag(w) * G^T for a p x n factor G; builds the lower triangle and mirrors.
inline DenseMatrix weighted_gram(const DenseMatrix& g, const std::vector<double>& w) {
    if (static_cast<int>(w.size()) != g.cols())
        throw DimensionError("weighted_gram: weight count does not match columns");
    const int p = g.rows();
    DenseMatrix m(p, p);
    for (int j = 0; j < g.cols(); ++j) {
        const double* gj = g.col(j);
        const double wj = w[j];
        for (int c = 0; c < p; ++c) {
            const double s = wj * gj[c];
            if (s == 0.0) continue;
            double* mc = m.col(c);
            for (int r = c; r < p; ++r) mc[r] += s * gj[r];
        }
    }
    for (int c = 0; c < p; ++c)
        for (int r = c + 1; r < p; ++r)
            m(c, r) = m(r, c);
    return m;
}

// A * A^T without weights.
inline DenseMatrix gram(const DenseMatrix& a) {
    return weighted_gram(a, std::vector<double>(a.cols(), 1.0));
}

inline DenseMatrix symmetrized(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("symmetrized: matrix not square");
    DenseMatrix s(a.rows(), a.cols());
    for (int j = 0; j < a.cols(); ++j)
        for (int i = 0; i < a.rows(); ++i)
            s(i, j) = 0.5 * (a(i, j) + a(j, i));
    return s;
}

inline double frobenius_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

inline double max_abs(const DenseMatrix& a) {
    double m = 0.0;
    for (double v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k)
        m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
    return m;
}

// Relative asymmetry check used as a precondition by the symmetric routines.
inline bool is_symmetric(const DenseMatrix& a, double rel_tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = max_abs(a);
    for (int j = 0; j < a.cols(); ++j)
        for (int i = j + 1; i < a.rows(); ++i)
            if (std::abs(a(i, j) - a(j, i)) > rel_tol * scale) return false;
    return true;
}

// B(i,j) = A(perm[i], perm[j]); used to move Sigma into a pivoted frame.
inline DenseMatrix permute_symmetric(const DenseMatrix& a, const std::vector<int>& perm) {
    if (a.rows() != a.cols() || static_cast<int>(perm.size()) != a.rows())
        throw DimensionError("permute_symmetric: shape mismatch");
    DenseMatrix b(a.rows(), a.cols());
    for (int j = 0; j < a.cols(); ++j)
        for (int i = 0; i < a.rows(); ++i)
            b(i, j) = a(perm[i], perm[j]);
    return b;
}

}  // namespace rcfcov::linalg
