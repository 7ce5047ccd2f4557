#pragma once
// The four covariance estimators. FSOPT and Oracle take a sample
// factorization plus the true population; they work in whatever frame the
// factorization uses (identity or pivoted row order) because the loss-
// minimizing weights and tail block are frame-local quantities. RCF and the
// linear-shrinkage baseline use only the data.

#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcfcov/linalg.hpp"
#include "rcfcov/matrix.hpp"
#include "rcfcov/synthetic.hpp"

namespace rcfcov::estimators {

using linalg::DenseMatrix;
using linalg::LowerTriangular;
using linalg::PivotedQr;
using linalg::cholesky;
using linalg::gram;
using linalg::permute_symmetric;
using linalg::qr_of_transpose;
using linalg::transpose;
using linalg::tri_solve_lower;
using linalg::weighted_gram;
using synthetic::PopulationModel;

enum class EstimatorKind { FSOPT, Oracle, RCF, LWLS };

inline const char* kind_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::FSOPT: return "FSOPT";
        case EstimatorKind::Oracle: return "Oracle";
        case EstimatorKind::RCF: return "RCF";
        case EstimatorKind::LWLS: return "LWLS";
    }
    return "?";
}

// Partial Cholesky factor of X X^T in a chosen row order: rows perm of X
// satisfy [h11; h21] [h11; h21]^T = Pi^T X X^T Pi. q is the orthogonal
// factor of the underlying QR, kept for tests.
struct SampleFactorization {
    LowerTriangular h11;
    DenseMatrix h21;
    std::vector<int> perm;
    DenseMatrix q;
    bool pivoted = false;

    int n() const { return h11.dim(); }
    int p() const { return h11.dim() + h21.rows(); }

    // Stacked p x n factor [h11; h21].
    DenseMatrix factor() const {
        const int nn = n();
        const int pp = p();
        DenseMatrix g(pp, nn);
        for (int j = 0; j < nn; ++j) {
            double* gj = g.col(j);
            for (int i = j; i < nn; ++i) gj[i] = h11.entry(i, j);
            for (int i = nn; i < pp; ++i) gj[i] = h21(i - nn, j);
        }
        return g;
    }
};

struct CovEstimate {
    DenseMatrix sigma_hat;
    EstimatorKind kind;
    std::vector<double> d;  // diagonal of D (p entries); empty for LWLS
    std::optional<double> alpha;
    std::optional<double> beta;
};

inline SampleFactorization factor_sample(const DenseMatrix& x, bool pivot) {
    const int p = x.rows();
    const int n = x.cols();
    if (n >= p)
        throw DimensionError("factor_sample: need n < p");
    PivotedQr qr = qr_of_transpose(x, pivot);
    LowerTriangular h11(n);
    for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i) h11.at(i, j) = qr.h(i, j);
    DenseMatrix h21(p - n, n);
    for (int j = 0; j < n; ++j)
        for (int i = n; i < p; ++i) h21(i - n, j) = qr.h(i, j);
    return SampleFactorization{std::move(h11), std::move(h21), std::move(qr.perm),
                               std::move(qr.q), pivot};
}

// d_j = 1/(p + n - 2j + 1), j = 1..n. Depends only on the sizes.
inline std::vector<double> oracle_weights(int p, int n) {
    if (n < 1 || n >= p)
        throw DimensionError("oracle_weights: need 1 <= n < p");
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = 1.0 / (p + n - 2 * i - 1);
    return d;
}

namespace detail {

inline std::vector<int> inverse_permutation(const std::vector<int>& perm) {
    std::vector<int> inv(perm.size());
    for (int i = 0; i < static_cast<int>(perm.size()); ++i) inv[perm[i]] = i;
    return inv;
}

// Sigma in the factorization's row order.
inline DenseMatrix sigma_in_frame(const SampleFactorization& fact, const DenseMatrix& sigma) {
    if (sigma.rows() != fact.p() || sigma.cols() != fact.p())
        throw DimensionError("sigma_in_frame: population size mismatch");
    return permute_symmetric(sigma, fact.perm);
}

// Sigma_hat = Pi (G diag(d1) G^T + [0 0; 0 tail]) Pi^T for the frame of fact.
inline DenseMatrix assemble_in_frame(const SampleFactorization& fact,
                                     const std::vector<double>& d1,
                                     const DenseMatrix& tail) {
    const int n = fact.n();
    const int p = fact.p();
    DenseMatrix s = weighted_gram(fact.factor(), d1);
    for (int j = 0; j < p - n; ++j)
        for (int i = 0; i < p - n; ++i) s(n + i, n + j) += tail(i, j);
    return permute_symmetric(s, inverse_permutation(fact.perm));
}

inline std::vector<double> with_tail(std::vector<double> d1, int p, double tail_value) {
    d1.resize(p, tail_value);
    return d1;
}

}  // namespace detail

// d_j = 1/(g_j^T Sigma^-1 g_j) with g_j the j-th column of the factor and
// Sigma taken in the factorization's frame.
inline std::vector<double> fsopt_weights(const SampleFactorization& fact,
                                         const DenseMatrix& sigma) {
    const LowerTriangular l = cholesky(detail::sigma_in_frame(fact, sigma));
    const DenseMatrix w = tri_solve_lower(l, fact.factor());
    std::vector<double> d(fact.n());
    for (int j = 0; j < fact.n(); ++j) {
        const double* wj = w.col(j);
        double q = 0.0;
        for (int i = 0; i < fact.p(); ++i) q += wj[i] * wj[i];
        d[j] = 1.0 / q;
    }
    return d;
}

// Per-realization optimum: loss-minimizing weights on the sample factor and
// the exact Schur-complement tail. Requires the true Sigma.
inline CovEstimate estimate_fsopt(const SampleFactorization& fact,
                                  const PopulationModel& model) {
    const int n = fact.n();
    const DenseMatrix sigma_f = detail::sigma_in_frame(fact, model.sigma);
    const LowerTriangular l = cholesky(sigma_f);

    const DenseMatrix w = tri_solve_lower(l, fact.factor());
    std::vector<double> d1(n);
    for (int j = 0; j < n; ++j) {
        const double* wj = w.col(j);
        double q = 0.0;
        for (int i = 0; i < fact.p(); ++i) q += wj[i] * wj[i];
        d1[j] = 1.0 / q;
    }

    const DenseMatrix tail = gram(l.trailing_block(n).to_dense());
    DenseMatrix sigma_hat = detail::assemble_in_frame(fact, d1, tail);
    return CovEstimate{std::move(sigma_hat), EstimatorKind::FSOPT,
                       detail::with_tail(std::move(d1), fact.p(), 1.0),
                       std::nullopt, std::nullopt};
}

// Risk minimizer: size-only weights, same exact tail as FSOPT.
inline CovEstimate estimate_oracle(const SampleFactorization& fact,
                                   const PopulationModel& model) {
    const int n = fact.n();
    std::vector<double> d1 = oracle_weights(fact.p(), n);
    const LowerTriangular l = cholesky(detail::sigma_in_frame(fact, model.sigma));
    const DenseMatrix tail = gram(l.trailing_block(n).to_dense());
    DenseMatrix sigma_hat = detail::assemble_in_frame(fact, d1, tail);
    return CovEstimate{std::move(sigma_hat), EstimatorKind::Oracle,
                       detail::with_tail(std::move(d1), fact.p(), 1.0),
                       std::nullopt, std::nullopt};
}

// The practical estimator: pivoted factorization, oracle weights on the
// leading block, and the data-driven tail alpha^2 * beta * I, where alpha is
// the smallest factor diagonal and beta the last oracle weight.
inline CovEstimate estimate_rcf(const DenseMatrix& x) {
    const SampleFactorization fact = factor_sample(x, true);
    const int p = fact.p();
    const int n = fact.n();
    const double alpha = fact.h11.diag(n - 1);
    const double beta = 1.0 / (p - n + 1);
    std::vector<double> d1 = oracle_weights(p, n);

    DenseMatrix tail(p - n, p - n);
    const double mass = alpha * alpha * beta;
    for (int i = 0; i < p - n; ++i) tail(i, i) = mass;

    DenseMatrix sigma_hat = detail::assemble_in_frame(fact, d1, tail);
    return CovEstimate{std::move(sigma_hat), EstimatorKind::RCF,
                       detail::with_tail(std::move(d1), p, beta), alpha, beta};
}

// Ledoit-Wolf linear shrinkage toward a scaled identity, on S/n. If the
// sample covariance is already a multiple of the identity it is returned
// unchanged (the shrinkage target coincides with it).
inline CovEstimate estimate_lwls(const DenseMatrix& x) {
    const int p = x.rows();
    const int n = x.cols();
    if (n < 2)
        throw DimensionError("estimate_lwls: need n >= 2");

    DenseMatrix s_bar = gram(x);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < p; ++i) s_bar(i, j) /= n;

    double m = 0.0;
    for (int j = 0; j < p; ++j) m += s_bar(j, j);
    m /= p;

    double d2 = 0.0;
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < p; ++i) {
            const double v = s_bar(i, j) - (i == j ? m : 0.0);
            d2 += v * v;
        }
    d2 /= p;

    if (d2 == 0.0) {
        DenseMatrix sigma_hat(p, p);
        for (int j = 0; j < p; ++j) sigma_hat(j, j) = m;
        return CovEstimate{std::move(sigma_hat), EstimatorKind::LWLS, {},
                           std::nullopt, std::nullopt};
    }

    // sum_k ||x_k x_k^T - S_bar||_F^2 = sum_k ||x_k||^4 - n ||S_bar||_F^2.
    double sum4 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double* xk = x.col(k);
        double nk = 0.0;
        for (int i = 0; i < p; ++i) nk += xk[i] * xk[i];
        sum4 += nk * nk;
    }
    double sbar_f2 = 0.0;
    for (double v : s_bar.data()) sbar_f2 += v * v;
    const double b2_raw = std::max(0.0, (sum4 - n * sbar_f2) / (n * n) / p);
    const double b2 = std::min(d2, b2_raw);
    const double rho1 = b2 / d2;
    const double rho2 = 1.0 - rho1;

    DenseMatrix sigma_hat(p, p);
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i < p; ++i) sigma_hat(i, j) = rho2 * s_bar(i, j);
        sigma_hat(j, j) += rho1 * m;
    }
    return CovEstimate{std::move(sigma_hat), EstimatorKind::LWLS, {},
                       std::nullopt, std::nullopt};
}

}  // namespace rcfcov::estimators
