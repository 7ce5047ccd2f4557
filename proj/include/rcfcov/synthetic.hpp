#pragma once
// Synthetic populations: two-band eigenvalue spectra rotated by a Haar
// orthogonal basis, Gaussian sampling through the population Cholesky factor,
// and the Bartlett sampler for the standard-Wishart factor.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "rcfcov/linalg.hpp"
#include "rcfcov/matrix.hpp"
#include "rcfcov/rng.hpp"

namespace rcfcov::synthetic {

using linalg::DenseMatrix;
using linalg::LowerTriangular;
using linalg::SymEigen;
using linalg::cholesky;
using linalg::gram;
using linalg::qr_of_transpose;
using linalg::sym_eigen;
using linalg::symmetrized;
using linalg::transpose;
using linalg::tri_mul_lower;
using linalg::weighted_gram;

// Eigenvalue layout: round(eta * p) draws on [lambda_max/2, lambda_max], the
// rest on [0.5, 1]. lambda_max >= 1 keeps the large band's support ratio
// consistent with a target condition number >= 2.
struct SpectrumSpec {
    int p = 0;
    double eta = 0.0;
    double lambda_max = 1.0;

    int large_count() const { return static_cast<int>(std::lround(eta * p)); }

    void validate() const {
        if (p < 1)
            throw DomainError("SpectrumSpec: p must be >= 1");
        if (!(eta >= 0.0 && eta < 1.0))
            throw DomainError("SpectrumSpec: eta must lie in [0, 1)");
        if (!(lambda_max >= 1.0))
            throw DomainError("SpectrumSpec: lambda_max must be >= 1");
        if (large_count() >= p)
            throw DomainError("SpectrumSpec: large-eigenvalue count must be < p");
    }
};

// Largest spectrum support value giving support ratio lambda_max / 0.5 equal
// to the target condition number.
inline double lambda_max_for_cond(double target_cond) {
    if (!(target_cond >= 2.0))
        throw DomainError("lambda_max_for_cond: target_cond must be >= 2");
    return 0.5 * target_cond;
}

// Haar-distributed orthogonal matrix: QR of a standard Gaussian square
// matrix with the R diagonal forced positive.
inline DenseMatrix haar_orthogonal(int p, RngStream& rng) {
    DenseMatrix a(p, p);
    for (int j = 0; j < p; ++j) {
        double* aj = a.col(j);
        for (int i = 0; i < p; ++i) aj[i] = rng.normal();
    }
    return qr_of_transpose(transpose(a), false).q;
}

struct PopulationModel {
    DenseMatrix sigma;
    LowerTriangular chol_l;
    std::vector<double> eigenvalues;  // descending
    SpectrumSpec spectrum;
    double cond = 1.0;

    int p() const { return sigma.rows(); }

    // Schur complement of the leading n-by-n block in the natural row order:
    // Sigma_22 - Sigma_21 Sigma_11^{-1} Sigma_12 = L_22 L_22^T.
    DenseMatrix schur_complement(int n) const {
        if (n < 1 || n >= p())
            throw DimensionError("schur_complement: need 1 <= n < p");
        return gram(chol_l.trailing_block(n).to_dense());
    }

    static PopulationModel from_sigma(DenseMatrix sigma_in, SpectrumSpec spectrum = {}) {
        DenseMatrix sigma = symmetrized(sigma_in);
        LowerTriangular l = cholesky(sigma);
        SymEigen eig = sym_eigen(sigma);
        const double cond = eig.values.front() / eig.values.back();
        return PopulationModel{std::move(sigma), std::move(l), std::move(eig.values),
                               spectrum, cond};
    }
};

// Fixed-population constructor: Sigma = V diag(lambda) V^T with lambda per
// the spectrum spec and V Haar. The drawn eigenvalues are the exact spectrum
// of Sigma, so cond comes straight from them.
inline PopulationModel build_population(const SpectrumSpec& spec, RngStream& rng) {
    spec.validate();
    const int p = spec.p;
    const int n_large = spec.large_count();
    std::vector<double> lambda(p);
    for (int i = 0; i < n_large; ++i)
        lambda[i] = rng.uniform(0.5 * spec.lambda_max, spec.lambda_max);
    for (int i = n_large; i < p; ++i)
        lambda[i] = rng.uniform(0.5, 1.0);
    std::sort(lambda.begin(), lambda.end(), std::greater<double>());

    const DenseMatrix v = haar_orthogonal(p, rng);
    DenseMatrix sigma = symmetrized(weighted_gram(v, lambda));
    LowerTriangular l = cholesky(sigma);
    const double cond = lambda.front() / lambda.back();
    return PopulationModel{std::move(sigma), std::move(l), std::move(lambda), spec, cond};
}

// X = L Z, Z standard normal p-by-n, filled column by column.
inline DenseMatrix sample_data(const PopulationModel& model, int n, RngStream& rng) {
    const int p = model.p();
    if (n < 1 || n >= p)
        throw DimensionError("sample_data: need 1 <= n < p");
    DenseMatrix z(p, n);
    for (int j = 0; j < n; ++j) {
        double* zj = z.col(j);
        for (int i = 0; i < p; ++i) zj[i] = rng.normal();
    }
    return tri_mul_lower(model.chol_l, z);
}

// Bartlett factor of a standard Wishart: column j (1-based) has diagonal
// sqrt(chi^2_{n-j+1}) and standard-normal entries below it.
inline DenseMatrix sample_bartlett_factor(int p, int n, RngStream& rng) {
    if (n < 1 || n >= p)
        throw DimensionError("sample_bartlett_factor: need 1 <= n < p");
    DenseMatrix g(p, n);
    for (int j = 0; j < n; ++j) {
        double* gj = g.col(j);
        gj[j] = std::sqrt(rng.chi_square(n - j));
        for (int i = j + 1; i < p; ++i) gj[i] = rng.normal();
    }
    return g;
}

}  // namespace rcfcov::synthetic
