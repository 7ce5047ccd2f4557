#pragma once
// Stein's loss, the closed-form risk of the size-only-weighted estimator,
// and the Monte-Carlo risk harness. The loss is tr(A) - log det(A) with
// A = Sigma_hat Sigma^-1; its floor is p, reached only at Sigma_hat = Sigma.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rcfcov/estimators.hpp"
#include "rcfcov/linalg.hpp"
#include "rcfcov/matrix.hpp"
#include "rcfcov/special.hpp"
#include "rcfcov/synthetic.hpp"

namespace rcfcov::evaluation {

using estimators::CovEstimate;
using estimators::EstimatorKind;
using linalg::DenseMatrix;
using linalg::LowerTriangular;
using linalg::cholesky;
using linalg::digamma;
using linalg::symmetrized;
using linalg::transpose;
using linalg::tri_solve_lower;
using synthetic::PopulationModel;
using synthetic::RngStream;
using synthetic::SpectrumSpec;

// Stein's loss of sigma_hat against the model's population. Computed as
// tr(A) - log det(A) with A = L^-1 sigma_hat L^-T, so only triangular solves
// and one Cholesky of A touch the inverse.
inline double stein_loss(const DenseMatrix& sigma_hat, const PopulationModel& model) {
    const int p = model.p();
    if (sigma_hat.rows() != p || sigma_hat.cols() != p)
        throw DimensionError("stein_loss: dimension mismatch");
    const DenseMatrix w = tri_solve_lower(model.chol_l, sigma_hat);
    const DenseMatrix a = symmetrized(tri_solve_lower(model.chol_l, transpose(w)));
    double trace = 0.0;
    for (int j = 0; j < p; ++j) trace += a(j, j);
    const LowerTriangular c = cholesky(a);  // NotPositiveDefinite if sigma_hat is not SPD
    double log_det = 0.0;
    for (int j = 0; j < p; ++j) log_det += std::log(c.diag(j));
    return trace - 2.0 * log_det;
}

// Exact risk of the size-only-weighted estimator with the true tail block:
// sum_j [ -E log chi2_{n-j+1} + 1 + log(p+n-2j+1) ] + (p - n), using
// E log chi2_k = log 2 + digamma(k/2).
inline double oracle_risk_closed_form(int p, int n) {
    if (n < 1 || n >= p)
        throw DimensionError("oracle_risk_closed_form: need 1 <= n < p");
    double risk = static_cast<double>(p - n);
    for (int j = 1; j <= n; ++j) {
        const double e_log_chi2 = std::log(2.0) + digamma(0.5 * (n - j + 1));
        risk += -e_log_chi2 + 1.0 + std::log(static_cast<double>(p + n - 2 * j + 1));
    }
    return risk;
}

struct Scenario {
    std::string id;
    int p = 0;
    int n = 0;
    double target_cond = 2.0;
    double eta = 0.0;
};

struct RiskRecord {
    std::string scenario;
    int p = 0;
    int n = 0;
    double target_cond = 0.0;
    double realized_cond = 0.0;
    double eta = 0.0;
    EstimatorKind estimator = EstimatorKind::RCF;
    int trials = 0;
    double mean_loss = 0.0;
    double stderr_loss = 0.0;
    std::uint64_t seed = 0;
};

namespace detail {

inline CovEstimate run_estimator(EstimatorKind kind, const DenseMatrix& x,
                                 const PopulationModel& model) {
    switch (kind) {
        case EstimatorKind::FSOPT:
            return estimators::estimate_fsopt(estimators::factor_sample(x, false), model);
        case EstimatorKind::Oracle:
            return estimators::estimate_oracle(estimators::factor_sample(x, false), model);
        case EstimatorKind::RCF:
            return estimators::estimate_rcf(x);
        case EstimatorKind::LWLS:
            return estimators::estimate_lwls(x);
    }
    throw std::logic_error("run_estimator: unknown estimator kind");
}

}  // namespace detail

// Monte-Carlo risk of one estimator on one scenario. The population is fixed
// per scenario (stream child 0); trial t draws its data from stream child
// t+1, so the trial set is independent of scheduling and the reduction is in
// trial order regardless of thread count. Passing the same stream for
// different estimators reuses the same population and the same data draws.
inline RiskRecord run_risk(const Scenario& scenario, EstimatorKind kind, int trials,
                           RngStream rng, int threads = 1) {
    if (trials < 2)
        throw DomainError("run_risk: need trials >= 2");
    RngStream model_rng = rng.child(0);
    const SpectrumSpec spec{scenario.p, scenario.eta,
                            synthetic::lambda_max_for_cond(scenario.target_cond)};
    const PopulationModel model = synthetic::build_population(spec, model_rng);

    std::vector<double> losses(trials);
    auto run_range = [&](int lo, int hi) {
        for (int t = lo; t < hi; ++t) {
            RngStream trial_rng = rng.child(1 + static_cast<std::uint64_t>(t));
            const DenseMatrix x = synthetic::sample_data(model, scenario.n, trial_rng);
            const CovEstimate est = detail::run_estimator(kind, x, model);
            losses[t] = stein_loss(est.sigma_hat, model);
        }
    };

    if (threads <= 1) {
        run_range(0, trials);
    } else {
        const int workers = std::min(threads, trials);
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (int w = 0; w < workers; ++w) {
            const int lo = static_cast<int>(static_cast<long long>(trials) * w / workers);
            const int hi = static_cast<int>(static_cast<long long>(trials) * (w + 1) / workers);
            pool.emplace_back([&, w, lo, hi] {
                try {
                    run_range(lo, hi);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& err : errors)
            if (err) std::rethrow_exception(err);
    }

    double mean = 0.0;
    for (double v : losses) mean += v;
    mean /= trials;
    double ss = 0.0;
    for (double v : losses) ss += (v - mean) * (v - mean);
    const double stderr_loss = std::sqrt(ss / (trials - 1) / trials);

    return RiskRecord{scenario.id, scenario.p,  scenario.n, scenario.target_cond,
                      model.cond,  scenario.eta, kind,       trials,
                      mean,        stderr_loss,  rng.seed()};
}

}  // namespace rcfcov::evaluation
