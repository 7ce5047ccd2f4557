// Acceptance gate: each check below mirrors one numbered criterion from the
// project's acceptance list and prints exactly one PASS/FAIL line. Criteria
// 1-7 run by default; the full-scale sweep (criterion 8) is behind
// --full-scale because it takes minutes. --only N runs a single criterion.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rcfcov/estimators.hpp"
#include "rcfcov/evaluation.hpp"
#include "rcfcov/experiment.hpp"
#include "rcfcov/linalg.hpp"
#include "rcfcov/synthetic.hpp"
#include "test_helpers.hpp"

namespace {

using namespace rcfcov;
using linalg::DenseMatrix;
using linalg::PivotedQr;
using estimators::CovEstimate;
using estimators::EstimatorKind;
using estimators::SampleFactorization;
using evaluation::RiskRecord;
using evaluation::Scenario;
using synthetic::PopulationModel;
using synthetic::RngStream;
using synthetic::SpectrumSpec;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

// 1. Loss floor and congruence invariance on 100 random SPD pairs, p <= 20.
Outcome criterion1() {
    RngStream rng(9001);
    double worst_floor = 0.0;
    double worst_cong = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const int p = 3 + static_cast<int>(rng.next_u64() % 18);
        const DenseMatrix sigma = testutil::random_spd(p, rng);
        const DenseMatrix sigma_hat = testutil::random_spd(p, rng);
        const PopulationModel model = PopulationModel::from_sigma(sigma);

        worst_floor = std::max(worst_floor,
                               std::abs(evaluation::stein_loss(sigma, model) - p));

        const double base = evaluation::stein_loss(sigma_hat, model);
        const DenseMatrix a = testutil::random_well_conditioned(p, rng);
        const double moved = evaluation::stein_loss(
            testutil::congruence(a, sigma_hat),
            PopulationModel::from_sigma(testutil::congruence(a, sigma)));
        worst_cong = std::max(worst_cong, std::abs(moved - base));
    }
    return {worst_floor <= 1e-10 && worst_cong <= 1e-8,
            fmt("max floor deviation %.2e (tol 1e-10), max congruence deviation %.2e "
                "(tol 1e-8) over 100 pairs",
                worst_floor, worst_cong)};
}

// 2. Pivoted factorization fidelity over 1000 random Gaussian samples.
Outcome criterion2() {
    RngStream rng(9002);
    double worst_rel = 0.0;
    int diag_violations = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const int p = 4 + static_cast<int>(rng.next_u64() % 47);
        const int n = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(p - 1));
        const DenseMatrix x = testutil::random_matrix(p, n, rng);
        const PivotedQr qr = linalg::pivoted_qr_of_transpose(x);

        const DenseMatrix s = linalg::gram(x);
        const DenseMatrix s_perm = linalg::permute_symmetric(s, qr.perm);
        DenseMatrix resid = linalg::gram(qr.h);
        for (int j = 0; j < p; ++j)
            for (int i = 0; i < p; ++i) resid(i, j) -= s_perm(i, j);
        worst_rel = std::max(worst_rel,
                             linalg::frobenius_norm(resid) / linalg::frobenius_norm(s));
        for (int k = 0; k < n; ++k) {
            if (!(qr.h(k, k) > 0.0)) ++diag_violations;
            if (k + 1 < n && qr.h(k, k) < qr.h(k + 1, k + 1)) ++diag_violations;
        }
    }
    return {worst_rel <= 1e-9 && diag_violations == 0,
            fmt("1000 samples, max relative residual %.2e (tol 1e-9), "
                "%d diagonal-order violations",
                worst_rel, diag_violations)};
}

// 3. Monte-Carlo mean of the size-only-weighted estimator vs the closed form.
Outcome criterion3() {
    const std::vector<std::pair<int, int>> sizes{{10, 6}, {20, 12}, {40, 24}};
    bool pass = true;
    std::string detail;
    int index = 0;
    for (auto [p, n] : sizes) {
        const Scenario sc{cli::scenario_id(p, n, 16.0, 0.25), p, n, 16.0, 0.25};
        const RiskRecord rr = evaluation::run_risk(sc, EstimatorKind::Oracle, 2000,
                                                   RngStream(9003 + index));
        const double closed = evaluation::oracle_risk_closed_form(p, n);
        const double sigmas = std::abs(rr.mean_loss - closed) / rr.stderr_loss;
        pass = pass && sigmas <= 3.0;
        if (!detail.empty()) detail += ", ";
        detail += fmt("p=%d gap=%.1f stderr", p, sigmas);
        ++index;
    }
    return {pass, detail + " (tol 3 stderr, 2000 trials each)"};
}

// 4. Per-trial FSOPT dominance over Oracle and RCF, each within its frame.
Outcome criterion4() {
    const int p = 12;
    const int n = 8;
    const int trials = 500;
    RngStream rng(9004);
    RngStream model_rng = rng.child(0);
    const PopulationModel model = synthetic::build_population(
        SpectrumSpec{p, 0.25, synthetic::lambda_max_for_cond(64.0)}, model_rng);

    int oracle_violations = 0;
    int rcf_violations = 0;
    double worst_excess = 0.0;
    for (int t = 0; t < trials; ++t) {
        RngStream trial_rng = rng.child(1 + t);
        const DenseMatrix x = synthetic::sample_data(model, n, trial_rng);

        const SampleFactorization plain = estimators::factor_sample(x, false);
        const double fsopt_plain =
            evaluation::stein_loss(estimators::estimate_fsopt(plain, model).sigma_hat, model);
        const double oracle =
            evaluation::stein_loss(estimators::estimate_oracle(plain, model).sigma_hat, model);
        if (fsopt_plain > oracle + 1e-8) ++oracle_violations;
        worst_excess = std::max(worst_excess, fsopt_plain - oracle);

        const SampleFactorization pivoted = estimators::factor_sample(x, true);
        const double fsopt_piv =
            evaluation::stein_loss(estimators::estimate_fsopt(pivoted, model).sigma_hat, model);
        const double rcf =
            evaluation::stein_loss(estimators::estimate_rcf(x).sigma_hat, model);
        if (fsopt_piv > rcf + 1e-8) ++rcf_violations;
        worst_excess = std::max(worst_excess, fsopt_piv - rcf);
    }
    return {oracle_violations == 0 && rcf_violations == 0,
            fmt("%d/%d Oracle and %d/%d RCF violations (per-frame comparison, slack 1e-8, "
                "max FSOPT excess %.2e)",
                oracle_violations, trials, rcf_violations, trials, worst_excess)};
}

// 5. FSOPT weights vs independent golden-section minimization.
Outcome criterion5() {
    RngStream rng(9005);
    double worst_rel = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const int p = 4 + static_cast<int>(rng.next_u64() % 9);
        const int n = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(p - 1));
        const DenseMatrix sigma = testutil::random_spd(p, rng);
        const DenseMatrix x = testutil::random_matrix(p, n, rng);
        const SampleFactorization fact = estimators::factor_sample(x, false);
        const std::vector<double> weights = estimators::fsopt_weights(fact, sigma);

        const linalg::SymEigen eig = linalg::sym_eigen(sigma);
        const DenseMatrix g = fact.factor();
        for (int j = 0; j < n; ++j) {
            double q = 0.0;
            for (int k = 0; k < p; ++k) {
                double proj = 0.0;
                for (int i = 0; i < p; ++i) proj += eig.vectors(i, k) * g(i, j);
                q += proj * proj / eig.values[k];
            }
            const double opt = testutil::golden_min(
                [q](double v) { return v * q - std::log(v); }, 1e-10, 1e6);
            worst_rel = std::max(worst_rel, std::abs(weights[j] - opt) / opt);
        }
    }
    return {worst_rel <= 1e-6,
            fmt("50 instances, max relative gap to 1-D minimizer %.2e (tol 1e-6)", worst_rel)};
}

// 6. RCF positive definiteness at (50, 30) across extreme condition numbers.
Outcome criterion6() {
    double min_eig = 1e300;
    int index = 0;
    for (double cond : {4.0, 1024.0}) {
        RngStream rng(9006 + index++);
        RngStream model_rng = rng.child(0);
        const PopulationModel model = synthetic::build_population(
            SpectrumSpec{50, 0.25, synthetic::lambda_max_for_cond(cond)}, model_rng);
        for (int t = 0; t < 50; ++t) {
            RngStream trial_rng = rng.child(1 + t);
            const DenseMatrix x = synthetic::sample_data(model, 30, trial_rng);
            min_eig = std::min(min_eig,
                               testutil::min_eigenvalue(estimators::estimate_rcf(x).sigma_hat));
        }
    }
    return {min_eig > 0.0,
            fmt("100 trials at (p,n)=(50,30), cond in {4,1024}; smallest eigenvalue %.3e",
                min_eig)};
}

struct CurvePoint {
    double mean;
    double se;
};

// 7. Reduced-scale risk-curve orderings: flat RCF risk across condition
// numbers, growing LW-LS risk, RCF below LW-LS at cond 1024.
Outcome criterion7() {
    const int p = 60;
    const int n = 36;
    const int trials = 1000;
    const std::vector<double> conds{4.0, 64.0, 1024.0};
    RngStream root(9007);
    std::vector<CurvePoint> rcf;
    std::vector<CurvePoint> lwls;
    for (std::size_t i = 0; i < conds.size(); ++i) {
        const Scenario sc{cli::scenario_id(p, n, conds[i], 0.25), p, n, conds[i], 0.25};
        const RngStream scen_rng = root.child(i);
        const RiskRecord r1 = evaluation::run_risk(sc, EstimatorKind::RCF, trials, scen_rng);
        const RiskRecord r2 = evaluation::run_risk(sc, EstimatorKind::LWLS, trials, scen_rng);
        rcf.push_back({r1.mean_loss, r1.stderr_loss});
        lwls.push_back({r2.mean_loss, r2.stderr_loss});
    }
    std::size_t hi = 0;
    std::size_t lo = 0;
    for (std::size_t i = 1; i < rcf.size(); ++i) {
        if (rcf[i].mean > rcf[hi].mean) hi = i;
        if (rcf[i].mean < rcf[lo].mean) lo = i;
    }
    const double rcf_spread = rcf[hi].mean - rcf[lo].mean;
    const double rcf_pooled = std::sqrt(rcf[hi].se * rcf[hi].se + rcf[lo].se * rcf[lo].se);
    const double lw_growth = lwls[2].mean - lwls[0].mean;
    const double lw_pooled = std::sqrt(lwls[2].se * lwls[2].se + lwls[0].se * lwls[0].se);

    const bool flat = rcf_spread < 5.0 * rcf_pooled;
    const bool grows = lw_growth > 5.0 * lw_pooled;
    const bool ordered = rcf[2].mean < lwls[2].mean;
    return {flat && grows && ordered,
            fmt("RCF spread %.3f vs 5*pooled %.3f; LW-LS growth %.1f vs 5*pooled %.3f; "
                "at cond=1024 RCF %.1f %s LW-LS %.1f",
                rcf_spread, 5.0 * rcf_pooled, lw_growth, 5.0 * lw_pooled, rcf[2].mean,
                ordered ? "<" : ">=", lwls[2].mean)};
}

// 8. Full-scale smoke run of the default sweep grid at p=200.
Outcome criterion8() {
    cli::SweepConfig config;
    config.p = 200;
    config.n_values = {120};
    config.cond_values = {4, 16, 64, 256, 1024};
    config.eta_values = {0.25, 0.4};
    config.estimators = {EstimatorKind::Oracle, EstimatorKind::RCF, EstimatorKind::LWLS};
    config.trials = 200;
    config.seed = 9008;
    config.deterministic = true;

    std::vector<RiskRecord> records;
    try {
        records = cli::run_sweep(config, [](const RiskRecord& r) {
            std::printf("    %s %s mean_loss=%.4f stderr=%.4f\n", r.scenario.c_str(),
                        estimators::kind_name(r.estimator), r.mean_loss, r.stderr_loss);
            std::fflush(stdout);
        });
    } catch (const std::exception& e) {
        return {false, fmt("sweep raised: %s", e.what())};
    }
    if (records.size() != 30)
        return {false, fmt("expected 30 records, got %zu", records.size())};

    auto find = [&](double cond, double eta, EstimatorKind kind) -> const RiskRecord& {
        for (const RiskRecord& r : records)
            if (r.target_cond == cond && r.eta == eta && r.estimator == kind) return r;
        throw std::logic_error("record not found");
    };

    bool pass = true;
    std::string detail = "30 records";
    for (double eta : {0.25, 0.4}) {
        const RiskRecord& rcf4 = find(4, eta, EstimatorKind::RCF);
        const RiskRecord& rcf1024 = find(1024, eta, EstimatorKind::RCF);
        const RiskRecord& lw4 = find(4, eta, EstimatorKind::LWLS);
        const RiskRecord& lw1024 = find(1024, eta, EstimatorKind::LWLS);

        const double rcf_spread = std::abs(rcf1024.mean_loss - rcf4.mean_loss);
        const double rcf_pooled = std::sqrt(rcf1024.stderr_loss * rcf1024.stderr_loss +
                                            rcf4.stderr_loss * rcf4.stderr_loss);
        const double lw_growth = lw1024.mean_loss - lw4.mean_loss;
        const double lw_pooled = std::sqrt(lw1024.stderr_loss * lw1024.stderr_loss +
                                           lw4.stderr_loss * lw4.stderr_loss);
        const bool flat = rcf_spread < 5.0 * rcf_pooled;
        const bool grows = lw_growth > 5.0 * lw_pooled;
        const bool ordered = rcf1024.mean_loss < lw1024.mean_loss;
        pass = pass && flat && grows && ordered;
        detail += fmt("; eta=%.2f: RCF spread %.2f vs %.2f, LW-LS growth %.0f vs %.2f, "
                      "RCF %s LW-LS at cond=1024",
                      eta, rcf_spread, 5.0 * rcf_pooled, lw_growth, 5.0 * lw_pooled,
                      ordered ? "<" : ">=");
    }
    for (const RiskRecord& r : records)
        if (r.mean_loss < r.p) pass = false;
    return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
    bool full_scale = false;
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--full-scale") == 0) {
            full_scale = true;
        } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--full-scale] [--only N]\n", argv[0]);
            return 2;
        }
    }

    struct Entry {
        int id;
        const char* title;
        std::function<Outcome()> run;
    };
    const std::vector<Entry> entries{
        {1, "loss floor and congruence invariance", criterion1},
        {2, "pivoted factorization fidelity", criterion2},
        {3, "closed-form risk vs Monte-Carlo", criterion3},
        {4, "FSOPT per-trial dominance", criterion4},
        {5, "FSOPT weights vs 1-D minimizer", criterion5},
        {6, "RCF positive definiteness", criterion6},
        {7, "reduced-scale risk-curve orderings", criterion7},
        {8, "full-scale sweep smoke run", criterion8},
    };

    int failures = 0;
    int ran = 0;
    for (const Entry& entry : entries) {
        const bool selected = only != 0 ? entry.id == only : (entry.id < 8 || full_scale);
        if (!selected) continue;
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = entry.run();
        } catch (const std::exception& e) {
            outcome = {false, fmt("raised %s", e.what())};
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s: criterion %d (%s): %s [%.1f s]\n", outcome.pass ? "PASS" : "FAIL",
                    entry.id, entry.title, outcome.detail.c_str(), seconds);
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    if (ran == 0) {
        std::fprintf(stderr, "no criteria selected\n");
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
