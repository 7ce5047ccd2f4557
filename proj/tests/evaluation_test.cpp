#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rcfcov/evaluation.hpp"
#include "test_helpers.hpp"

using Catch::Approx;
using namespace rcfcov;
using namespace rcfcov::linalg;
using namespace rcfcov::evaluation;
using estimators::EstimatorKind;
using synthetic::PopulationModel;
using synthetic::RngStream;
using testutil::congruence;
using testutil::digamma_reference;
using testutil::random_spd;
using testutil::random_well_conditioned;

TEST_CASE("Stein loss floors at the truth", "[evaluation]") {
    RngStream rng(401);
    for (int p : {3, 8, 20}) {
        const DenseMatrix sigma = random_spd(p, rng);
        const PopulationModel model = PopulationModel::from_sigma(sigma);
        REQUIRE(stein_loss(sigma, model) == Approx(static_cast<double>(p)).margin(1e-10));

        const DenseMatrix other = random_spd(p, rng);
        REQUIRE(stein_loss(other, model) >= p);
    }

    const PopulationModel id6 = PopulationModel::from_sigma(DenseMatrix::identity(6));
    DenseMatrix bumped = DenseMatrix::identity(6);
    bumped(0, 0) = 2.0;
    REQUIRE(stein_loss(bumped, id6) == Approx(7.0 - std::log(2.0)).margin(1e-12));
}

TEST_CASE("Stein loss is invariant under congruence", "[evaluation]") {
    RngStream rng(402);
    const int p = 8;
    const DenseMatrix sigma = random_spd(p, rng);
    const DenseMatrix sigma_hat = random_spd(p, rng);
    const double base = stein_loss(sigma_hat, PopulationModel::from_sigma(sigma));
    for (int rep = 0; rep < 5; ++rep) {
        const DenseMatrix a = random_well_conditioned(p, rng);
        const double moved = stein_loss(congruence(a, sigma_hat),
                                        PopulationModel::from_sigma(congruence(a, sigma)));
        REQUIRE(moved == Approx(base).margin(1e-8));
    }
}

TEST_CASE("Stein loss rejects invalid estimates", "[evaluation]") {
    const PopulationModel id2 = PopulationModel::from_sigma(DenseMatrix::identity(2));
    REQUIRE_THROWS_AS(stein_loss(DenseMatrix(2, 2, {1, 2, 2, 1}), id2), NotPositiveDefinite);
    REQUIRE_THROWS_AS(stein_loss(DenseMatrix(3, 3), id2), DimensionError);
}

TEST_CASE("Closed-form risk evaluates exactly at the smallest case", "[evaluation]") {
    // -(log2 + psi(1/2)) + 1 + log 2 + 1 = 2 + gamma + 2 log 2
    REQUIRE(oracle_risk_closed_form(2, 1) == Approx(3.9635100260214235).margin(1e-12));
    REQUIRE_THROWS_AS(oracle_risk_closed_form(5, 0), DimensionError);
    REQUIRE_THROWS_AS(oracle_risk_closed_form(5, 5), DimensionError);
}

TEST_CASE("Closed-form risk matches an independent digamma evaluation", "[evaluation]") {
    for (auto [p, n] : std::vector<std::pair<int, int>>{{20, 12}, {41, 7}, {10, 9}}) {
        double expected = p - n;
        for (int j = 1; j <= n; ++j) {
            expected += -(std::log(2.0) + digamma_reference(0.5 * (n - j + 1))) + 1.0 +
                        std::log(static_cast<double>(p + n - 2 * j + 1));
        }
        REQUIRE(oracle_risk_closed_form(p, n) == Approx(expected).margin(1e-7));
    }
}

TEST_CASE("Closed-form risk peaks in the interior of the sample range", "[evaluation]") {
    std::vector<double> risk(20);
    for (int n = 1; n <= 19; ++n) risk[n] = oracle_risk_closed_form(20, n);

    REQUIRE(risk[1] == Approx(24.266095).margin(1e-5));
    REQUIRE(risk[14] == Approx(39.098482).margin(1e-5));
    REQUIRE(risk[19] == Approx(37.177356).margin(1e-5));

    int argmax = 1;
    for (int n = 2; n <= 19; ++n)
        if (risk[n] > risk[argmax]) argmax = n;
    REQUIRE(argmax == 14);
    for (int n = 1; n < 14; ++n) REQUIRE(risk[n] < risk[n + 1]);
    for (int n = 14; n < 19; ++n) REQUIRE(risk[n] > risk[n + 1]);
    REQUIRE(risk[19] > risk[1]);
}

TEST_CASE("Monte-Carlo risk agrees with the closed form", "[evaluation]") {
    const Scenario sc{"unit_p10_n6", 10, 6, 16.0, 0.25};
    const RiskRecord rr = run_risk(sc, EstimatorKind::Oracle, 800, RngStream(403));
    const double closed = oracle_risk_closed_form(10, 6);
    REQUIRE(std::abs(rr.mean_loss - closed) <= 4.0 * rr.stderr_loss);
    REQUIRE(rr.mean_loss >= 10.0);
    REQUIRE(rr.stderr_loss > 0.0);
    REQUIRE(rr.trials == 800);
    REQUIRE(rr.realized_cond > 1.0);
    REQUIRE(rr.seed == 403);
    REQUIRE(rr.scenario == "unit_p10_n6");
}

TEST_CASE("Risk records are deterministic and thread-invariant", "[evaluation]") {
    const Scenario sc{"unit_p12_n7", 12, 7, 64.0, 0.25};
    const RiskRecord a = run_risk(sc, EstimatorKind::RCF, 120, RngStream(404), 1);
    const RiskRecord b = run_risk(sc, EstimatorKind::RCF, 120, RngStream(404), 1);
    const RiskRecord c = run_risk(sc, EstimatorKind::RCF, 120, RngStream(404), 3);
    REQUIRE(a.mean_loss == b.mean_loss);
    REQUIRE(a.stderr_loss == b.stderr_loss);
    REQUIRE(a.mean_loss == c.mean_loss);
    REQUIRE(a.stderr_loss == c.stderr_loss);
    REQUIRE(a.realized_cond == c.realized_cond);
    REQUIRE_THROWS_AS(run_risk(sc, EstimatorKind::RCF, 1, RngStream(404)), DomainError);
}

TEST_CASE("FSOPT risk does not exceed Oracle risk", "[evaluation]") {
    const Scenario sc{"unit_p16_n10", 16, 10, 256.0, 0.25};
    const RngStream shared(405);
    const RiskRecord fsopt = run_risk(sc, EstimatorKind::FSOPT, 300, shared);
    const RiskRecord oracle = run_risk(sc, EstimatorKind::Oracle, 300, shared);
    REQUIRE(fsopt.mean_loss <= oracle.mean_loss);
    // Same stream, same population: the comparison is paired.
    REQUIRE(fsopt.realized_cond == oracle.realized_cond);
}
