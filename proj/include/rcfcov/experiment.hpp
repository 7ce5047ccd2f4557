#pragma once
// Sweep configuration, the flat key=value config-file reader, CSV emission,
// and the built-in self-test. This is the layer the command-line tool calls;
// everything below it is pure library code.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rcfcov/errors.hpp"
#include "rcfcov/estimators.hpp"
#include "rcfcov/evaluation.hpp"
#include "rcfcov/special.hpp"
#include "rcfcov/synthetic.hpp"

namespace rcfcov::cli {

using estimators::EstimatorKind;
using evaluation::RiskRecord;
using evaluation::Scenario;
using synthetic::RngStream;

struct SweepConfig {
    int p = 200;
    std::vector<int> n_values{120};
    std::vector<double> cond_values{4, 16, 64, 256, 1024};
    std::vector<double> eta_values{0.25, 0.4};
    std::vector<EstimatorKind> estimators{EstimatorKind::Oracle, EstimatorKind::RCF,
                                          EstimatorKind::LWLS};
    int trials = 200;
    std::uint64_t seed = 20240601;
    std::string out_path = "sweep.csv";
    bool deterministic = false;
    int threads = 1;

    void validate() const {
        if (p < 2)
            throw ConfigError("p must be >= 2");
        if (n_values.empty())
            throw ConfigError("n list must not be empty");
        for (int n : n_values)
            if (n < 1 || n >= p)
                throw ConfigError("every n must satisfy 1 <= n < p");
        if (cond_values.empty())
            throw ConfigError("cond list must not be empty");
        for (double c : cond_values)
            if (!(c >= 2.0))
                throw ConfigError("every cond must be >= 2");
        if (eta_values.empty())
            throw ConfigError("eta list must not be empty");
        for (double e : eta_values) {
            if (!(e >= 0.0 && e <= 0.95))
                throw ConfigError("every eta must lie in [0, 0.95]");
            if (std::lround(e * p) >= p)
                throw ConfigError("eta * p rounds to p; no small eigenvalues left");
        }
        if (estimators.empty())
            throw ConfigError("estimator list must not be empty");
        if (trials < 2)
            throw ConfigError("trials must be >= 2");
        if (threads < 1)
            throw ConfigError("threads must be >= 1");
        if (out_path.empty())
            throw ConfigError("output path must not be empty");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline int parse_int(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse integer for " + what + ": '" + s + "'");
    }
}

inline double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse number for " + what + ": '" + s + "'");
    }
}

inline std::uint64_t parse_seed(const std::string& s) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse seed: '" + s + "'");
    }
}

inline bool parse_bool(const std::string& s, const std::string& what) {
    const std::string v = lower(s);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("cannot parse boolean for " + what + ": '" + s + "'");
}

inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace detail

inline EstimatorKind parse_estimator(const std::string& name) {
    const std::string v = detail::lower(detail::trim(name));
    if (v == "fsopt") return EstimatorKind::FSOPT;
    if (v == "oracle") return EstimatorKind::Oracle;
    if (v == "rcf") return EstimatorKind::RCF;
    if (v == "lwls") return EstimatorKind::LWLS;
    throw ConfigError("unknown estimator: '" + name + "'");
}

inline std::vector<EstimatorKind> parse_estimator_list(const std::string& list) {
    std::vector<EstimatorKind> kinds;
    for (const std::string& item : detail::split_list(list)) kinds.push_back(parse_estimator(item));
    return kinds;
}

inline std::vector<int> parse_int_list(const std::string& list, const std::string& what) {
    std::vector<int> values;
    for (const std::string& item : detail::split_list(list))
        values.push_back(detail::parse_int(item, what));
    return values;
}

inline std::vector<double> parse_double_list(const std::string& list, const std::string& what) {
    std::vector<double> values;
    for (const std::string& item : detail::split_list(list))
        values.push_back(detail::parse_double(item, what));
    return values;
}

// Flat key=value file; '#' starts a comment, lists are comma-separated.
// Recognized keys: p, n, cond, eta, estimators, trials, seed, out,
// deterministic, threads.
inline void apply_config_file(SweepConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + " is not key=value");
        const std::string key = detail::lower(detail::trim(line.substr(0, eq)));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key == "p") config.p = detail::parse_int(value, "p");
        else if (key == "n") config.n_values = parse_int_list(value, "n");
        else if (key == "cond") config.cond_values = parse_double_list(value, "cond");
        else if (key == "eta") config.eta_values = parse_double_list(value, "eta");
        else if (key == "estimators") config.estimators = parse_estimator_list(value);
        else if (key == "trials") config.trials = detail::parse_int(value, "trials");
        else if (key == "seed") config.seed = detail::parse_seed(value);
        else if (key == "out") config.out_path = value;
        else if (key == "deterministic") config.deterministic = detail::parse_bool(value, key);
        else if (key == "threads") config.threads = detail::parse_int(value, "threads");
        else throw ConfigError("unknown config key: '" + key + "'");
    }
}

inline std::string scenario_id(int p, int n, double cond, double eta) {
    return "p" + std::to_string(p) + "_n" + std::to_string(n) + "_cond" +
           detail::fmt_short(cond) + "_eta" + detail::fmt_short(eta);
}

// One record per (n, cond, eta, estimator) grid point, in that nesting
// order. Every estimator at a grid point receives the same stream, hence the
// same population and the same data draws (paired comparisons).
inline std::vector<RiskRecord> run_sweep(
    const SweepConfig& config,
    const std::function<void(const RiskRecord&)>& on_record = {}) {
    config.validate();
    const RngStream root(config.seed);
    std::vector<RiskRecord> records;
    std::uint64_t grid_index = 0;
    for (int n : config.n_values) {
        for (double cond : config.cond_values) {
            for (double eta : config.eta_values) {
                const Scenario scenario{scenario_id(config.p, n, cond, eta), config.p, n,
                                        cond, eta};
                const RngStream scenario_rng = root.child(grid_index++);
                for (EstimatorKind kind : config.estimators) {
                    records.push_back(evaluation::run_risk(scenario, kind, config.trials,
                                                           scenario_rng, config.threads));
                    if (on_record) on_record(records.back());
                }
            }
        }
    }
    return records;
}

inline void write_csv(const std::vector<RiskRecord>& records, std::ostream& os,
                      bool deterministic) {
    if (!deterministic) {
        std::time_t now = std::time(nullptr);
        std::tm tm{};
        gmtime_r(&now, &tm);
        char buf[40];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        os << "# generated " << buf << "\n";
    }
    os << "scenario,p,n,target_cond,realized_cond,eta,estimator,trials,"
          "mean_loss,stderr_loss,seed\n";
    for (const RiskRecord& r : records) {
        os << r.scenario << ',' << r.p << ',' << r.n << ',' << detail::fmt_g(r.target_cond)
           << ',' << detail::fmt_g(r.realized_cond) << ',' << detail::fmt_g(r.eta) << ','
           << estimators::kind_name(r.estimator) << ',' << r.trials << ','
           << detail::fmt_g(r.mean_loss) << ',' << detail::fmt_g(r.stderr_loss) << ','
           << r.seed << '\n';
    }
}

// Validates, runs, writes. ConfigError propagates to the caller (exit 2);
// I/O problems surface as runtime_error (exit 3).
inline int cmd_sweep(const SweepConfig& config, std::ostream& log) {
    config.validate();
    const std::vector<RiskRecord> records = run_sweep(config, [&](const RiskRecord& r) {
        log << r.scenario << " " << estimators::kind_name(r.estimator) << ": mean_loss="
            << detail::fmt_g(r.mean_loss) << " stderr=" << detail::fmt_g(r.stderr_loss) << "\n";
    });
    std::ofstream out(config.out_path);
    if (!out)
        throw std::runtime_error("cannot open output file: " + config.out_path);
    write_csv(records, out, config.deterministic);
    out.flush();
    if (!out)
        throw std::runtime_error("write failed: " + config.out_path);
    log << "wrote " << records.size() << " records to " << config.out_path << "\n";
    return 0;
}

// Fast invariant suite: factorization round-trips, the loss floor, digamma
// identities, and a 500-trial check of the closed-form risk. Returns 0 on
// success, 3 on any failure; the report is deterministic for a fixed seed.
inline int run_selftest(std::uint64_t seed, std::ostream& os) {
    int failures = 0;
    auto check = [&](bool ok, const std::string& name, const std::string& detail) {
        if (ok) {
            os << "ok: " << name << "\n";
        } else {
            os << "FAIL: " << name << " (" << detail << ")\n";
            ++failures;
        }
    };
    using linalg::DenseMatrix;
    using linalg::LowerTriangular;

    RngStream rng(seed);

    const int p = 8;
    RngStream mat_rng = rng.child(1);
    DenseMatrix m(p, p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < p; ++i) m(i, j) = mat_rng.normal();
    DenseMatrix a = linalg::gram(m);
    for (int j = 0; j < p; ++j) a(j, j) += 0.5;

    const LowerTriangular l = linalg::cholesky(a);
    const double chol_err = linalg::max_abs_diff(linalg::gram(l.to_dense()), a);
    check(chol_err <= 1e-12 * linalg::max_abs(a), "cholesky round-trip",
          "max deviation " + detail::fmt_g(chol_err));

    DenseMatrix b(p, 3);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < p; ++i) b(i, j) = mat_rng.normal();
    const DenseMatrix z = linalg::tri_solve_lower(l, b);
    const double solve_err = linalg::max_abs_diff(linalg::tri_mul_lower(l, z), b);
    check(solve_err <= 1e-12 * linalg::max_abs(b), "triangular solve residual",
          "max residual " + detail::fmt_g(solve_err));

    RngStream qr_rng = rng.child(2);
    DenseMatrix x(9, 5);
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 9; ++i) x(i, j) = qr_rng.normal();
    const linalg::PivotedQr qr = linalg::pivoted_qr_of_transpose(x);
    const DenseMatrix s_perm = linalg::permute_symmetric(linalg::gram(x), qr.perm);
    const double qr_err = linalg::frobenius_norm(
        [&] {
            DenseMatrix d = linalg::gram(qr.h);
            for (int j = 0; j < 9; ++j)
                for (int i = 0; i < 9; ++i) d(i, j) -= s_perm(i, j);
            return d;
        }());
    bool diag_ok = true;
    for (int k = 0; k + 1 < 5; ++k)
        if (!(qr.h(k, k) > 0.0 && qr.h(k, k) >= qr.h(k + 1, k + 1))) diag_ok = false;
    check(qr_err <= 1e-9 * linalg::frobenius_norm(linalg::gram(x)) && diag_ok,
          "pivoted factorization reconstruction",
          "residual " + detail::fmt_g(qr_err));

    const double gamma_euler = 0.5772156649015329;
    const double psi1_err = std::abs(linalg::digamma(1.0) + gamma_euler);
    bool recurrence_ok = true;
    for (double v : {0.37, 3.25, 11.5})
        if (std::abs(linalg::digamma(v + 1.0) - linalg::digamma(v) - 1.0 / v) > 1e-10)
            recurrence_ok = false;
    check(psi1_err <= 1e-10 && recurrence_ok, "digamma identities",
          "psi(1) deviation " + detail::fmt_g(psi1_err));

    const synthetic::PopulationModel model = synthetic::PopulationModel::from_sigma(a);
    const double floor_err = std::abs(evaluation::stein_loss(a, model) - p);
    check(floor_err <= 1e-10, "loss floor at the truth", "deviation " + detail::fmt_g(floor_err));

    DenseMatrix eye6 = DenseMatrix::identity(6);
    const synthetic::PopulationModel id6 = synthetic::PopulationModel::from_sigma(eye6);
    DenseMatrix bumped = DenseMatrix::identity(6);
    bumped(0, 0) = 2.0;
    const double diag_loss = evaluation::stein_loss(bumped, id6);
    check(std::abs(diag_loss - (7.0 - std::log(2.0))) <= 1e-12, "loss of a diagonal bump",
          "got " + detail::fmt_g(diag_loss));

    const Scenario sc{"selftest_p10_n6", 10, 6, 16.0, 0.25};
    const RiskRecord rr =
        evaluation::run_risk(sc, EstimatorKind::Oracle, 500, rng.child(42));
    const double closed = evaluation::oracle_risk_closed_form(10, 6);
    const double gap = std::abs(rr.mean_loss - closed);
    check(gap <= 4.0 * rr.stderr_loss, "closed-form risk vs Monte-Carlo",
          "gap " + detail::fmt_g(gap) + " vs 4*stderr " + detail::fmt_g(4.0 * rr.stderr_loss));

    os << (failures == 0 ? "selftest: PASS\n" : "selftest: FAIL\n");
    return failures == 0 ? 0 : 3;
}

}  // namespace rcfcov::cli
