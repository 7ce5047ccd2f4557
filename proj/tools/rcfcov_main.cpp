#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rcfcov/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Monte-Carlo risk experiments for covariance estimation from "
                 "rank-deficient sample covariance factors"};
    app.require_subcommand(1);

    std::string config_path;
    std::string n_list;
    std::string cond_list;
    std::string eta_list;
    std::string est_list;
    std::string out_path;
    int p = 0;
    int trials = 0;
    int threads = 0;
    std::uint64_t seed = 0;
    bool deterministic = false;

    CLI::App* sweep = app.add_subcommand("sweep", "Run a risk sweep and write a CSV of records");
    sweep->add_option("--config", config_path, "flat key=value config file");
    sweep->add_option("--p", p, "dimension p");
    sweep->add_option("--n", n_list, "comma-separated sample sizes");
    sweep->add_option("--cond", cond_list, "comma-separated target condition numbers");
    sweep->add_option("--eta", eta_list, "comma-separated large-eigenvalue fractions");
    sweep->add_option("--estimators", est_list,
                      "comma-separated estimators (FSOPT,Oracle,RCF,LWLS)");
    sweep->add_option("--trials", trials, "Monte-Carlo trials per grid point");
    sweep->add_option("--seed", seed, "root RNG seed");
    sweep->add_option("--out", out_path, "output CSV path");
    sweep->add_flag("--deterministic", deterministic, "suppress the timestamp comment line");
    sweep->add_option("--threads", threads, "worker threads per grid point");

    std::uint64_t selftest_seed = 20240601;
    CLI::App* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");
    selftest->add_option("--seed", selftest_seed, "RNG seed for the checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sweep->parsed()) {
            rcfcov::cli::SweepConfig config;
            if (!config_path.empty()) rcfcov::cli::apply_config_file(config, config_path);
            if (sweep->count("--p")) config.p = p;
            if (sweep->count("--n")) config.n_values = rcfcov::cli::parse_int_list(n_list, "n");
            if (sweep->count("--cond"))
                config.cond_values = rcfcov::cli::parse_double_list(cond_list, "cond");
            if (sweep->count("--eta"))
                config.eta_values = rcfcov::cli::parse_double_list(eta_list, "eta");
            if (sweep->count("--estimators"))
                config.estimators = rcfcov::cli::parse_estimator_list(est_list);
            if (sweep->count("--trials")) config.trials = trials;
            if (sweep->count("--seed")) config.seed = seed;
            if (sweep->count("--out")) config.out_path = out_path;
            if (sweep->count("--deterministic")) config.deterministic = true;
            if (sweep->count("--threads")) config.threads = threads;
            return rcfcov::cli::cmd_sweep(config, std::cout);
        }
        return rcfcov::cli::run_selftest(selftest_seed, std::cout);
    } catch (const rcfcov::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
