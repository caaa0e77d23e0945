// quadric — CLI for classifying and evaluating Kohn Laplacian kernels on
// quadric CR submanifolds. Jobs are described by a JSON config; see the
// README for the schema. Exit codes: 0 success, 2 config error, 3 numerical
// tolerance failure, 4 domain error (evaluation at a kernel singularity).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "quadric/job.hpp"

namespace {

void print_error_record(int code, const std::string& message) {
    std::string escaped;
    for (char c : message) {
        if (c == '"' || c == '\\') escaped += '\\';
        if (c == '\n') {
            escaped += "\\n";
            continue;
        }
        escaped += c;
    }
    std::cerr << "{\"error\":{\"code\":" << code << ",\"message\":\"" << escaped << "\"}}\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kohn Laplacian kernels on quadric CR submanifolds"};
    app.footer("Commands come from the config's \"command\" key: spectrum, classify, gamma,\n"
               "szego, green, heat, verify. The verify subcommand needs no config.");

    std::string config_path, out_path, suite = "all";
    double tol = 0.0;
    int threads = 0;
    std::uint64_t seed = 0;
    const auto* tol_opt = app.add_option("--tol", tol, "override quadrature rel_tol");
    app.add_option("--config", config_path, "job config file (JSON)");
    const auto* out_opt = app.add_option("--out", out_path, "output CSV path (overrides config)");
    const auto* thr_opt = app.add_option("--threads", threads, "worker threads for point batches");
    const auto* seed_opt = app.add_option("--seed", seed, "sphere sampler seed");

    CLI::App* vcmd = app.add_subcommand("verify", "run the acceptance suite without a config");
    vcmd->add_option("--suite", suite, "\"all\" or comma-separated check names");

    CLI11_PARSE(app, argc, argv);

    try {
        quadric::JobConfig cfg;
        if (vcmd->parsed() && config_path.empty()) {
            cfg.command = quadric::Command::VERIFY;
            cfg.suite = suite;
        } else {
            if (config_path.empty()) {
                print_error_record(2, "--config is required (or use the verify subcommand)");
                return 2;
            }
            std::ifstream f(config_path);
            if (!f) {
                print_error_record(2, "cannot read config file '" + config_path + "'");
                return 2;
            }
            std::ostringstream ss;
            ss << f.rdbuf();
            cfg = quadric::parse_config(ss.str());
            if (vcmd->parsed()) {
                cfg.command = quadric::Command::VERIFY;
                cfg.suite = suite;
            }
        }
        if (tol_opt->count() > 0) cfg.quadrature.rel_tol = tol;
        if (out_opt->count() > 0) cfg.output_path = out_path;
        if (thr_opt->count() > 0) cfg.threads = threads;
        if (seed_opt->count() > 0) cfg.seed = seed;

        const int rc = quadric::run_job(cfg);
        if (rc != 0) print_error_record(rc, "numerical tolerance not met; best estimates were written");
        return rc;
    } catch (const quadric::ConfigError& e) {
        print_error_record(2, e.what());
        return 2;
    } catch (const std::domain_error& e) {
        print_error_record(4, e.what());
        return 4;
    } catch (const std::invalid_argument& e) {
        print_error_record(2, e.what());
        return 2;
    } catch (const std::exception& e) {
        print_error_record(3, e.what());
        return 3;
    }
}
