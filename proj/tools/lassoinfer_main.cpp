#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lassoinfer/errors.hpp"
#include "lassoinfer/run_commands.hpp"
#include "lassoinfer/version.hpp"

namespace {

int default_jobs() {
    if (const char* env = std::getenv("LASSOINFER_JOBS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            return 1;
        }
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lasso path significance tests and desparsified inference"};
    app.set_version_flag("--version", lassoinfer::kVersion);
    app.require_subcommand(1);

    lassoinfer::PathCmdOptions path_opt;
    CLI::App* path_cmd = app.add_subcommand("path", "Lasso path knots and events");
    path_cmd->add_option("--x", path_opt.x_file, "design matrix file")->required();
    path_cmd->add_option("--y", path_opt.y_file, "response file")->required();
    path_cmd->add_option("--max-steps", path_opt.max_steps, "step budget (0 = default)");
    path_cmd->add_option("--out", path_opt.out, "output file (default stdout)");

    lassoinfer::CovtestCmdOptions cov_opt;
    CLI::App* cov_cmd = app.add_subcommand("covtest", "Covariance test along the path");
    cov_cmd->add_option("--x", cov_opt.x_file, "design matrix file")->required();
    cov_cmd->add_option("--y", cov_opt.y_file, "response file")->required();
    cov_cmd->add_option("--sigma2", cov_opt.sigma2, "known noise variance");
    cov_cmd->add_flag("--estimate-sigma", cov_opt.estimate_sigma, "estimate the noise scale");
    cov_cmd->add_option("--steps", cov_opt.steps, "number of entry steps (0 = all)");
    cov_cmd->add_option("--alpha", cov_opt.alpha, "level for the selection summaries");
    cov_cmd->add_option("--out", cov_opt.out, "output file (default stdout)");

    lassoinfer::RefittestCmdOptions refit_opt;
    CLI::App* refit_cmd = app.add_subcommand("refittest", "Least-squares refit test");
    refit_cmd->add_option("--x", refit_opt.x_file, "design matrix file")->required();
    refit_cmd->add_option("--y", refit_opt.y_file, "response file")->required();
    refit_cmd->add_option("--sigma2", refit_opt.sigma2, "known noise variance");
    refit_cmd->add_flag("--estimate-sigma", refit_opt.estimate_sigma,
                        "estimate the noise scale");
    refit_cmd->add_option("--steps", refit_opt.steps, "number of entry steps (0 = all)");
    refit_cmd->add_option("--null", refit_opt.null_kind,
                          "reference distribution: fixed | order-stat");
    refit_cmd->add_option("--out", refit_opt.out, "output file (default stdout)");

    lassoinfer::DesparsCmdOptions despars_opt;
    CLI::App* despars_cmd = app.add_subcommand("despars", "Desparsified lasso inference");
    despars_cmd->add_option("--x", despars_opt.x_file, "design matrix file")->required();
    despars_cmd->add_option("--y", despars_opt.y_file, "response file")->required();
    despars_cmd->add_option("--alpha", despars_opt.alpha, "two-sided level");
    despars_cmd->add_option("--sigma-source", despars_opt.sigma_source,
                            "auto | scaled_lasso | ols_residual | known");
    despars_cmd->add_option("--sigma", despars_opt.sigma_known, "noise scale when known");
    despars_cmd->add_option("--out", despars_opt.out, "output file (default stdout)");

    lassoinfer::SimulateCmdOptions sim_opt;
    sim_opt.jobs = default_jobs();
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Scenario studies");
    sim_cmd->add_option("--which", sim_opt.which, "figure1 | table1 | table2")->required();
    sim_cmd->add_option("--scenario", sim_opt.scenario_file, "scenario config file");
    sim_cmd->add_option("--runs", sim_opt.runs, "replicates per point (0 = preset)");
    CLI::Option* seed_flag = sim_cmd->add_option("--seed", sim_opt.seed, "base seed");
    sim_cmd->add_option("--jobs", sim_opt.jobs, "worker threads");
    sim_cmd->add_option("--alpha", sim_opt.alpha, "familywise level (0 = preset)");
    sim_cmd->add_option("--out-dir", sim_opt.out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*path_cmd) {
            lassoinfer::cmd_path(path_opt);
        } else if (*cov_cmd) {
            lassoinfer::cmd_covtest(cov_opt);
        } else if (*refit_cmd) {
            lassoinfer::cmd_refittest(refit_opt);
        } else if (*despars_cmd) {
            lassoinfer::cmd_despars(despars_opt);
        } else if (*sim_cmd) {
            sim_opt.has_seed = seed_flag->count() > 0;
            for (const std::string& f : lassoinfer::cmd_simulate(sim_opt, std::cerr)) {
                std::cerr << "wrote " << f << "\n";
            }
        }
    } catch (const lassoinfer::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const lassoinfer::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const lassoinfer::SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const lassoinfer::SingularError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
