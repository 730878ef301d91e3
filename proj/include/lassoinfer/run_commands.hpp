#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lassoinfer {

struct PathCmdOptions {
    std::string x_file;
    std::string y_file;
    int max_steps = 0;  // 0 -> 3 * min(n, p) + 20
    std::string out;    // empty -> stdout
};

struct CovtestCmdOptions {
    std::string x_file;
    std::string y_file;
    double sigma2 = 0.0;         // used when estimate_sigma is false
    bool estimate_sigma = false; // OLS residual when n > p, scaled lasso otherwise
    int steps = 0;               // 0 -> every computable step
    double alpha = 0.05;
    std::string out;
};

struct RefittestCmdOptions {
    std::string x_file;
    std::string y_file;
    double sigma2 = 0.0;
    bool estimate_sigma = false;
    int steps = 0;
    std::string null_kind = "order-stat";  // "fixed" or "order-stat"
    std::string out;
};

struct DesparsCmdOptions {
    std::string x_file;
    std::string y_file;
    double alpha = 0.05;
    std::string sigma_source = "auto";  // auto | scaled_lasso | ols_residual | known
    double sigma_known = 0.0;
    std::string out;
};

struct SimulateCmdOptions {
    std::string which;          // figure1 | table1 | table2
    std::string scenario_file;  // optional overrides
    int runs = 0;               // 0 -> preset
    bool has_seed = false;
    std::uint64_t seed = 0;
    int jobs = 1;
    double alpha = 0.0;  // 0 -> preset / config
    std::string out_dir = ".";
};

void cmd_path(const PathCmdOptions& opt);
void cmd_covtest(const CovtestCmdOptions& opt);
void cmd_refittest(const RefittestCmdOptions& opt);
void cmd_despars(const DesparsCmdOptions& opt);

// Writes <which>_summary.tsv (and figure1_plot.tsv for the figure) under
// out_dir; returns the list of files written. Progress and timing go to
// `log`, never into the output files.
std::vector<std::string> cmd_simulate(const SimulateCmdOptions& opt, std::ostream& log);

}  // namespace lassoinfer
