#pragma once

#include <utility>
#include <vector>

#include "lassoinfer/design.hpp"

namespace lassoinfer {

// One row of the relaxed inverse: gamma solves the lasso regression of X_j on
// the remaining columns at lambda_j, stated for the 1/(2n)-scaled objective
//   (1/2n) ||X_j - X_{-j} g||^2 + lambda_j ||g||_1.
// gamma is stored as a length-p vector with a structural zero at j.
struct NodewiseRow {
    int j = -1;
    Eigen::VectorXd gamma;
    double tau2 = 0.0;      // ||X_j - X_{-j} gamma||^2 / n + lambda_j * ||gamma||_1
    double lambda_j = 0.0;
};

enum class SigmaSource {
    known,         // caller supplies sigma
    scaled_lasso,  // joint noise estimate
    ols_residual,  // full OLS with n - p degrees of freedom; needs n > p
    auto_rule,     // scaled_lasso when p >= n, ols_residual otherwise
};

struct DesparsConfig {
    double alpha = 0.05;
    double kappa = 1.1;  // initial-lasso rule: kappa * sigma_hat * sqrt(2 log p / n)
    double nodewise_scale = 1.0;  // multiplies the nodewise penalty sqrt(2 log p / n)
    SigmaSource sigma_source = SigmaSource::auto_rule;
    double sigma_known = 0.0;  // used when sigma_source == known
};

struct DebiasedFit {
    Eigen::VectorXd b_hat;
    Eigen::VectorXd se;
    Eigen::VectorXd p_values;
    Eigen::VectorXd ci_low;
    Eigen::VectorXd ci_high;
    double sigma_eps_hat = 0.0;
    double lambda_used = 0.0;  // initial-lasso lambda in the 1/(2n)-scaled convention
    double alpha = 0.05;
};

// Joint scale/coefficient estimate: alternate beta <- lasso at lambda0 *
// sigma_hat and sigma_hat^2 <- ||y - X beta||^2 / n until the scale settles
// (relative change < 1e-6) or 100 rounds. Columns are standardized to norm
// sqrt(n) internally; beta comes back in the input scale. A collapse of
// sigma_hat below 1e-8 raises SolverError.
std::pair<double, Eigen::VectorXd> scaled_lasso(const DesignMatrix& x, const Response& y,
                                                double lambda0);

NodewiseRow nodewise_lasso(const DesignMatrix& x, int j, double lambda_j);

// One-step correction b = beta + Theta X^T (y - X beta) / n with Theta rows
// gamma-contrasts normalized by tau2; requires one row per coordinate.
Eigen::VectorXd debias(const DesignMatrix& x, const Response& y,
                       const Eigen::VectorXd& beta_lasso,
                       const std::vector<NodewiseRow>& rows);

// Full pipeline: initial lasso, nodewise rows, debias, Gaussian p-values and
// level-(1 - alpha) intervals with se_j = sigma_hat * ||z_j|| / (n tau_j^2).
DebiasedFit despars_inference(const DesignMatrix& x, const Response& y,
                              const DesparsConfig& config);

// RSS / (n - p) route; requires n > p and full column rank.
double ols_residual_sigma(const DesignMatrix& x, const Response& y);

}  // namespace lassoinfer
