#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lassoinfer/design.hpp"
#include "lassoinfer/path.hpp"
#include "lassoinfer/rng.hpp"

namespace lassoinfer {

struct ScenarioConfig {
    int n = 100;
    int p = 80;
    double rho = 0.5;
    int k0 = 10;
    double coef_size = 1.0;  // beta-min
    double sigma = 1.0;
    int runs = 500;
    std::uint64_t seed = 1;
    ColumnScaling column_scaling = ColumnScaling::unit_norm;
};

void validate(const ScenarioConfig& cfg);

struct MethodResult {
    double fwer = 0.0;
    double tp = 0.0;
};

struct ScenarioSummary {
    std::map<std::string, MethodResult> per_method;  // de-spars, cov, cov.pval
    int runs_completed = 0;
    int runs_failed = 0;
};

struct IrrepresentableReport {
    double eta = 0.0;
    double lambda_eps = 0.0;
    double lambda_eta = 0.0;
    bool lambda_eta_defined = false;  // false when eta >= 1
    int k_hat_eta = 0;                // 1-based count of knots >= lambda_eta
    bool screening_verified = false;  // support at lambda_eta contained in A0
};

struct EventBResult {
    double fraction = 0.0;
    double mc_se = 0.0;
    int runs = 0;
    int path_failures = 0;  // counted against the event, reported separately
};

struct ScreeningResult {
    double fraction = 0.0;
    double mc_se = 0.0;
    int runs = 0;
};

// lambda = c * sqrt(log p / n) * sigma, translated to the solver scale of the
// fitted design.
struct LambdaRule {
    double c = 1.4142135623730951;
};

// AR(1) rows x_1 = z_1, x_t = rho x_{t-1} + sqrt(1 - rho^2) z_t, so the
// population covariance is Toeplitz rho^|i-j|; columns then scaled per cfg.
DesignMatrix gen_ar1_design(const ScenarioConfig& cfg, RngStream& rng);

// Uniform random k0-subset of positions, each with coefficient coef_size.
std::pair<Eigen::VectorXd, std::vector<int>> place_active(const ScenarioConfig& cfg,
                                                          RngStream& rng);

// y = X beta_star + sigma * eps; the noise draw is consumed even when
// sigma = 0 so the stream position does not depend on sigma.
Response gen_response(const DesignMatrix& x, const Eigen::VectorXd& beta_star, double sigma,
                      RngStream& rng);

// One complete replicate. The signal is generated against the raw AR(1)
// columns (that is the scale the coefficient sizes live in); the fitted
// design carries cfg.column_scaling, and true_coef_fit_scale re-expresses
// beta_star against the fitted columns.
struct ReplicateData {
    DesignMatrix x_fit;
    Eigen::VectorXd beta_star;
    std::vector<int> a_star;
    Response y;
    Eigen::VectorXd true_coef_fit_scale;

    ReplicateData(DesignMatrix x, Eigen::VectorXd b, std::vector<int> a, Response r,
                  Eigen::VectorXd t)
        : x_fit(std::move(x)), beta_star(std::move(b)), a_star(std::move(a)),
          y(std::move(r)), true_coef_fit_scale(std::move(t)) {}
};

ReplicateData make_replicate(const ScenarioConfig& cfg, std::uint64_t run_index);

// Fraction of replicates in which the first k0 distinct variables entering
// the path are exactly A*.
EventBResult prob_event_B(const ScenarioConfig& cfg, int jobs = 1);

// FWER / TP comparison of de-spars, cov and cov.pval at level alpha. The
// noise scale is estimated once per replicate (OLS residual when n > p,
// scaled lasso otherwise) and shared by all methods.
ScenarioSummary run_table_comparison(const ScenarioConfig& cfg, double alpha, int jobs = 1);

// max_{j not in A0} || (X_A0^T X_A0)^{-1} X_A0^T X_j ||_1, the exact value of
// the sup over ||tau||_inf <= 1.
double irrepresentable_eta(const DesignMatrix& x, const std::vector<int>& a0);

IrrepresentableReport irrepresentable_report(const DesignMatrix& x, const std::vector<int>& a0,
                                             const Eigen::VectorXd& eps, const LassoPath& path);

ScreeningResult screening_rate(const ScenarioConfig& cfg, const LambdaRule& rule, int jobs = 1);

// Replicate fan-out: body(i) for i in [0, count) across `jobs` workers;
// worker exceptions are rethrown after join.
void run_parallel(int count, int jobs, const std::function<void(int)>& body);

}  // namespace lassoinfer
