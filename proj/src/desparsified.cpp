#include "lassoinfer/desparsified.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/QR>

#include "lassoinfer/distributions.hpp"
#include "lassoinfer/errors.hpp"
#include "lassoinfer/lasso.hpp"

namespace lassoinfer {

namespace {

// X_j minus the gamma combination of the other columns, using only the
// support of gamma.
Eigen::VectorXd nodewise_residual(const Eigen::MatrixXd& xm, const NodewiseRow& row) {
    Eigen::VectorXd z = xm.col(row.j);
    for (int k = 0; k < static_cast<int>(xm.cols()); ++k) {
        const double g = row.gamma[k];
        if (g != 0.0) z.noalias() -= xm.col(k) * g;
    }
    return z;
}

NodewiseRow trivial_row(const Eigen::MatrixXd& xm, int j, double lambda_j) {
    NodewiseRow row;
    row.j = j;
    row.gamma = Eigen::VectorXd::Zero(xm.cols());
    row.lambda_j = lambda_j;
    row.tau2 = xm.col(j).squaredNorm() / static_cast<double>(xm.rows());
    return row;
}

}  // namespace

std::pair<double, Eigen::VectorXd> scaled_lasso(const DesignMatrix& x, const Response& y,
                                                double lambda0) {
    if (x.n() != y.n()) throw InputError("scaled_lasso: dimension mismatch");
    if (lambda0 <= 0.0) throw InputError("scaled_lasso: lambda0 must be positive");

    const int n = x.n();
    const int p = x.p();
    const Eigen::VectorXd& yv = y.values();
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    Eigen::MatrixXd xs = x.values();
    Eigen::VectorXd col_scale(p);  // multiply standardized coef by this to undo
    for (int j = 0; j < p; ++j) {
        const double nrm = xs.col(j).norm();
        if (nrm == 0.0) throw InputError("scaled_lasso: column " + std::to_string(j + 1) +
                                         " has zero norm");
        xs.col(j) *= sqrt_n / nrm;
        col_scale[j] = sqrt_n / nrm;
    }

    double sigma = std::sqrt(yv.squaredNorm() / n);
    if (sigma < 1e-8) throw SolverError("scaled_lasso: degenerate fit, response scale is zero");

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    const double tol = std::max(1e-11 * yv.squaredNorm(), 1e-300);
    for (int it = 0; it < 100; ++it) {
        const double lambda_solver = static_cast<double>(n) * lambda0 * sigma;
        const LassoFit fit = detail::coordinate_descent(xs, yv, lambda_solver, tol, nullptr,
                                                        &beta);
        beta = fit.beta;
        const double sigma_next = std::sqrt((yv - xs * beta).squaredNorm() / n);
        if (sigma_next < 1e-8) {
            throw SolverError("scaled_lasso: degenerate fit, noise estimate collapsed");
        }
        const bool settled = std::abs(sigma_next - sigma) < 1e-6 * sigma;
        sigma = sigma_next;
        if (settled) break;
    }

    Eigen::VectorXd beta_out = beta.cwiseProduct(col_scale);
    return {sigma, std::move(beta_out)};
}

NodewiseRow nodewise_lasso(const DesignMatrix& x, int j, double lambda_j) {
    const int n = x.n();
    const int p = x.p();
    if (p < 2) throw InputError("nodewise_lasso: need at least two columns");
    if (j < 0 || j >= p) throw InputError("nodewise_lasso: column index out of range");
    if (lambda_j <= 0.0) throw InputError("nodewise_lasso: lambda_j must be positive");

    const Eigen::MatrixXd& xm = x.values();
    const Eigen::VectorXd target = xm.col(j);
    std::vector<unsigned char> mask(static_cast<std::size_t>(p), 1);
    mask[static_cast<std::size_t>(j)] = 0;

    const double tol = std::max(1e-12 * target.squaredNorm(), 1e-300);
    const LassoFit fit = detail::coordinate_descent(xm, target, n * lambda_j, tol, &mask,
                                                    nullptr);

    NodewiseRow row;
    row.j = j;
    row.gamma = fit.beta;
    row.lambda_j = lambda_j;
    const Eigen::VectorXd z = nodewise_residual(xm, row);
    row.tau2 = z.squaredNorm() / n + lambda_j * fit.beta.lpNorm<1>();
    if (!(row.tau2 > 0.0)) {
        throw SolverError("nodewise_lasso: tau^2 vanished for column " + std::to_string(j + 1));
    }
    return row;
}

Eigen::VectorXd debias(const DesignMatrix& x, const Response& y,
                       const Eigen::VectorXd& beta_lasso,
                       const std::vector<NodewiseRow>& rows) {
    if (x.n() != y.n()) throw InputError("debias: dimension mismatch");
    const int n = x.n();
    const int p = x.p();
    if (beta_lasso.size() != p) throw InputError("debias: beta length mismatch");
    if (static_cast<int>(rows.size()) != p) {
        throw InputError("debias: need exactly one nodewise row per coordinate");
    }
    const Eigen::MatrixXd& xm = x.values();
    const Eigen::VectorXd residual = y.values() - xm * beta_lasso;

    Eigen::VectorXd b = beta_lasso;
    for (int j = 0; j < p; ++j) {
        const NodewiseRow& row = rows[static_cast<std::size_t>(j)];
        if (row.j != j) throw InputError("debias: rows out of order or missing");
        if (!(row.tau2 > 0.0)) throw InputError("debias: nonpositive tau^2");
        const Eigen::VectorXd z = nodewise_residual(xm, row);
        b[j] += z.dot(residual) / (n * row.tau2);
    }
    return b;
}

double ols_residual_sigma(const DesignMatrix& x, const Response& y) {
    if (x.n() != y.n()) throw InputError("ols_residual_sigma: dimension mismatch");
    if (x.n() <= x.p()) {
        throw InputError("ols_residual_sigma: needs n > p");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x.values());
    if (qr.rank() < x.p()) throw SingularError("ols_residual_sigma: design is rank deficient");
    const Eigen::VectorXd coef = qr.solve(y.values());
    const double rss = (y.values() - x.values() * coef).squaredNorm();
    return std::sqrt(rss / (x.n() - x.p()));
}

DebiasedFit despars_inference(const DesignMatrix& x, const Response& y,
                              const DesparsConfig& config) {
    if (x.n() != y.n()) throw InputError("despars_inference: dimension mismatch");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
        throw InputError("despars_inference: alpha must lie in (0, 1)");
    }
    const int n = x.n();
    const int p = x.p();
    if (p < 1) throw InputError("despars_inference: empty design");

    // Standardized working copy; estimates map back through col_scale.
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    Eigen::MatrixXd xs = x.values();
    Eigen::VectorXd col_scale(p);
    for (int j = 0; j < p; ++j) {
        const double nrm = xs.col(j).norm();
        if (nrm == 0.0) throw InputError("despars_inference: column " + std::to_string(j + 1) +
                                         " has zero norm");
        xs.col(j) *= sqrt_n / nrm;
        col_scale[j] = sqrt_n / nrm;
    }
    const DesignMatrix xstd(xs, ColumnScaling::sqrt_n_norm);

    const double log_p = std::log(static_cast<double>(std::max(p, 2)));

    double sigma_hat = 0.0;
    switch (config.sigma_source) {
        case SigmaSource::known:
            if (!(config.sigma_known > 0.0)) {
                throw InputError("despars_inference: known sigma must be positive");
            }
            sigma_hat = config.sigma_known;
            break;
        case SigmaSource::scaled_lasso:
            sigma_hat = scaled_lasso(x, y, std::sqrt(2.0 * log_p / n)).first;
            break;
        case SigmaSource::ols_residual:
            sigma_hat = ols_residual_sigma(x, y);
            break;
        case SigmaSource::auto_rule:
            sigma_hat = p >= n ? scaled_lasso(x, y, std::sqrt(2.0 * log_p / n)).first
                               : ols_residual_sigma(x, y);
            break;
    }

    const double lambda_theory = config.kappa * sigma_hat * std::sqrt(2.0 * log_p / n);
    const Eigen::VectorXd& yv = y.values();
    const double tol = std::max(1e-11 * yv.squaredNorm(), 1e-300);
    const LassoFit init = detail::coordinate_descent(xs, yv, n * lambda_theory, tol, nullptr,
                                                     nullptr);

    const double lambda_nodewise = config.nodewise_scale * std::sqrt(2.0 * log_p / n);
    std::vector<NodewiseRow> rows;
    rows.reserve(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
        rows.push_back(p >= 2 ? nodewise_lasso(xstd, j, lambda_nodewise)
                              : trivial_row(xs, j, lambda_nodewise));
    }

    const Eigen::VectorXd residual = yv - xs * init.beta;

    DebiasedFit fit;
    fit.alpha = config.alpha;
    fit.sigma_eps_hat = sigma_hat;
    fit.lambda_used = lambda_theory;
    fit.b_hat.resize(p);
    fit.se.resize(p);
    fit.p_values.resize(p);
    fit.ci_low.resize(p);
    fit.ci_high.resize(p);

    const double z_crit = normal_quantile(1.0 - config.alpha / 2.0);
    for (int j = 0; j < p; ++j) {
        const NodewiseRow& row = rows[static_cast<std::size_t>(j)];
        const Eigen::VectorXd z = nodewise_residual(xs, row);
        const double denom = n * row.tau2;
        const double b = init.beta[j] + z.dot(residual) / denom;
        const double se = sigma_hat * z.norm() / denom;
        if (!(se > 0.0) || !std::isfinite(se)) {
            throw SolverError("despars_inference: degenerate standard error at column " +
                              std::to_string(j + 1));
        }
        fit.b_hat[j] = b * col_scale[j];
        fit.se[j] = se * col_scale[j];
        fit.p_values[j] = two_sided_normal_pvalue(b / se);
        fit.ci_low[j] = (b - z_crit * se) * col_scale[j];
        fit.ci_high[j] = (b + z_crit * se) * col_scale[j];
    }
    return fit;
}

}  // namespace lassoinfer
