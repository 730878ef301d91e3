#include "lassoinfer/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lassoinfer/errors.hpp"

namespace lassoinfer {

namespace {

double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

void check_dims(const DesignMatrix& x, const Response& y, const char* op) {
    if (x.n() != y.n()) {
        throw InputError(std::string(op) + ": X has " + std::to_string(x.n()) +
                         " rows but y has length " + std::to_string(y.n()));
    }
}

std::vector<unsigned char> subset_mask(int p, const std::vector<int>& subset, const char* op) {
    std::vector<unsigned char> mask(static_cast<std::size_t>(p), 0);
    for (int j : subset) {
        if (j < 0 || j >= p) {
            throw InputError(std::string(op) + ": index " + std::to_string(j) +
                             " outside [0, " + std::to_string(p) + ")");
        }
        if (mask[static_cast<std::size_t>(j)]) {
            throw InputError(std::string(op) + ": duplicate index " + std::to_string(j));
        }
        mask[static_cast<std::size_t>(j)] = 1;
    }
    return mask;
}

double kkt_violation_impl(const Eigen::MatrixXd& xm, const Eigen::VectorXd& yv,
                          const LassoFit& fit, const std::vector<unsigned char>* mask) {
    const Eigen::VectorXd grad = xm.transpose() * (yv - xm * fit.beta);
    double worst = 0.0;
    for (int j = 0; j < static_cast<int>(xm.cols()); ++j) {
        if (mask && !(*mask)[static_cast<std::size_t>(j)]) continue;
        const double b = fit.beta[j];
        if (b != 0.0) {
            worst = std::max(worst, std::abs(grad[j] - fit.lambda * (b > 0 ? 1.0 : -1.0)));
        } else {
            worst = std::max(worst, std::abs(grad[j]) - fit.lambda);
        }
    }
    return std::max(worst, 0.0);
}

}  // namespace

double lambda_max(const DesignMatrix& x, const Response& y) {
    check_dims(x, y, "lambda_max");
    if (x.p() == 0) return 0.0;
    return (x.values().transpose() * y.values()).cwiseAbs().maxCoeff();
}

double objective(const DesignMatrix& x, const Response& y, const Eigen::VectorXd& beta,
                 double lambda) {
    check_dims(x, y, "objective");
    if (beta.size() != x.p()) throw InputError("objective: beta length does not match p");
    if (lambda < 0.0) throw InputError("objective: lambda must be nonnegative");
    return 0.5 * (y.values() - x.values() * beta).squaredNorm() +
           lambda * beta.lpNorm<1>();
}

double default_lasso_tol(const Response& y) {
    return std::max(1e-10 * y.values().squaredNorm(), 1e-300);
}

namespace detail {

LassoFit coordinate_descent(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                            double tol, const std::vector<unsigned char>* mask,
                            const Eigen::VectorXd* warm) {
    CdOptions opts;
    opts.tol = tol;
    return coordinate_descent(x, y, lambda, opts, mask, warm);
}

LassoFit coordinate_descent(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                            const CdOptions& opts, const std::vector<unsigned char>* mask,
                            const Eigen::VectorXd* warm) {
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());
    const double tol = opts.tol;
    if (lambda <= 0.0) throw InputError("solve_lasso: lambda must be positive");
    if (tol <= 0.0) throw InputError("solve_lasso: tol must be positive");
    if (y.size() != n) throw InputError("solve_lasso: dimension mismatch");

    std::vector<int> allowed;
    allowed.reserve(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
        if (!mask || (*mask)[static_cast<std::size_t>(j)]) allowed.push_back(j);
    }

    Eigen::VectorXd colnorm2(p);
    for (int j : allowed) colnorm2[j] = x.col(j).squaredNorm();

    // The zero vector is the exact solution whenever lambda dominates every
    // allowed correlation with y.
    {
        double linf_y = 0.0;
        for (int j : allowed) linf_y = std::max(linf_y, std::abs(x.col(j).dot(y)));
        if (linf_y <= lambda) {
            LassoFit fit;
            fit.lambda = lambda;
            fit.beta = Eigen::VectorXd::Zero(p);
            fit.duality_gap = 0.0;
            return fit;
        }
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    if (warm && warm->size() == p) {
        for (int j : allowed) beta[j] = (*warm)[j];
    }

    Eigen::VectorXd r = y;
    if (beta.cwiseAbs().sum() > 0.0) r.noalias() -= x * beta;

    const double y_sqnorm = y.squaredNorm();

    auto sweep = [&](const std::vector<int>& coords) {
        double max_delta = 0.0;
        for (int j : coords) {
            const double d = colnorm2[j];
            if (d <= 0.0) {
                beta[j] = 0.0;
                continue;
            }
            const double old = beta[j];
            const double cj = x.col(j).dot(r) + d * old;
            const double next = soft_threshold(cj, lambda) / d;
            if (next != old) {
                r.noalias() += x.col(j) * (old - next);
                beta[j] = next;
                max_delta = std::max(max_delta, std::abs(next - old) * std::sqrt(d));
            }
        }
        return max_delta;
    };

    auto duality_gap = [&]() {
        double linf = 0.0;
        for (int j : allowed) linf = std::max(linf, std::abs(x.col(j).dot(r)));
        const double s = linf > lambda ? lambda / linf : 1.0;
        double l1 = 0.0;
        for (int j : allowed) l1 += std::abs(beta[j]);
        const double rr = r.squaredNorm();
        return 0.5 * rr * (1.0 + s * s) - s * r.dot(y) + lambda * l1;
    };

    const long max_sweeps = opts.max_sweeps;
    long sweeps = 0;
    double gap = 0.0;

    while (true) {
        sweep(allowed);
        ++sweeps;

        // Drift control before certifying.
        r = y;
        r.noalias() -= x * beta;
        gap = duality_gap();
        if (gap <= tol) break;

        // Iterate the current support until it settles, then re-certify with
        // a full sweep on the next pass.
        std::vector<int> support;
        for (int j : allowed) {
            if (beta[j] != 0.0) support.push_back(j);
        }
        const double settle = 1e-9 * std::sqrt(std::max(y_sqnorm, 1.0));
        for (int inner = 0; inner < 100 && !support.empty(); ++inner) {
            const double delta = sweep(support);
            ++sweeps;
            if (delta <= settle) break;
        }
        if (sweeps > max_sweeps) {
            if (opts.throw_on_budget) {
                throw SolverError("solve_lasso: no convergence within the sweep budget (gap " +
                                  std::to_string(gap) + ", target " + std::to_string(tol) +
                                  ")");
            }
            break;
        }
    }

    LassoFit fit;
    fit.lambda = lambda;
    fit.beta = std::move(beta);
    fit.duality_gap = gap;
    for (int j = 0; j < p; ++j) {
        if (fit.beta[j] != 0.0) fit.active_set.push_back(j);
    }
    return fit;
}

}  // namespace detail

LassoFit solve_lasso(const DesignMatrix& x, const Response& y, double lambda, double tol) {
    check_dims(x, y, "solve_lasso");
    if (lambda <= 0.0) throw InputError("solve_lasso: lambda must be positive");
    if (tol <= 0.0) throw InputError("solve_lasso: tol must be positive");
    if (x.p() == 0) {
        LassoFit fit;
        fit.lambda = lambda;
        fit.beta = Eigen::VectorXd::Zero(0);
        return fit;
    }
    return detail::coordinate_descent(x.values(), y.values(), lambda, tol, nullptr, nullptr);
}

LassoFit solve_lasso(const DesignMatrix& x, const Response& y, double lambda) {
    return solve_lasso(x, y, lambda, default_lasso_tol(y));
}

LassoFit solve_lasso_restricted(const DesignMatrix& x, const std::vector<int>& subset,
                                const Response& y, double lambda, double tol) {
    check_dims(x, y, "solve_lasso_restricted");
    if (lambda <= 0.0) throw InputError("solve_lasso_restricted: lambda must be positive");
    if (tol <= 0.0) throw InputError("solve_lasso_restricted: tol must be positive");
    const auto mask = subset_mask(x.p(), subset, "solve_lasso_restricted");
    if (subset.empty() || x.p() == 0) {
        LassoFit fit;
        fit.lambda = lambda;
        fit.beta = Eigen::VectorXd::Zero(x.p());
        return fit;
    }
    return detail::coordinate_descent(x.values(), y.values(), lambda, tol, &mask, nullptr);
}

LassoFit solve_lasso_restricted(const DesignMatrix& x, const std::vector<int>& subset,
                                const Response& y, double lambda) {
    return solve_lasso_restricted(x, subset, y, lambda, default_lasso_tol(y));
}

double kkt_max_violation(const DesignMatrix& x, const Response& y, const LassoFit& fit) {
    check_dims(x, y, "kkt_max_violation");
    if (fit.beta.size() != x.p()) throw InputError("kkt_max_violation: beta length mismatch");
    return kkt_violation_impl(x.values(), y.values(), fit, nullptr);
}

double kkt_max_violation(const DesignMatrix& x, const Response& y, const LassoFit& fit,
                         const std::vector<int>& subset) {
    check_dims(x, y, "kkt_max_violation");
    if (fit.beta.size() != x.p()) throw InputError("kkt_max_violation: beta length mismatch");
    const auto mask = subset_mask(x.p(), subset, "kkt_max_violation");
    return kkt_violation_impl(x.values(), y.values(), fit, &mask);
}

}  // namespace lassoinfer
