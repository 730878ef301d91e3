#pragma once

#include <vector>

#include "lassoinfer/design.hpp"

namespace lassoinfer {

struct LassoFit {
    double lambda = 0.0;
    Eigen::VectorXd beta;
    std::vector<int> active_set;  // ascending; exactly { j : beta[j] != 0 }
    double duality_gap = 0.0;
};

// Smallest lambda with an all-zero solution: max_j |<X_j, y>|.
double lambda_max(const DesignMatrix& x, const Response& y);

// 0.5 * ||y - X beta||^2 + lambda * ||beta||_1
double objective(const DesignMatrix& x, const Response& y, const Eigen::VectorXd& beta,
                 double lambda);

// Default duality-gap target, 1e-10 * ||y||^2.
double default_lasso_tol(const Response& y);

// Minimizes 0.5 * ||y - X beta||^2 + lambda * ||beta||_1 by cyclic coordinate
// descent, returning once the duality gap certifies the objective to within
// tol. Throws SolverError if the sweep budget is exhausted first.
LassoFit solve_lasso(const DesignMatrix& x, const Response& y, double lambda, double tol);
LassoFit solve_lasso(const DesignMatrix& x, const Response& y, double lambda);

// Same problem restricted to the columns in `subset`; coefficients outside
// the subset are exactly zero. An empty subset yields the zero fit.
LassoFit solve_lasso_restricted(const DesignMatrix& x, const std::vector<int>& subset,
                                const Response& y, double lambda, double tol);
LassoFit solve_lasso_restricted(const DesignMatrix& x, const std::vector<int>& subset,
                                const Response& y, double lambda);

// Largest violation of the stationarity conditions of the (optionally
// restricted) problem; 0 means an exact KKT point.
double kkt_max_violation(const DesignMatrix& x, const Response& y, const LassoFit& fit);
double kkt_max_violation(const DesignMatrix& x, const Response& y, const LassoFit& fit,
                         const std::vector<int>& subset);

namespace detail {

struct CdOptions {
    double tol = 0.0;
    long max_sweeps = 200000;
    // When false, hitting the sweep budget returns the current iterate with
    // its achieved duality gap instead of throwing.
    bool throw_on_budget = true;
};

// Core solver over an optional coordinate mask (mask[j] != 0 means coordinate
// j participates). The mask is how restricted and nodewise fits share one
// solver without submatrix copies. `warm`, when non-null, seeds the iterate;
// masked-out coordinates are forced to zero.
LassoFit coordinate_descent(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                            double tol, const std::vector<unsigned char>* mask,
                            const Eigen::VectorXd* warm);
LassoFit coordinate_descent(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                            const CdOptions& opts, const std::vector<unsigned char>* mask,
                            const Eigen::VectorXd* warm);

}  // namespace detail

}  // namespace lassoinfer
