#pragma once

#include <vector>

#include "lassoinfer/design.hpp"

namespace lassoinfer {

enum class PathEventKind { enter, leave };

struct PathEvent {
    int step = 0;      // 1-based step index k
    int variable = 0;  // 0-based column index
    PathEventKind kind = PathEventKind::enter;
};

enum class PathTermination {
    exhausted,       // no further events; the last segment extends to lambda = 0
    max_steps,       // stopped by the step budget
    rank_deficient,  // active Gram matrix became numerically singular
};

// Coefficients on [knots[k+1], knots[k]] (down to 0 for the final segment of
// an exhausted path): beta[active[i]] = intercept[i] - lambda * slope[i].
struct PathSegment {
    std::vector<int> active;
    Eigen::VectorXd intercept;
    Eigen::VectorXd slope;
};

struct LassoPath {
    int p = 0;
    std::vector<double> knots;                  // lambda_hat_k, nonincreasing
    std::vector<PathEvent> events;              // one event per knot
    std::vector<std::vector<int>> active_sets;  // A_hat_k just below knot k, sorted
    std::vector<PathSegment> segments;
    bool max_steps_reached = false;
    PathTermination termination = PathTermination::exhausted;

    int steps() const { return static_cast<int>(knots.size()); }
    int entry_count() const;
    // Path step (0-based) of the i-th enter event (0-based), -1 if absent.
    int entry_step(int i) const;
};

struct PathOptions {
    int max_steps = 0;    // required, >= 1
    int max_entries = 0;  // 0 = unlimited; stop once this many enter events occurred
};

// LARS homotopy with the lasso modification: variables enter at the knot
// where their correlation reaches the active boundary and leave when a
// coefficient crosses zero. Exact ties on the entry condition resolve to the
// lowest column index.
LassoPath compute_path(const DesignMatrix& x, const Response& y, int max_steps);
LassoPath compute_path(const DesignMatrix& x, const Response& y, const PathOptions& opts);

// Piecewise-linear evaluation. Above the first knot the solution is zero;
// below the last knot it is the linear extension to lambda = 0 when the path
// is exhausted and an error when the path was truncated.
Eigen::VectorXd coef_at(const LassoPath& path, double lambda);

}  // namespace lassoinfer
