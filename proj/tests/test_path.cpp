#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "lassoinfer/errors.hpp"
#include "lassoinfer/lasso.hpp"
#include "lassoinfer/path.hpp"
#include "lassoinfer/rng.hpp"

#include "test_util.hpp"

using namespace lassoinfer;
using test_util::orthonormal_design;
using test_util::random_matrix;
using test_util::random_vector;

namespace {

void check_path_invariants(const DesignMatrix& x, const Response& y, const LassoPath& path) {
    REQUIRE(path.knots.size() == path.events.size());
    REQUIRE(path.knots.size() == path.active_sets.size());
    REQUIRE(path.knots.size() == path.segments.size());
    if (path.steps() == 0) return;

    CHECK(path.knots.front() == doctest::Approx(lambda_max(x, y)).epsilon(1e-12));
    for (std::size_t k = 1; k < path.knots.size(); ++k) {
        CHECK(path.knots[k] <= path.knots[k - 1] * (1.0 + 1e-12));
    }
    // Active sets change by exactly one index, matching the event.
    std::vector<int> prev;
    for (std::size_t k = 0; k < path.active_sets.size(); ++k) {
        std::vector<int> cur = path.active_sets[k];
        const PathEvent& ev = path.events[k];
        std::vector<int> expect = prev;
        if (ev.kind == PathEventKind::enter) {
            expect.push_back(ev.variable);
            std::sort(expect.begin(), expect.end());
        } else {
            expect.erase(std::remove(expect.begin(), expect.end(), ev.variable), expect.end());
        }
        CHECK(cur == expect);
        prev = std::move(cur);
    }
}

void check_agreement_with_solver(const DesignMatrix& x, const Response& y,
                                 const LassoPath& path, RngStream& rng, int count,
                                 double tol_inf) {
    REQUIRE(path.steps() > 0);
    const double top = path.knots.front();
    const double bottom =
        path.termination == PathTermination::exhausted ? 0.0 : path.knots.back();
    const double cd_tol = std::max(1e-14 * y.values().squaredNorm(), 1e-300);
    for (int t = 0; t < count; ++t) {
        const double lambda = bottom + (top - bottom) * (0.02 + 0.96 * rng.uniform01());
        const Eigen::VectorXd from_path = coef_at(path, lambda);
        const LassoFit fit = solve_lasso(x, y, lambda, cd_tol);
        CHECK((from_path - fit.beta).cwiseAbs().maxCoeff() < tol_inf);
    }
}

}  // namespace

TEST_CASE("single predictor has one knot and a linear coefficient") {
    RngStream rng(21);
    Eigen::MatrixXd m = random_matrix(rng, 9, 1);
    const DesignMatrix x(m);
    const Response y(random_vector(rng, 9));
    const LassoPath path = compute_path(x, y, 10);

    REQUIRE(path.steps() == 1);
    const double c = m.col(0).dot(y.values());
    CHECK(path.knots[0] == doctest::Approx(std::abs(c)));
    CHECK(path.termination == PathTermination::exhausted);

    const double d = m.col(0).squaredNorm();
    for (double f : {0.75, 0.5, 0.1}) {
        const double lambda = f * std::abs(c);
        const double expect = (c - lambda * (c > 0 ? 1.0 : -1.0)) / d;
        CHECK(coef_at(path, lambda)[0] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("orthonormal design: knots are sorted correlations, entry order by magnitude") {
    RngStream rng(22);
    const DesignMatrix x = orthonormal_design(rng, 30, 6);
    const Response y(random_vector(rng, 30));
    const Eigen::VectorXd c = x.values().transpose() * y.values();

    std::vector<double> mags;
    for (int j = 0; j < 6; ++j) mags.push_back(std::abs(c[j]));
    std::vector<int> order(6);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return mags[a] > mags[b]; });

    const LassoPath path = compute_path(x, y, 20);
    REQUIRE(path.steps() == 6);
    for (int k = 0; k < 6; ++k) {
        CHECK(path.knots[static_cast<std::size_t>(k)] ==
              doctest::Approx(mags[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])])
                  .epsilon(1e-10));
        CHECK(path.events[static_cast<std::size_t>(k)].variable ==
              order[static_cast<std::size_t>(k)]);
        CHECK(path.events[static_cast<std::size_t>(k)].kind == PathEventKind::enter);
    }
    check_path_invariants(x, y, path);
}

TEST_CASE("random 10x20 instance: path agrees with the fixed-lambda solver") {
    RngStream rng(23);
    const DesignMatrix x(random_matrix(rng, 10, 20));
    const Response y(random_vector(rng, 10));
    const LassoPath path = compute_path(x, y, 200);
    check_path_invariants(x, y, path);
    check_agreement_with_solver(x, y, path, rng, 20, 1e-6);
}

TEST_CASE("path/pointwise agreement across random shapes") {
    RngStream rng(24);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 5 + static_cast<int>(rng.uniform_int(26));
        const int p = 2 + static_cast<int>(rng.uniform_int(59));
        const DesignMatrix x(random_matrix(rng, n, p));
        const Response y(random_vector(rng, n));
        if (lambda_max(x, y) == 0.0) continue;
        const LassoPath path = compute_path(x, y, 500);
        check_path_invariants(x, y, path);
        check_agreement_with_solver(x, y, path, rng, 6, 1e-6);
    }
}

TEST_CASE("path knots evaluate to lasso solutions") {
    RngStream rng(25);
    const DesignMatrix x(random_matrix(rng, 12, 18));
    const Response y(random_vector(rng, 12));
    const LassoPath path = compute_path(x, y, 300);
    const double cd_tol = 1e-14 * y.values().squaredNorm();
    for (int k = 0; k < path.steps(); k += 2) {
        const double lambda = path.knots[static_cast<std::size_t>(k)];
        if (lambda <= 0.0) continue;
        const Eigen::VectorXd at_knot = coef_at(path, lambda);
        const LassoFit fit = solve_lasso(x, y, lambda, cd_tol);
        CHECK((at_knot - fit.beta).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("drop events occur and leave a consistent path") {
    // Scan seeded instances until one produces a leave event; correlated
    // designs with p > n do so quickly.
    RngStream rng(26);
    bool found = false;
    for (int trial = 0; trial < 200 && !found; ++trial) {
        const int n = 8 + static_cast<int>(rng.uniform_int(10));
        const int p = n + 2 + static_cast<int>(rng.uniform_int(20));
        const DesignMatrix x(random_matrix(rng, n, p));
        const Response y(random_vector(rng, n));
        const LassoPath path = compute_path(x, y, 400);
        for (const auto& ev : path.events) {
            if (ev.kind == PathEventKind::leave) {
                found = true;
                check_path_invariants(x, y, path);
                check_agreement_with_solver(x, y, path, rng, 10, 1e-6);
                break;
            }
        }
    }
    CHECK(found);
}

TEST_CASE("max_steps truncation and coef_at range errors") {
    RngStream rng(27);
    const DesignMatrix x(random_matrix(rng, 10, 8));
    const Response y(random_vector(rng, 10));
    const LassoPath path = compute_path(x, y, 2);
    REQUIRE(path.steps() == 2);
    CHECK(path.max_steps_reached);
    CHECK(path.termination == PathTermination::max_steps);

    CHECK_NOTHROW(coef_at(path, path.knots.back()));
    CHECK_THROWS_AS(coef_at(path, path.knots.back() * 0.5), InputError);
    CHECK_THROWS_AS(coef_at(path, -1.0), InputError);

    // Above the first knot the solution is zero.
    CHECK(coef_at(path, path.knots.front() * 2.0).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(compute_path(x, y, 0), InputError);
}

TEST_CASE("exhausted path extends to the least-squares end") {
    RngStream rng(28);
    const DesignMatrix x(random_matrix(rng, 20, 5));
    const Response y(random_vector(rng, 20));
    const LassoPath path = compute_path(x, y, 100);
    REQUIRE(path.termination == PathTermination::exhausted);
    const Eigen::VectorXd at_zero = coef_at(path, 0.0);
    const Eigen::VectorXd ols = x.values().colPivHouseholderQr().solve(y.values());
    CHECK((at_zero - ols).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("degenerate inputs produce empty paths") {
    RngStream rng(29);
    SUBCASE("zero response") {
        const DesignMatrix x(random_matrix(rng, 6, 3));
        const LassoPath path = compute_path(x, Response(Eigen::VectorXd::Zero(6)), 10);
        CHECK(path.steps() == 0);
        CHECK(coef_at(path, 0.3).size() == 3);
        CHECK(coef_at(path, 0.3).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("no columns") {
        const DesignMatrix x(Eigen::MatrixXd(4, 0));
        const LassoPath path = compute_path(x, Response(Eigen::VectorXd::Ones(4)), 10);
        CHECK(path.steps() == 0);
        CHECK(coef_at(path, 1.0).size() == 0);
    }
}

TEST_CASE("tied entry candidates resolve to the lowest column index") {
    // Two identical-correlation columns: duplicate the first column's
    // correlation structure by mirroring it.
    Eigen::MatrixXd m(4, 2);
    m << 1, 0, 0, 1, 0, 0, 0, 0;
    // y equally correlated with both columns
    Eigen::VectorXd yv(4);
    yv << 1, 1, 0, 0;
    const LassoPath path = compute_path(DesignMatrix(m), Response(yv), 5);
    REQUIRE(path.steps() >= 1);
    CHECK(path.events[0].variable == 0);
}
