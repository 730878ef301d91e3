#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <doctest.h>

#include "lassoinfer/covariance_test.hpp"
#include "lassoinfer/errors.hpp"
#include "lassoinfer/lasso.hpp"
#include "lassoinfer/path.hpp"
#include "lassoinfer/rng.hpp"

#include "test_util.hpp"

using namespace lassoinfer;
using test_util::orthonormal_design;
using test_util::random_matrix;
using test_util::random_vector;
using test_util::rel_diff;

TEST_CASE("the two algebraic forms agree on random instances, any subset") {
    RngStream rng(51);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 8 + static_cast<int>(rng.uniform_int(10));
        const int p = 3 + static_cast<int>(rng.uniform_int(15));
        const DesignMatrix x(random_matrix(rng, n, p));
        const Response y(random_vector(rng, n));
        const double lmax = lambda_max(x, y);
        if (lmax == 0.0) continue;
        const double lambda = lmax * (0.05 + 0.85 * rng.uniform01());

        std::vector<int> subset;
        for (int j = 0; j < p; ++j) {
            if (rng.uniform01() < 0.4) subset.push_back(j);
        }
        const CovDrop d = cov_drop(x, y, subset, lambda, 1.0);
        CHECK(rel_diff(d.value_objective_form, d.value_inner_product_form) < 1e-6);
        CHECK(d.value() >= -1e-8);
    }
}

TEST_CASE("restricted-to-support drops vanish") {
    RngStream rng(52);
    const DesignMatrix x(random_matrix(rng, 12, 15));
    const Response y(random_vector(rng, 12));
    const double lambda = 0.4 * lambda_max(x, y);
    const LassoFit full = solve_lasso(x, y, lambda);

    SUBCASE("S contains the support") {
        const CovDrop d = cov_drop(x, y, full.active_set, lambda, 1.0);
        CHECK(std::abs(d.value()) < 1e-6);
        std::vector<int> bigger = full.active_set;
        for (int j = 0; j < x.p() && bigger.size() < 12; ++j) {
            if (!std::binary_search(full.active_set.begin(), full.active_set.end(), j)) {
                bigger.push_back(j);
            }
        }
        std::sort(bigger.begin(), bigger.end());
        const CovDrop d2 = cov_drop(x, y, bigger, lambda, 1.0);
        CHECK(std::abs(d2.value()) < 1e-6);
    }
    SUBCASE("S = A_k at the knot lambda_k") {
        const LassoPath path = compute_path(x, y, 40);
        REQUIRE(path.steps() >= 3);
        for (int k : {1, 2}) {
            const CovDrop d = cov_drop(x, y, path.active_sets[static_cast<std::size_t>(k)],
                                       path.knots[static_cast<std::size_t>(k)], 1.0);
            CHECK(std::abs(d.value()) < 1e-6);
        }
    }
}

TEST_CASE("cov_drop validates input") {
    RngStream rng(53);
    const DesignMatrix x(random_matrix(rng, 8, 4));
    const Response y(random_vector(rng, 8));
    CHECK_THROWS_AS(cov_drop(x, y, {}, 1.0, 0.0), InputError);
    CHECK_THROWS_AS(cov_drop(x, y, {}, 0.0, 1.0), InputError);
    CHECK_THROWS_AS(cov_drop(x, y, {9}, 1.0, 1.0), InputError);
}

TEST_CASE("orthonormal design: T_k equals the knot identity") {
    RngStream rng(54);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 40;
        const int p = 8;
        const DesignMatrix x = orthonormal_design(rng, n, p);
        const Response y(random_vector(rng, n));
        const double sigma2 = 0.5 + rng.uniform01();

        const LassoPath path = compute_path(x, y, 30);
        REQUIRE(path.steps() >= p);
        const CovSequence seq = cov_sequence(x, y, path, sigma2, p - 1);
        REQUIRE(static_cast<int>(seq.entries.size()) == p - 1);
        for (int k = 0; k < p - 1; ++k) {
            const double lk = path.knots[static_cast<std::size_t>(k)];
            const double lk1 = path.knots[static_cast<std::size_t>(k + 1)];
            const double expect = (lk * lk - lk * lk1) / sigma2;
            CHECK(std::abs(seq.entries[static_cast<std::size_t>(k)].statistic - expect) <
                  1e-8 * std::max(1.0, expect));
            CHECK(seq.entries[static_cast<std::size_t>(k)].p_value ==
                  doctest::Approx(std::exp(-std::max(
                      seq.entries[static_cast<std::size_t>(k)].statistic, 0.0))));
        }
    }
}

TEST_CASE("scale equivariance: c*y with c^2*sigma2 leaves T_k invariant") {
    RngStream rng(55);
    const DesignMatrix x(random_matrix(rng, 15, 10));
    const Response y(random_vector(rng, 15));
    const double c = 4.0;  // power of two: scaling is exact in floating point
    const Response cy(c * y.values());

    const LassoPath path = compute_path(x, y, 60);
    const LassoPath cpath = compute_path(x, cy, 60);
    REQUIRE(path.steps() == cpath.steps());

    const int steps = std::max(1, path.entry_count() - 1);
    const CovSequence seq = cov_sequence(x, y, path, 1.7, steps);
    const CovSequence cseq = cov_sequence(x, cy, cpath, c * c * 1.7, steps);
    REQUIRE(seq.entries.size() == cseq.entries.size());
    for (std::size_t i = 0; i < seq.entries.size(); ++i) {
        CHECK(rel_diff(seq.entries[i].statistic, cseq.entries[i].statistic) < 1e-12);
    }
}

TEST_CASE("sequence handles short paths with an explicit truncation signal") {
    RngStream rng(56);
    const DesignMatrix x(random_matrix(rng, 10, 6));
    const Response y(random_vector(rng, 10));
    const LassoPath path = compute_path(x, y, 2);  // truncated after 2 knots
    const CovSequence seq = cov_sequence(x, y, path, 1.0, 5);
    CHECK(seq.truncated);
    CHECK(seq.requested_steps == 5);
    CHECK(static_cast<int>(seq.entries.size()) <= 1);
}

TEST_CASE("exhausted path evaluates its final entry via the least-squares limit") {
    RngStream rng(57);
    const DesignMatrix x(random_matrix(rng, 20, 4));
    const Response y(random_vector(rng, 20));
    const LassoPath path = compute_path(x, y, 100);
    REQUIRE(path.termination == PathTermination::exhausted);
    const int entries = path.entry_count();
    const CovSequence seq = cov_sequence(x, y, path, 1.0, entries);
    CHECK(static_cast<int>(seq.entries.size()) == entries);
    CHECK(!seq.truncated);
    CHECK(seq.entries.back().statistic >= -1e-8);
}

TEST_CASE("select_cov_stop follows the stopping rule") {
    // Synthetic sequence and a matching minimal path skeleton.
    LassoPath path;
    path.p = 5;
    path.knots = {3.0, 2.0, 1.0};
    path.events = {{1, 2, PathEventKind::enter},
                   {2, 0, PathEventKind::enter},
                   {3, 4, PathEventKind::enter}};
    path.active_sets = {{2}, {0, 2}, {0, 2, 4}};
    path.segments.resize(3);

    CovSequence seq;
    seq.requested_steps = 3;
    seq.entries = {{1, 2, 6.9, 0.001, 3.0, 2.0},
                   {2, 0, 6.2, 0.002, 2.0, 1.0},
                   {3, 4, 0.69, 0.5, 1.0, 0.0}};

    CHECK(select_cov_stop(seq, path, 0.05) == std::vector<int>{0, 2});

    seq.entries[0].p_value = 0.5;
    CHECK(select_cov_stop(seq, path, 0.05).empty());

    seq.entries[0].p_value = 0.001;
    seq.entries[2].p_value = 0.01;
    CHECK(select_cov_stop(seq, path, 0.05) == std::vector<int>{0, 2, 4});

    CHECK_THROWS_AS(select_cov_stop(seq, path, 0.0), InputError);
}

TEST_CASE("assign_cov_pvals keeps final-model variables at their last entry") {
    LassoPath path;
    path.p = 4;
    path.knots = {5.0, 4.0, 3.0, 2.0};
    path.events = {{1, 1, PathEventKind::enter},
                   {2, 3, PathEventKind::enter},
                   {3, 1, PathEventKind::leave},
                   {4, 1, PathEventKind::enter}};
    path.active_sets = {{1}, {1, 3}, {3}, {1, 3}};
    path.segments.resize(4);

    CovSequence seq;
    seq.requested_steps = 3;
    seq.entries = {{1, 1, 5.0, 0.007, 5.0, 4.0},
                   {2, 3, 4.0, 0.018, 4.0, 3.0},
                   {3, 1, 1.0, 0.368, 2.0, 0.0}};

    const std::map<int, double> pmap = assign_cov_pvals(seq, path);
    REQUIRE(pmap.size() == 2);
    // variable 1 re-entered at entry step 3: its p-value is the later one
    CHECK(pmap.at(1) == doctest::Approx(0.368));
    CHECK(pmap.at(3) == doctest::Approx(0.018));

    SUBCASE("a variable that left and never returned is absent") {
        LassoPath gone = path;
        gone.events[3] = {4, 2, PathEventKind::enter};
        gone.active_sets[3] = {2, 3};
        CovSequence seq2 = seq;
        seq2.entries[2].variable = 2;
        const std::map<int, double> pm = assign_cov_pvals(seq2, gone);
        CHECK(pm.count(1) == 0);
        CHECK(pm.count(3) == 1);
        CHECK(pm.count(2) == 1);
    }
}

TEST_CASE("re-entry after a drop happens on real data and uses the later step") {
    RngStream rng(58);
    bool exercised = false;
    for (int trial = 0; trial < 400 && !exercised; ++trial) {
        const int n = 8 + static_cast<int>(rng.uniform_int(8));
        const int p = n + 2 + static_cast<int>(rng.uniform_int(12));
        const DesignMatrix x(random_matrix(rng, n, p));
        const Response y(random_vector(rng, n));
        const LassoPath path = compute_path(x, y, 300);

        // Look for enter -> leave -> enter on one variable.
        std::map<int, int> enters;
        int candidate = -1;
        std::map<int, bool> left;
        for (const auto& ev : path.events) {
            if (ev.kind == PathEventKind::enter) {
                if (left[ev.variable]) candidate = ev.variable;
                enters[ev.variable]++;
            } else {
                left[ev.variable] = true;
            }
        }
        if (candidate < 0) continue;

        const int entries = path.entry_count();
        const CovSequence seq = cov_sequence(x, y, path, 1.0, entries);
        const std::map<int, double> pmap = assign_cov_pvals(seq, path);
        const auto& final_active = path.active_sets.back();
        if (std::find(final_active.begin(), final_active.end(), candidate) ==
            final_active.end()) {
            continue;
        }
        // The assigned p-value must equal the LAST entry of the candidate.
        int last_step = -1;
        int count = 0;
        for (const auto& ev : path.events) {
            if (ev.kind == PathEventKind::enter) {
                ++count;
                if (ev.variable == candidate) last_step = count;
            }
        }
        REQUIRE(last_step >= 1);
        for (const auto& e : seq.entries) {
            if (e.step == last_step) {
                CHECK(pmap.at(candidate) == doctest::Approx(e.p_value));
                exercised = true;
            }
        }
    }
    CHECK(exercised);
}

TEST_CASE("two equal strong coefficients shrink T_1") {
    RngStream rng(59);
    const int n = 50;
    const int reps = 60;
    std::vector<double> t1_equal;
    std::vector<double> t1_single;
    for (int r = 0; r < reps; ++r) {
        const DesignMatrix x = orthonormal_design(rng, n, 6);
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(6);
        beta[0] = 20.0;
        beta[1] = 20.0;
        Eigen::VectorXd yv = x.values() * beta;
        for (int i = 0; i < n; ++i) yv[i] += rng.normal();
        const LassoPath path = compute_path(x, Response(yv), 10);
        const CovSequence seq = cov_sequence(x, Response(yv), path, 1.0, 1);
        t1_equal.push_back(seq.entries.at(0).statistic);

        Eigen::VectorXd beta1 = Eigen::VectorXd::Zero(6);
        beta1[0] = 20.0;
        Eigen::VectorXd yv1 = x.values() * beta1;
        for (int i = 0; i < n; ++i) yv1[i] += rng.normal();
        const LassoPath path1 = compute_path(x, Response(yv1), 10);
        const CovSequence seq1 = cov_sequence(x, Response(yv1), path1, 1.0, 1);
        t1_single.push_back(seq1.entries.at(0).statistic);
    }
    std::sort(t1_equal.begin(), t1_equal.end());
    std::sort(t1_single.begin(), t1_single.end());
    const double med_equal = t1_equal[reps / 2];
    const double med_single = t1_single[reps / 2];
    CHECK(med_equal < med_single / 4.0);
}

TEST_CASE("T_1 is approximately Exp(1) under the orthonormal global null") {
    RngStream rng(60);
    const int n = 60;
    const int reps = 400;
    std::vector<double> t1;
    for (int r = 0; r < reps; ++r) {
        const DesignMatrix x = orthonormal_design(rng, n, n);
        const Response y(test_util::random_vector(rng, n));
        const LassoPath path = compute_path(x, y, 4);
        const CovSequence seq = cov_sequence(x, y, path, 1.0, 1);
        t1.push_back(seq.entries.at(0).statistic);
    }
    const double ks = test_util::ks_distance(
        t1, [](double v) { return 1.0 - std::exp(-std::max(v, 0.0)); });
    CHECK(ks < 0.12);
}
