#include "lassoinfer/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "lassoinfer/errors.hpp"
#include "lassoinfer/lasso.hpp"

namespace lassoinfer {

namespace {

constexpr double kTieRel = 1e-12;       // equal-knot window for tie resolution
constexpr double kCondFloor = 1e-13;    // LDLT pivot ratio treated as singular

struct Candidate {
    double lambda = -1.0;
    int variable = -1;
    PathEventKind kind = PathEventKind::enter;
    double sign = 0.0;  // for entries: boundary that fired
};

// Running state of the homotopy: active variables in entry order, their
// boundary signs, the active Gram matrix and X_A^T y in the same order.
struct HomotopyState {
    std::vector<int> active;
    std::vector<double> signs;
    Eigen::MatrixXd gram;
    Eigen::VectorXd xty;

    int size() const { return static_cast<int>(active.size()); }

    void add(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int j, double sign) {
        const int m = size();
        Eigen::MatrixXd g2(m + 1, m + 1);
        g2.topLeftCorner(m, m) = gram;
        for (int i = 0; i < m; ++i) {
            const double v = x.col(active[static_cast<std::size_t>(i)]).dot(x.col(j));
            g2(i, m) = v;
            g2(m, i) = v;
        }
        g2(m, m) = x.col(j).squaredNorm();
        gram = std::move(g2);
        Eigen::VectorXd t2(m + 1);
        t2.head(m) = xty;
        t2[m] = x.col(j).dot(y);
        xty = std::move(t2);
        active.push_back(j);
        signs.push_back(sign);
    }

    void remove(int pos) {
        const int m = size();
        Eigen::MatrixXd g2(m - 1, m - 1);
        Eigen::VectorXd t2(m - 1);
        for (int i = 0, ii = 0; i < m; ++i) {
            if (i == pos) continue;
            t2[ii] = xty[i];
            for (int k = 0, kk = 0; k < m; ++k) {
                if (k == pos) continue;
                g2(ii, kk) = gram(i, k);
                ++kk;
            }
            ++ii;
        }
        gram = std::move(g2);
        xty = std::move(t2);
        active.erase(active.begin() + pos);
        signs.erase(signs.begin() + pos);
    }
};

}  // namespace

int LassoPath::entry_count() const {
    int c = 0;
    for (const auto& e : events) {
        if (e.kind == PathEventKind::enter) ++c;
    }
    return c;
}

int LassoPath::entry_step(int i) const {
    int c = 0;
    for (int k = 0; k < static_cast<int>(events.size()); ++k) {
        if (events[static_cast<std::size_t>(k)].kind == PathEventKind::enter) {
            if (c == i) return k;
            ++c;
        }
    }
    return -1;
}

LassoPath compute_path(const DesignMatrix& x, const Response& y, int max_steps) {
    PathOptions opts;
    opts.max_steps = max_steps;
    return compute_path(x, y, opts);
}

LassoPath compute_path(const DesignMatrix& x, const Response& y, const PathOptions& opts) {
    if (x.n() != y.n()) throw InputError("compute_path: dimension mismatch");
    if (opts.max_steps < 1) throw InputError("compute_path: max_steps must be >= 1");

    const Eigen::MatrixXd& xm = x.values();
    const Eigen::VectorXd& yv = y.values();
    const int p = x.p();

    LassoPath path;
    path.p = p;
    if (p == 0) return path;

    const Eigen::VectorXd xty_all = xm.transpose() * yv;

    // First knot: lambda_max, lowest index among ties.
    const double lambda1 = xty_all.cwiseAbs().maxCoeff();
    if (lambda1 <= 1e-300) return path;  // y orthogonal to all columns
    int first = 0;
    while (std::abs(xty_all[first]) < lambda1 * (1.0 - kTieRel)) ++first;

    const double lambda_floor = std::max(lambda1 * 1e-14, 1e-300);

    HomotopyState st;
    st.add(xm, yv, first, xty_all[first] > 0 ? 1.0 : -1.0);

    double lambda_cur = lambda1;
    path.knots.push_back(lambda1);
    path.events.push_back({1, first, PathEventKind::enter});
    {
        std::vector<int> a = st.active;
        std::sort(a.begin(), a.end());
        path.active_sets.push_back(std::move(a));
    }

    int entries = 1;
    int last_dropped = -1;

    while (true) {
        if (st.size() == 0) {
            path.termination = PathTermination::exhausted;
            break;
        }
        // Factor the active Gram; a singular system means the step cannot be
        // completed, so the event that introduced it is rolled back.
        Eigen::LDLT<Eigen::MatrixXd> ldlt(st.gram);
        bool singular = ldlt.info() != Eigen::Success;
        if (!singular) {
            const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
            if (d.minCoeff() <= kCondFloor * d.maxCoeff()) singular = true;
        }
        if (singular) {
            path.knots.pop_back();
            path.events.pop_back();
            path.active_sets.pop_back();
            path.termination = PathTermination::rank_deficient;
            break;
        }

        Eigen::Map<const Eigen::VectorXd> sgn(st.signs.data(),
                                              static_cast<Eigen::Index>(st.signs.size()));
        const Eigen::VectorXd b0 = ldlt.solve(st.xty);
        const Eigen::VectorXd b1 = ldlt.solve(sgn);

        PathSegment seg;
        seg.active = st.active;
        seg.intercept = b0;
        seg.slope = b1;
        path.segments.push_back(std::move(seg));

        if (path.steps() >= opts.max_steps) {
            path.max_steps_reached = true;
            path.termination = PathTermination::max_steps;
            break;
        }
        if (opts.max_entries > 0 && entries >= opts.max_entries) {
            path.termination = PathTermination::max_steps;
            break;
        }

        // Correlation of every column with the residual is a_j + lambda * g_j
        // on this segment.
        Eigen::VectorXd v0(yv.rows());
        Eigen::VectorXd v1(yv.rows());
        v0.setZero();
        v1.setZero();
        for (int i = 0; i < st.size(); ++i) {
            v0.noalias() += xm.col(st.active[static_cast<std::size_t>(i)]) * b0[i];
            v1.noalias() += xm.col(st.active[static_cast<std::size_t>(i)]) * b1[i];
        }
        const Eigen::VectorXd a = xty_all - xm.transpose() * v0;
        const Eigen::VectorXd g = xm.transpose() * v1;

        std::vector<unsigned char> is_active(static_cast<std::size_t>(p), 0);
        for (int j : st.active) is_active[static_cast<std::size_t>(j)] = 1;

        std::vector<Candidate> cands;
        const double upper = lambda_cur * (1.0 + 1e-10);
        for (int j = 0; j < p; ++j) {
            if (is_active[static_cast<std::size_t>(j)]) continue;
            for (int side = 0; side < 2; ++side) {
                const double denom = side == 0 ? 1.0 - g[j] : 1.0 + g[j];
                if (std::abs(denom) < 1e-14) continue;
                const double cand = (side == 0 ? a[j] : -a[j]) / denom;
                if (!(cand > lambda_floor) || cand > upper) continue;
                if (j == last_dropped && cand >= lambda_cur * (1.0 - 1e-10)) continue;
                cands.push_back({std::min(cand, lambda_cur), j, PathEventKind::enter,
                                 side == 0 ? 1.0 : -1.0});
            }
        }
        // Drop candidates must lie strictly below the current knot: a
        // zero-crossing AT the knot is a variable that only just entered
        // there (its coefficient grows on the way down), not a real drop.
        for (int i = 0; i < st.size(); ++i) {
            if (b1[i] == 0.0) continue;
            const double cand = b0[i] / b1[i];
            if (!(cand > lambda_floor) || cand > lambda_cur * (1.0 - kTieRel)) continue;
            const int var = st.active[static_cast<std::size_t>(i)];
            cands.push_back({cand, var, PathEventKind::leave, 0.0});
        }

        if (cands.empty()) {
            path.termination = PathTermination::exhausted;
            break;
        }

        double best = 0.0;
        for (const auto& c : cands) best = std::max(best, c.lambda);
        const Candidate* chosen = nullptr;
        for (const auto& c : cands) {
            if (c.lambda < best * (1.0 - kTieRel)) continue;
            if (!chosen) {
                chosen = &c;
                continue;
            }
            const bool c_leave = c.kind == PathEventKind::leave;
            const bool ch_leave = chosen->kind == PathEventKind::leave;
            if (c_leave != ch_leave) {
                if (c_leave) chosen = &c;
            } else if (c.variable < chosen->variable) {
                chosen = &c;
            }
        }

        lambda_cur = chosen->lambda;
        if (chosen->kind == PathEventKind::enter) {
            st.add(xm, yv, chosen->variable, chosen->sign);
            ++entries;
            last_dropped = -1;
        } else {
            int pos = 0;
            while (st.active[static_cast<std::size_t>(pos)] != chosen->variable) ++pos;
            st.remove(pos);
            last_dropped = chosen->variable;
        }
        path.knots.push_back(lambda_cur);
        path.events.push_back({path.steps(), chosen->variable, chosen->kind});
        std::vector<int> snapshot = st.active;
        std::sort(snapshot.begin(), snapshot.end());
        path.active_sets.push_back(std::move(snapshot));
    }

    return path;
}

Eigen::VectorXd coef_at(const LassoPath& path, double lambda) {
    if (lambda < 0.0) throw InputError("coef_at: lambda must be nonnegative");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(path.p);
    if (path.knots.empty()) {
        if (path.termination == PathTermination::exhausted) return out;
        throw InputError("coef_at: path holds no segments");
    }
    if (lambda > path.knots.front()) return out;

    // First knot strictly below lambda; the segment in use is the one before it.
    const auto it = std::lower_bound(path.knots.begin(), path.knots.end(), lambda,
                                     [](double knot, double lam) { return knot >= lam; });
    const auto idx = static_cast<std::size_t>(it - path.knots.begin());
    if (it == path.knots.end() && lambda < path.knots.back() &&
        path.termination != PathTermination::exhausted) {
        throw InputError("coef_at: lambda below the truncated end of the path");
    }
    const PathSegment& seg = path.segments[idx - 1];
    for (std::size_t i = 0; i < seg.active.size(); ++i) {
        out[seg.active[i]] = seg.intercept[static_cast<Eigen::Index>(i)] -
                             lambda * seg.slope[static_cast<Eigen::Index>(i)];
    }
    return out;
}

}  // namespace lassoinfer
