#include "lassoinfer/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "lassoinfer/covariance_test.hpp"
#include "lassoinfer/desparsified.hpp"
#include "lassoinfer/errors.hpp"
#include "lassoinfer/lasso.hpp"
#include "lassoinfer/multiple_testing.hpp"

namespace lassoinfer {

namespace {

double mc_standard_error(double fraction, int runs) {
    if (runs < 1) return 0.0;
    return std::sqrt(std::max(fraction * (1.0 - fraction), 0.0) / runs);
}

// Solver-scale penalty equivalent to the 1/(2n)-convention value lambda_t on
// a design with the given column scaling.
double solver_lambda(const DesignMatrix& x, double lambda_t) {
    const double n = static_cast<double>(x.n());
    return x.scaling() == ColumnScaling::unit_norm ? std::sqrt(n) * lambda_t : n * lambda_t;
}

std::vector<int> first_distinct_entries(const LassoPath& path, int k0) {
    std::vector<int> seen;
    for (const auto& ev : path.events) {
        if (ev.kind != PathEventKind::enter) continue;
        if (std::find(seen.begin(), seen.end(), ev.variable) == seen.end()) {
            seen.push_back(ev.variable);
            if (static_cast<int>(seen.size()) == k0) break;
        }
    }
    return seen;
}

struct TableRunOutcome {
    bool false_positive[3] = {false, false, false};
    int true_positives[3] = {0, 0, 0};
};

}  // namespace

void validate(const ScenarioConfig& cfg) {
    if (cfg.n < 1) throw ConfigError("scenario: n must be positive");
    if (cfg.p < 1) throw ConfigError("scenario: p must be positive");
    if (!(std::abs(cfg.rho) < 1.0)) throw ConfigError("scenario: |rho| must be below 1");
    if (cfg.k0 < 1 || cfg.k0 > cfg.p) throw ConfigError("scenario: need 1 <= k0 <= p");
    if (cfg.coef_size < 0.0) throw ConfigError("scenario: coef_size must be nonnegative");
    if (cfg.sigma < 0.0) throw ConfigError("scenario: sigma must be nonnegative");
    if (cfg.runs < 1) throw ConfigError("scenario: runs must be positive");
}

DesignMatrix gen_ar1_design(const ScenarioConfig& cfg, RngStream& rng) {
    validate(cfg);
    Eigen::MatrixXd m(cfg.n, cfg.p);
    const double w = std::sqrt(1.0 - cfg.rho * cfg.rho);
    for (int i = 0; i < cfg.n; ++i) {
        double prev = 0.0;
        for (int j = 0; j < cfg.p; ++j) {
            const double z = rng.normal();
            prev = j == 0 ? z : cfg.rho * prev + w * z;
            m(i, j) = prev;
        }
    }
    DesignMatrix raw(std::move(m), ColumnScaling::raw);
    if (cfg.column_scaling == ColumnScaling::raw) return raw;
    return rescale_columns(raw, cfg.column_scaling);
}

std::pair<Eigen::VectorXd, std::vector<int>> place_active(const ScenarioConfig& cfg,
                                                          RngStream& rng) {
    validate(cfg);
    std::vector<int> active = rng.sample_indices(cfg.p, cfg.k0);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(cfg.p);
    for (int j : active) beta[j] = cfg.coef_size;
    return {std::move(beta), std::move(active)};
}

Response gen_response(const DesignMatrix& x, const Eigen::VectorXd& beta_star, double sigma,
                      RngStream& rng) {
    if (beta_star.size() != x.p()) throw InputError("gen_response: beta length mismatch");
    if (sigma < 0.0) throw InputError("gen_response: sigma must be nonnegative");
    Eigen::VectorXd y = x.values() * beta_star;
    for (int i = 0; i < x.n(); ++i) y[i] += sigma * rng.normal();
    return Response(std::move(y));
}

ReplicateData make_replicate(const ScenarioConfig& cfg, std::uint64_t run_index) {
    validate(cfg);
    RngStream rng(cfg.seed, run_index);

    ScenarioConfig raw_cfg = cfg;
    raw_cfg.column_scaling = ColumnScaling::raw;
    DesignMatrix x_raw = gen_ar1_design(raw_cfg, rng);
    auto [beta_star, a_star] = place_active(cfg, rng);
    Response y = gen_response(x_raw, beta_star, cfg.sigma, rng);

    Eigen::VectorXd true_fit = Eigen::VectorXd::Zero(cfg.p);
    if (cfg.column_scaling == ColumnScaling::raw) {
        for (int j : a_star) true_fit[j] = beta_star[j];
        return ReplicateData(std::move(x_raw), std::move(beta_star), std::move(a_star),
                             std::move(y), std::move(true_fit));
    }

    DesignMatrix x_fit = rescale_columns(x_raw, cfg.column_scaling);
    for (int j : a_star) {
        true_fit[j] =
            beta_star[j] * x_raw.values().col(j).norm() / x_fit.values().col(j).norm();
    }
    return ReplicateData(std::move(x_fit), std::move(beta_star), std::move(a_star),
                         std::move(y), std::move(true_fit));
}

void run_parallel(int count, int jobs, const std::function<void(int)>& body) {
    jobs = std::max(jobs, 1);
    if (jobs == 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    const int worker_count = std::min(jobs, count);
    workers.reserve(static_cast<std::size_t>(worker_count));
    for (int w = 0; w < worker_count; ++w) {
        workers.emplace_back([&]() {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    break;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

EventBResult prob_event_B(const ScenarioConfig& cfg, int jobs) {
    validate(cfg);
    std::vector<int> hit(static_cast<std::size_t>(cfg.runs), 0);
    std::vector<int> failed(static_cast<std::size_t>(cfg.runs), 0);

    run_parallel(cfg.runs, jobs, [&](int run) {
        try {
            const ReplicateData data = make_replicate(cfg, static_cast<std::uint64_t>(run));
            PathOptions opts;
            opts.max_entries = cfg.k0;
            opts.max_steps = 4 * cfg.k0 + 40;
            std::vector<int> entered;
            for (int attempt = 0; attempt < 3; ++attempt) {
                const LassoPath path = compute_path(data.x_fit, data.y, opts);
                entered = first_distinct_entries(path, cfg.k0);
                if (static_cast<int>(entered.size()) == cfg.k0) break;
                if (path.termination == PathTermination::exhausted) break;
                if (path.termination == PathTermination::rank_deficient) {
                    failed[static_cast<std::size_t>(run)] = 1;
                    return;
                }
                // Re-entries ate entry slots; widen the budget.
                opts.max_entries = opts.max_entries * 2 + 10;
                opts.max_steps = opts.max_steps * 2 + 20;
            }
            if (static_cast<int>(entered.size()) < cfg.k0) return;  // event B false
            std::vector<int> sorted = entered;
            std::sort(sorted.begin(), sorted.end());
            hit[static_cast<std::size_t>(run)] = sorted == data.a_star ? 1 : 0;
        } catch (const std::exception&) {
            failed[static_cast<std::size_t>(run)] = 1;
        }
    });

    EventBResult out;
    out.runs = cfg.runs;
    int hits = 0;
    for (int h : hit) hits += h;
    for (int f : failed) out.path_failures += f;
    out.fraction = static_cast<double>(hits) / cfg.runs;
    out.mc_se = mc_standard_error(out.fraction, cfg.runs);
    return out;
}

ScenarioSummary run_table_comparison(const ScenarioConfig& cfg, double alpha, int jobs) {
    validate(cfg);
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("run_table_comparison: alpha in (0,1)");

    std::vector<std::optional<TableRunOutcome>> results(static_cast<std::size_t>(cfg.runs));

    run_parallel(cfg.runs, jobs, [&](int run) {
        try {
            const ReplicateData data = make_replicate(cfg, static_cast<std::uint64_t>(run));
            const DesignMatrix& x = data.x_fit;
            const Response& y = data.y;
            const double log_p = std::log(static_cast<double>(std::max(cfg.p, 2)));

            const double sigma_hat =
                cfg.n > cfg.p ? ols_residual_sigma(x, y)
                              : scaled_lasso(x, y, std::sqrt(2.0 * log_p / cfg.n)).first;
            const double sigma2_hat = sigma_hat * sigma_hat;

            // de-spars: Holm over the debiased two-sided p-values.
            DesparsConfig dcfg;
            dcfg.alpha = alpha;
            dcfg.sigma_source = SigmaSource::known;
            dcfg.sigma_known = sigma_hat;
            const DebiasedFit despars = despars_inference(x, y, dcfg);
            std::vector<double> pvals(despars.p_values.data(),
                                      despars.p_values.data() + despars.p_values.size());
            const std::vector<int> sel_despars = reject_at(holm_adjust(pvals), alpha);

            // Shared path for both covariance protocols.
            const LassoPath path = compute_path(x, y, 3 * std::min(cfg.n, cfg.p) + 20);
            std::vector<int> sel_cov;
            std::vector<int> sel_covpval;
            const int entries = path.entry_count();
            if (entries > 0) {
                const CovSequence seq = cov_sequence(x, y, path, sigma2_hat, entries);
                sel_cov = select_cov_stop(seq, path, alpha);
                const std::map<int, double> pmap = assign_cov_pvals(seq, path);
                if (!pmap.empty()) {
                    std::vector<int> vars;
                    std::vector<double> ps;
                    for (const auto& [v, pv] : pmap) {
                        vars.push_back(v);
                        ps.push_back(pv);
                    }
                    for (int idx : reject_at(holm_adjust(ps), alpha)) {
                        sel_covpval.push_back(vars[static_cast<std::size_t>(idx)]);
                    }
                }
            }

            TableRunOutcome out;
            const std::vector<int>* selections[3] = {&sel_despars, &sel_cov, &sel_covpval};
            for (int m = 0; m < 3; ++m) {
                for (int v : *selections[m]) {
                    const bool active = std::binary_search(data.a_star.begin(),
                                                           data.a_star.end(), v);
                    if (active) {
                        ++out.true_positives[m];
                    } else {
                        out.false_positive[m] = true;
                    }
                }
            }
            results[static_cast<std::size_t>(run)] = out;
        } catch (const std::exception&) {
            results[static_cast<std::size_t>(run)] = std::nullopt;
        }
    });

    ScenarioSummary summary;
    double fp_sum[3] = {0, 0, 0};
    double tp_sum[3] = {0, 0, 0};
    for (const auto& r : results) {
        if (!r) {
            ++summary.runs_failed;
            continue;
        }
        ++summary.runs_completed;
        for (int m = 0; m < 3; ++m) {
            fp_sum[m] += r->false_positive[m] ? 1.0 : 0.0;
            tp_sum[m] += r->true_positives[m];
        }
    }
    const char* names[3] = {"de-spars", "cov", "cov.pval"};
    const double denom = std::max(summary.runs_completed, 1);
    for (int m = 0; m < 3; ++m) {
        summary.per_method[names[m]] = {fp_sum[m] / denom, tp_sum[m] / denom};
    }
    return summary;
}

double irrepresentable_eta(const DesignMatrix& x, const std::vector<int>& a0) {
    const int p = x.p();
    std::vector<unsigned char> in_a0(static_cast<std::size_t>(p), 0);
    for (int j : a0) {
        if (j < 0 || j >= p) throw InputError("irrepresentable_eta: index out of range");
        in_a0[static_cast<std::size_t>(j)] = 1;
    }
    if (a0.empty()) return 0.0;

    const Eigen::MatrixXd& xm = x.values();
    Eigen::MatrixXd xa(x.n(), static_cast<Eigen::Index>(a0.size()));
    for (std::size_t i = 0; i < a0.size(); ++i) {
        xa.col(static_cast<Eigen::Index>(i)) = xm.col(a0[i]);
    }
    const Eigen::MatrixXd gram = xa.transpose() * xa;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success) {
        throw SingularError("irrepresentable_eta: singular Gram matrix on A0");
    }
    const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
    if (d.minCoeff() <= 1e-13 * d.maxCoeff()) {
        throw SingularError("irrepresentable_eta: singular Gram matrix on A0");
    }

    double eta = 0.0;
    for (int j = 0; j < p; ++j) {
        if (in_a0[static_cast<std::size_t>(j)]) continue;
        const Eigen::VectorXd w = ldlt.solve(xa.transpose() * xm.col(j));
        eta = std::max(eta, w.lpNorm<1>());
    }
    return eta;
}

IrrepresentableReport irrepresentable_report(const DesignMatrix& x, const std::vector<int>& a0,
                                             const Eigen::VectorXd& eps,
                                             const LassoPath& path) {
    if (eps.size() != x.n()) throw InputError("irrepresentable_report: eps length mismatch");

    IrrepresentableReport rep;
    rep.eta = irrepresentable_eta(x, a0);
    rep.lambda_eps =
        x.p() == 0 ? 0.0 : (x.values().transpose() * eps).cwiseAbs().maxCoeff();
    rep.lambda_eta_defined = rep.eta < 1.0;
    if (!rep.lambda_eta_defined) return rep;

    rep.lambda_eta = rep.lambda_eps * (1.0 + rep.eta) / (1.0 - rep.eta);
    for (double knot : path.knots) {
        if (knot >= rep.lambda_eta) ++rep.k_hat_eta;
    }
    try {
        const Eigen::VectorXd beta = coef_at(path, rep.lambda_eta);
        bool contained = true;
        for (int j = 0; j < static_cast<int>(beta.size()); ++j) {
            if (beta[j] != 0.0 &&
                std::find(a0.begin(), a0.end(), j) == a0.end()) {
                contained = false;
                break;
            }
        }
        rep.screening_verified = contained;
    } catch (const InputError&) {
        rep.screening_verified = false;  // path truncated above lambda_eta
    }
    return rep;
}

ScreeningResult screening_rate(const ScenarioConfig& cfg, const LambdaRule& rule, int jobs) {
    validate(cfg);
    if (!(rule.c > 0.0)) throw InputError("screening_rate: rule constant must be positive");

    std::vector<int> hit(static_cast<std::size_t>(cfg.runs), 0);
    run_parallel(cfg.runs, jobs, [&](int run) {
        const ReplicateData data = make_replicate(cfg, static_cast<std::uint64_t>(run));
        const double lambda_t =
            rule.c * std::sqrt(std::log(static_cast<double>(std::max(cfg.p, 2))) / cfg.n) *
            cfg.sigma;
        const LassoFit fit =
            solve_lasso(data.x_fit, data.y, solver_lambda(data.x_fit, lambda_t));
        hit[static_cast<std::size_t>(run)] =
            std::includes(fit.active_set.begin(), fit.active_set.end(), data.a_star.begin(),
                          data.a_star.end())
                ? 1
                : 0;
    });

    ScreeningResult out;
    out.runs = cfg.runs;
    int hits = 0;
    for (int h : hit) hits += h;
    out.fraction = static_cast<double>(hits) / cfg.runs;
    out.mc_se = mc_standard_error(out.fraction, cfg.runs);
    return out;
}

}  // namespace lassoinfer
