#include "lassoinfer/run_commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "lassoinfer/covariance_test.hpp"
#include "lassoinfer/desparsified.hpp"
#include "lassoinfer/errors.hpp"
#include "lassoinfer/lasso.hpp"
#include "lassoinfer/multiple_testing.hpp"
#include "lassoinfer/path.hpp"
#include "lassoinfer/refit_test.hpp"
#include "lassoinfer/sim_harness.hpp"
#include "lassoinfer/text_io.hpp"
#include "lassoinfer/version.hpp"

namespace lassoinfer {

namespace {

struct Inputs {
    DesignMatrix x;
    Response y;
};

Inputs load_inputs(const std::string& x_file, const std::string& y_file) {
    Eigen::MatrixXd m = read_matrix_file(x_file);
    Eigen::VectorXd v = read_vector_file(y_file);
    if (v.size() != m.rows()) {
        throw InputError("response length " + std::to_string(v.size()) +
                         " does not match design rows " + std::to_string(m.rows()));
    }
    return {DesignMatrix(std::move(m)), Response(std::move(v))};
}

int default_path_steps(const DesignMatrix& x) {
    return 3 * std::min(x.n(), x.p()) + 20;
}

double estimate_sigma2(const DesignMatrix& x, const Response& y) {
    const double log_p = std::log(static_cast<double>(std::max(x.p(), 2)));
    const double s = x.n() > x.p()
                         ? ols_residual_sigma(x, y)
                         : scaled_lasso(x, y, std::sqrt(2.0 * log_p / x.n())).first;
    return s * s;
}

// Table writer: stdout unless an output path was given.
class TableSink {
public:
    explicit TableSink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw InputError(path + ": cannot open for writing");
        }
    }
    std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

Manifest make_manifest(const std::string& command, const std::string& config_echo,
                       std::uint64_t seed) {
    Manifest m;
    m.command = command;
    m.config_digest = digest_hex(config_echo);
    m.seed = seed;
    m.version = kVersion;
    return m;
}

std::string scenario_echo(const ScenarioConfig& cfg, double alpha) {
    std::ostringstream out;
    out << "n=" << cfg.n << " p=" << cfg.p << " rho=" << format_num(cfg.rho)
        << " k0=" << cfg.k0 << " sigma=" << format_num(cfg.sigma) << " runs=" << cfg.runs
        << " seed=" << cfg.seed << " column_scaling=" << to_string(cfg.column_scaling);
    if (alpha > 0.0) out << " alpha=" << format_num(alpha);
    return out.str();
}

std::vector<double> parse_size_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("bad entry '" + item + "' in size list");
        }
    }
    if (out.empty()) throw ConfigError("empty size list");
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ConfigError("bad entry '" + item + "' in integer list");
        }
    }
    if (out.empty()) throw ConfigError("empty integer list");
    return out;
}

}  // namespace

void cmd_path(const PathCmdOptions& opt) {
    const Inputs in = load_inputs(opt.x_file, opt.y_file);
    const int steps = opt.max_steps > 0 ? opt.max_steps : default_path_steps(in.x);
    const LassoPath path = compute_path(in.x, in.y, steps);

    TableSink sink(opt.out);
    std::ostream& os = sink.out();
    os << manifest_header(make_manifest(
        "path --x " + opt.x_file + " --y " + opt.y_file + " --max-steps " +
            std::to_string(steps),
        opt.x_file + "|" + opt.y_file, 0));
    os << "# termination: "
       << (path.termination == PathTermination::exhausted
               ? "exhausted"
               : path.termination == PathTermination::max_steps ? "max_steps"
                                                                : "rank_deficient")
       << "\n";
    os << "step\tlambda\tevent\tvariable\tn_active\n";
    for (int k = 0; k < path.steps(); ++k) {
        const auto& ev = path.events[static_cast<std::size_t>(k)];
        os << (k + 1) << "\t" << format_num(path.knots[static_cast<std::size_t>(k)]) << "\t"
           << (ev.kind == PathEventKind::enter ? "enter" : "leave") << "\t"
           << (ev.variable + 1) << "\t"
           << path.active_sets[static_cast<std::size_t>(k)].size() << "\n";
    }
}

void cmd_covtest(const CovtestCmdOptions& opt) {
    const Inputs in = load_inputs(opt.x_file, opt.y_file);
    if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw ConfigError("covtest: alpha in (0,1)");
    const double sigma2 = opt.estimate_sigma ? estimate_sigma2(in.x, in.y) : opt.sigma2;
    if (!(sigma2 > 0.0)) throw ConfigError("covtest: need --sigma2 > 0 or --estimate-sigma");

    const LassoPath path = compute_path(in.x, in.y, default_path_steps(in.x));
    const int entries = path.entry_count();
    const int steps = opt.steps > 0 ? std::min(opt.steps, std::max(entries, 1))
                                    : std::max(entries, 1);

    CovSequence seq;
    if (entries > 0) seq = cov_sequence(in.x, in.y, path, sigma2, steps);

    TableSink sink(opt.out);
    std::ostream& os = sink.out();
    std::ostringstream cmd;
    cmd << "covtest --x " << opt.x_file << " --y " << opt.y_file << " --sigma2 "
        << format_num(sigma2) << " --steps " << steps << " --alpha " << format_num(opt.alpha);
    os << manifest_header(make_manifest(cmd.str(), cmd.str(), 0));
    os << "step\tvariable\tstatistic\tp_value\n";
    for (const auto& e : seq.entries) {
        os << e.step << "\t" << (e.variable + 1) << "\t" << format_num(e.statistic) << "\t"
           << format_num(e.p_value) << "\n";
    }

    const std::vector<int> stop_sel = select_cov_stop(seq, path, opt.alpha);
    os << "# cov_selection:";
    for (int v : stop_sel) os << " " << (v + 1);
    os << "\n";

    const std::map<int, double> pmap = assign_cov_pvals(seq, path);
    std::vector<int> vars;
    std::vector<double> ps;
    for (const auto& [v, pv] : pmap) {
        vars.push_back(v);
        ps.push_back(pv);
    }
    std::vector<int> holm_sel;
    if (!ps.empty()) {
        for (int idx : reject_at(holm_adjust(ps), opt.alpha)) {
            holm_sel.push_back(vars[static_cast<std::size_t>(idx)]);
        }
    }
    os << "# cov_pval_holm_selection:";
    for (int v : holm_sel) os << " " << (v + 1);
    os << "\n";
}

void cmd_refittest(const RefittestCmdOptions& opt) {
    const Inputs in = load_inputs(opt.x_file, opt.y_file);
    if (opt.null_kind != "fixed" && opt.null_kind != "order-stat") {
        throw ConfigError("refittest: --null must be 'fixed' or 'order-stat'");
    }
    const double sigma2 = opt.estimate_sigma ? estimate_sigma2(in.x, in.y) : opt.sigma2;
    if (!(sigma2 > 0.0)) throw ConfigError("refittest: need --sigma2 > 0 or --estimate-sigma");

    const LassoPath path = compute_path(in.x, in.y, default_path_steps(in.x));
    const int entries = path.entry_count();
    const int steps = opt.steps > 0 ? std::min(opt.steps, std::max(entries, 1))
                                    : std::max(entries, 1);
    std::vector<RefitSequenceEntry> seq;
    if (entries > 0) seq = refit_sequence(in.x, in.y, path, sigma2, steps);

    TableSink sink(opt.out);
    std::ostream& os = sink.out();
    std::ostringstream cmd;
    cmd << "refittest --x " << opt.x_file << " --y " << opt.y_file << " --sigma2 "
        << format_num(sigma2) << " --steps " << steps << " --null " << opt.null_kind;
    os << manifest_header(make_manifest(cmd.str(), cmd.str(), 0));
    os << "step\tvariable\tstatistic\tp_value\treference\tnote\n";
    for (const auto& e : seq) {
        double pv = 1.0;
        std::string ref;
        if (opt.null_kind == "fixed") {
            pv = refit_fixed_pvalue(e.value);
            ref = "chisq1";
        } else {
            pv = order_statistic_null_pvalue(e.value, e.step, in.x.p());
            ref = "chisq1_order_stat_k" + std::to_string(e.step);
        }
        os << e.step << "\t" << (e.variable + 1) << "\t" << format_num(e.value) << "\t"
           << format_num(pv) << "\t" << ref << "\t"
           << (e.rank_deficient ? "rank_deficient" : "ok") << "\n";
    }
}

void cmd_despars(const DesparsCmdOptions& opt) {
    const Inputs in = load_inputs(opt.x_file, opt.y_file);
    DesparsConfig cfg;
    cfg.alpha = opt.alpha;
    if (opt.sigma_source == "auto") {
        cfg.sigma_source = SigmaSource::auto_rule;
    } else if (opt.sigma_source == "scaled_lasso") {
        cfg.sigma_source = SigmaSource::scaled_lasso;
    } else if (opt.sigma_source == "ols_residual") {
        cfg.sigma_source = SigmaSource::ols_residual;
    } else if (opt.sigma_source == "known") {
        cfg.sigma_source = SigmaSource::known;
        cfg.sigma_known = opt.sigma_known;
    } else {
        throw ConfigError("despars: unknown sigma source '" + opt.sigma_source + "'");
    }

    const DebiasedFit fit = despars_inference(in.x, in.y, cfg);
    std::vector<double> pvals(fit.p_values.data(), fit.p_values.data() + fit.p_values.size());
    const AdjustedPValues adj = holm_adjust(pvals);

    TableSink sink(opt.out);
    std::ostream& os = sink.out();
    std::ostringstream cmd;
    cmd << "despars --x " << opt.x_file << " --y " << opt.y_file << " --alpha "
        << format_num(opt.alpha) << " --sigma-source " << opt.sigma_source;
    os << manifest_header(make_manifest(cmd.str(), cmd.str(), 0));
    os << "# sigma_eps_hat: " << format_num(fit.sigma_eps_hat) << "\n";
    os << "# lambda_used: " << format_num(fit.lambda_used) << "\n";
    os << "variable\testimate\tse\tp\tp_holm\tci_low\tci_high\n";
    for (int j = 0; j < in.x.p(); ++j) {
        os << (j + 1) << "\t" << format_num(fit.b_hat[j]) << "\t" << format_num(fit.se[j])
           << "\t" << format_num(fit.p_values[j]) << "\t"
           << format_num(adj.adjusted[static_cast<std::size_t>(j)]) << "\t"
           << format_num(fit.ci_low[j]) << "\t" << format_num(fit.ci_high[j]) << "\n";
    }
}

std::vector<std::string> cmd_simulate(const SimulateCmdOptions& opt, std::ostream& log) {
    ScenarioConfig cfg;
    cfg.seed = 12345;
    double alpha = 0.05;
    std::vector<double> sizes;
    std::vector<int> k0_list;

    if (opt.which == "table1" || opt.which == "table2") {
        cfg.n = 100;
        cfg.p = opt.which == "table1" ? 80 : 200;
        cfg.rho = 0.5;
        cfg.k0 = 10;
        cfg.sigma = 1.0;
        cfg.runs = 500;
        sizes = {0.5, 1.0, 2.0, 4.0};
    } else if (opt.which == "figure1") {
        cfg.n = 100;
        cfg.p = 1000;
        cfg.rho = 0.5;
        cfg.k0 = 3;  // per-point override below
        cfg.sigma = 1.0;
        cfg.runs = 500;
        sizes = {0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
        k0_list = {3, 5, 10};
    } else {
        throw ConfigError("simulate: --which must be figure1, table1 or table2");
    }

    if (!opt.scenario_file.empty()) {
        const ConfigFile file = ConfigFile::parse_file(opt.scenario_file);
        cfg.n = file.get_int("scenario", "n", cfg.n);
        cfg.p = file.get_int("scenario", "p", cfg.p);
        cfg.rho = file.get_double("scenario", "rho", cfg.rho);
        cfg.k0 = file.get_int("scenario", "k0", cfg.k0);
        cfg.sigma = file.get_double("scenario", "sigma", cfg.sigma);
        cfg.runs = file.get_int("scenario", "runs", cfg.runs);
        cfg.seed = file.get_u64("scenario", "seed", cfg.seed);
        cfg.column_scaling = column_scaling_from_string(
            file.get_str("scenario", "column_scaling", to_string(cfg.column_scaling)));
        alpha = file.get_double("simulate", "alpha", alpha);
        if (file.has("simulate", "sizes")) {
            sizes = parse_size_list(file.get_str("simulate", "sizes", ""));
        }
        if (file.has("simulate", "k0_list")) {
            k0_list = parse_int_list(file.get_str("simulate", "k0_list", ""));
        }
    }
    if (opt.runs > 0) cfg.runs = opt.runs;
    if (opt.has_seed) cfg.seed = opt.seed;
    if (opt.alpha > 0.0) alpha = opt.alpha;

    std::filesystem::create_directories(opt.out_dir);
    std::vector<std::string> written;

    std::ostringstream cmd;
    cmd << "simulate --which " << opt.which << " --runs " << cfg.runs << " --seed "
        << cfg.seed << " --alpha " << format_num(alpha);

    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    if (opt.which == "figure1") {
        // fraction[k0 index][size index]
        std::vector<std::vector<EventBResult>> grid(k0_list.size());
        for (std::size_t ik = 0; ik < k0_list.size(); ++ik) {
            for (double size : sizes) {
                ScenarioConfig point = cfg;
                point.k0 = k0_list[ik];
                point.coef_size = size;
                grid[ik].push_back(prob_event_B(point, opt.jobs));
                log << "figure1: k0=" << point.k0 << " size=" << size
                    << " prob_B=" << grid[ik].back().fraction << " (" << elapsed() << " s)\n";
            }
        }

        const std::string summary_path =
            (std::filesystem::path(opt.out_dir) / "figure1_summary.tsv").string();
        {
            std::ofstream os(summary_path);
            if (!os) throw InputError(summary_path + ": cannot open for writing");
            ScenarioConfig echo = cfg;
            os << manifest_header(make_manifest(cmd.str(), scenario_echo(echo, 0.0), cfg.seed));
            os << "# scenario: " << scenario_echo(echo, 0.0) << "\n";
            os << "k0\tcoef_size\tprob_B\tmc_se\tpath_failures\truns\n";
            for (std::size_t ik = 0; ik < k0_list.size(); ++ik) {
                for (std::size_t is = 0; is < sizes.size(); ++is) {
                    const EventBResult& r = grid[ik][is];
                    os << k0_list[ik] << "\t" << format_num(sizes[is]) << "\t"
                       << format_num(r.fraction) << "\t" << format_num(r.mc_se) << "\t"
                       << r.path_failures << "\t" << r.runs << "\n";
                }
            }
        }
        written.push_back(summary_path);

        const std::string plot_path =
            (std::filesystem::path(opt.out_dir) / "figure1_plot.tsv").string();
        {
            std::ofstream os(plot_path);
            if (!os) throw InputError(plot_path + ": cannot open for writing");
            os << manifest_header(make_manifest(cmd.str(), scenario_echo(cfg, 0.0), cfg.seed));
            os << "coef_size";
            for (int k0 : k0_list) os << "\tpB_k0_" << k0;
            os << "\n";
            for (std::size_t is = 0; is < sizes.size(); ++is) {
                os << format_num(sizes[is]);
                for (std::size_t ik = 0; ik < k0_list.size(); ++ik) {
                    os << "\t" << format_num(grid[ik][is].fraction);
                }
                os << "\n";
            }
        }
        written.push_back(plot_path);
    } else {
        std::vector<ScenarioSummary> rows;
        for (double size : sizes) {
            ScenarioConfig point = cfg;
            point.coef_size = size;
            rows.push_back(run_table_comparison(point, alpha, opt.jobs));
            log << opt.which << ": size=" << size << " done (" << elapsed() << " s)\n";
        }

        const std::string summary_path =
            (std::filesystem::path(opt.out_dir) / (opt.which + "_summary.tsv")).string();
        std::ofstream os(summary_path);
        if (!os) throw InputError(summary_path + ": cannot open for writing");
        os << manifest_header(make_manifest(cmd.str(), scenario_echo(cfg, alpha), cfg.seed));
        os << "# scenario: " << scenario_echo(cfg, alpha) << "\n";
        os << "coef_size\tmethod\tfwer\ttp\truns_completed\truns_failed\n";
        for (std::size_t is = 0; is < sizes.size(); ++is) {
            for (const char* method : {"de-spars", "cov", "cov.pval"}) {
                const MethodResult& r = rows[is].per_method.at(method);
                os << format_num(sizes[is]) << "\t" << method << "\t" << format_num(r.fwer)
                   << "\t" << format_num(r.tp) << "\t" << rows[is].runs_completed << "\t"
                   << rows[is].runs_failed << "\n";
            }
        }
        written.push_back(summary_path);
    }

    log << opt.which << ": total " << elapsed() << " s\n";
    return written;
}

}  // namespace lassoinfer
