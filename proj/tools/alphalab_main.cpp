// alphalab: market-timing tests and alpha-process simulation toolkit.
//
// Subcommands: fit, timing, power, simulate, excursion, ledger, study.
// Every run emits one JSON report (stdout or --out) embedding the full
// resolved configuration, so identical flags and seed reproduce the
// report byte for byte apart from the timestamp.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "alphalab/dynamics.hpp"
#include "alphalab/errors.hpp"
#include "alphalab/io.hpp"
#include "alphalab/martingale.hpp"
#include "alphalab/panel.hpp"
#include "alphalab/regression.hpp"
#include "alphalab/report.hpp"
#include "alphalab/rng.hpp"
#include "alphalab/study.hpp"
#include "alphalab/timing.hpp"
#include "alphalab/wishart.hpp"

using nlohmann::json;

namespace {

std::uint64_t auto_seed() {
    const auto ticks = static_cast<std::uint64_t>(
        std::chrono::high_resolution_clock::now().time_since_epoch().count());
    std::uint64_t state = ticks ^ 0x41424C4142ULL;
    return alphalab::splitmix64_next(state);
}

// Relative output paths land in ALPHALAB_OUT_DIR when it is set.
std::string resolve_out(const std::string& path) {
    if (path.empty()) return path;
    const char* dir = std::getenv("ALPHALAB_OUT_DIR");
    if (!dir || *dir == '\0' || std::filesystem::path(path).is_absolute()) return path;
    return (std::filesystem::path(dir) / path).string();
}

void emit_report(const json& report, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << report.dump(2) << '\n';
        return;
    }
    const std::string resolved = resolve_out(out_path);
    std::ofstream out(resolved);
    if (!out) throw std::runtime_error("cannot open " + resolved + " for writing");
    out << report.dump(2) << '\n';
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            values.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw std::invalid_argument(what + ": cannot parse '" + cell + "' as a number");
        }
    }
    if (values.empty()) throw std::invalid_argument(what + ": empty list");
    return values;
}

// "identity" | "diag:a,b,.." | "full:a,b;c,d"
Eigen::MatrixXd parse_sigma(const std::string& text, int dim) {
    if (text == "identity") return Eigen::MatrixXd::Identity(dim, dim);
    if (text.rfind("diag:", 0) == 0) {
        const auto values = parse_double_list(text.substr(5), "--sigma diag");
        if (static_cast<int>(values.size()) != dim)
            throw std::invalid_argument("--sigma diag needs " + std::to_string(dim) +
                                        " entries");
        Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) sigma(i, i) = values[static_cast<std::size_t>(i)];
        return sigma;
    }
    if (text.rfind("full:", 0) == 0) {
        std::vector<std::vector<double>> rows;
        std::stringstream ss(text.substr(5));
        std::string row;
        while (std::getline(ss, row, ';'))
            rows.push_back(parse_double_list(row, "--sigma full"));
        if (static_cast<int>(rows.size()) != dim)
            throw std::invalid_argument("--sigma full needs " + std::to_string(dim) + " rows");
        Eigen::MatrixXd sigma(dim, dim);
        for (int i = 0; i < dim; ++i) {
            if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != dim)
                throw std::invalid_argument("--sigma full rows must have " +
                                            std::to_string(dim) + " entries");
            for (int j = 0; j < dim; ++j)
                sigma(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        return sigma;
    }
    throw std::invalid_argument("--sigma must be identity, diag:.. or full:..");
}

json panel_summary(const alphalab::ReturnsPanel& panel) {
    return {{"rows", panel.periods()},
            {"benchmarks", panel.benchmark_count()},
            {"hedges", panel.hedge_count()},
            {"level", panel.level},
            {"grid_reindexed", panel.grid_reindexed}};
}

// ---------------------------------------------------------------- fit

struct FitArgs {
    std::string input, out;
    std::string alpha_variant = "unrestricted";
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

int run_fit(const FitArgs& args) {
    const auto panel = alphalab::ingest_csv(args.input);
    const auto variant = args.alpha_variant == "restricted"
                             ? alphalab::GammaVariant::restricted
                             : alphalab::GammaVariant::unrestricted;
    const auto fit = alphalab::fit_panel(panel, variant);
    const Eigen::MatrixXd moment = alphalab::cross_moment(panel);

    json config = {{"input", args.input},
                   {"alpha_variant", args.alpha_variant},
                   {"seed", args.seed},
                   {"threads", args.threads}};
    json result = {
        {"panel", panel_summary(panel)},
        {"delta", alphalab::to_json(fit.benchmark_delta)},
        {"gamma_restricted", alphalab::to_json(fit.hedge_gamma_restricted)},
        {"gamma_unrestricted", alphalab::to_json(fit.hedge_gamma_unrestricted)},
        {"alpha_fitted", alphalab::to_json(fit.alpha_fitted)},
        {"residual_rms", fit.residual_rms},
        {"orthogonality_residual", fit.orthogonality_residual},
        {"cross_moment",
         {{"matrix", alphalab::to_json(moment)}, {"max_abs", moment.cwiseAbs().maxCoeff()}}},
    };
    emit_report(alphalab::make_report("fit", config, result), args.out);
    return 0;
}

// ---------------------------------------------------------------- timing

struct TimingArgs {
    std::string input, out;
    std::string eta = "auto";
    double quantile = 0.95;
    int calib_trials = 100000;
    int calib_dof = 0; // 0: panel rows
    std::string z_next_mean; // empty: sample mean of the hedge rows
    int power_dof = 0;       // 0: skip the power computation
    int truncation = 60;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

int run_timing(const TimingArgs& args) {
    const auto panel = alphalab::ingest_csv(args.input);
    const Eigen::Index p = panel.hedge_count();

    // Null scale for calibration and power: the hedge second-moment
    // matrix Z^T Z / J.
    Eigen::MatrixXd sigma_hat =
        panel.Z.transpose() * panel.Z / static_cast<double>(panel.periods());
    sigma_hat = 0.5 * (sigma_hat + sigma_hat.transpose()).eval();

    double eta = 0.0;
    json calibration;
    if (args.eta == "auto") {
        alphalab::WishartSpec spec;
        spec.dof = args.calib_dof > 0 ? args.calib_dof : static_cast<int>(panel.periods());
        spec.dim = static_cast<int>(p);
        spec.sigma = sigma_hat;
        const double normalized_quantile = alphalab::largest_root_quantile(
            spec, args.quantile, args.calib_trials, args.seed, args.threads);
        eta = spec.dof * normalized_quantile;
        calibration = {{"quantile", args.quantile},
                       {"dof", spec.dof},
                       {"trials", args.calib_trials},
                       {"sigma", "hedge second moment"},
                       {"normalized_quantile", normalized_quantile}};
    } else {
        eta = std::stod(args.eta);
    }

    const auto verdict = alphalab::spectral_test(panel.X, panel.Z, eta);

    Eigen::VectorXd z_mean;
    if (args.z_next_mean.empty()) {
        z_mean = panel.Z.colwise().mean();
    } else {
        const auto values = parse_double_list(args.z_next_mean, "--z-next-mean");
        if (static_cast<Eigen::Index>(values.size()) != p)
            throw std::invalid_argument("--z-next-mean needs " + std::to_string(p) +
                                        " entries");
        z_mean = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                   static_cast<Eigen::Index>(values.size()));
    }
    const auto sup = alphalab::sup_timing_criterion(panel.Z, z_mean, panel.level);

    std::optional<double> power;
    json power_block;
    if (args.power_dof > 0) {
        alphalab::WishartSpec spec;
        spec.dof = args.power_dof;
        spec.dim = static_cast<int>(p);
        spec.sigma = sigma_hat;
        const auto cdf = alphalab::largest_root_cdf(spec, eta / spec.dof, args.truncation);
        power = 1.0 - cdf.value;
        power_block = {{"dof", spec.dof},
                       {"sigma", "hedge second moment"},
                       {"normalization", "largest root divided by degrees of freedom"},
                       {"truncation", args.truncation},
                       {"truncation_error", cdf.truncation_error},
                       {"degraded", cdf.degraded}};
    }

    json config = {{"input", args.input},
                   {"eta", args.eta},
                   {"quantile", args.quantile},
                   {"calib_trials", args.calib_trials},
                   {"calib_dof", args.calib_dof},
                   {"z_next_mean", args.z_next_mean},
                   {"power_dof", args.power_dof},
                   {"truncation", args.truncation},
                   {"seed", args.seed},
                   {"threads", args.threads}};
    json result = {
        {"panel", panel_summary(panel)},
        {"eigenvalues", alphalab::to_json(verdict.eigenvalues)},
        {"statistic", verdict.statistic},
        {"eta", verdict.eta},
        {"eta_source", args.eta == "auto" ? "calibrated" : "explicit"},
        {"reject", verdict.reject_null},
        {"power", power ? json(*power) : json()},
        {"n", sup.level},
        {"thresholds", {{"eta", verdict.eta}, {"sup_threshold", sup.threshold}}},
        {"sup_criterion",
         {{"value", sup.value},
          {"threshold", sup.threshold},
          {"satisfied", sup.satisfied},
          {"first_valid_index", sup.first_valid_index},
          {"z_next_mean", alphalab::to_json(z_mean)},
          {"per_period", alphalab::to_json(sup.per_period)}}},
    };
    if (!calibration.is_null()) result["calibration"] = calibration;
    if (!power_block.is_null()) result["power_detail"] = power_block;
    emit_report(alphalab::make_report("timing", config, result), args.out);
    return 0;
}

// ---------------------------------------------------------------- power

struct PowerArgs {
    std::string out;
    int dof = 0, dim = 0;
    std::string sigma = "identity";
    std::string eta;
    int truncation = 60;
    int mc_trials = 0; // 0: skip the Monte Carlo cross-check
    std::string quantile_out;
    std::string quantiles = "0.5,0.9,0.95,0.99";
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

int run_power(const PowerArgs& args) {
    alphalab::WishartSpec spec;
    spec.dof = args.dof;
    spec.dim = args.dim;
    spec.sigma = parse_sigma(args.sigma, args.dim);
    alphalab::validate_spec(spec);

    const auto etas = parse_double_list(args.eta, "--eta");

    json rows = json::array();
    for (double eta : etas) {
        const auto cdf = alphalab::largest_root_cdf(spec, eta, args.truncation);
        rows.push_back({{"eta", eta},
                        {"cdf", cdf.value},
                        {"exceedance", 1.0 - cdf.value},
                        {"truncation_error", cdf.truncation_error},
                        {"degraded", cdf.degraded}});
    }

    json mc;
    if (args.mc_trials > 0) {
        const auto table = alphalab::empirical_largest_root_cdf(spec, args.mc_trials, args.seed,
                                                                etas, args.threads);
        json probs = json::array();
        for (double v : table.probability) probs.push_back(v);
        mc = {{"trials", args.mc_trials}, {"seed", args.seed}, {"empirical_cdf", probs}};
    }

    std::string quantile_csv;
    if (!args.quantile_out.empty()) {
        const auto qs = parse_double_list(args.quantiles, "--quantiles");
        quantile_csv = resolve_out(args.quantile_out);
        std::ofstream out(quantile_csv);
        if (!out) throw std::runtime_error("cannot open " + quantile_csv + " for writing");
        out << "eta,probability\n" << std::setprecision(17);
        const int trials = args.mc_trials > 0 ? args.mc_trials : 100000;
        for (double q : qs) {
            const double eta =
                alphalab::largest_root_quantile(spec, q, trials, args.seed, args.threads);
            out << eta << ',' << q << '\n';
        }
    }

    json config = {{"dof", args.dof},
                   {"dim", args.dim},
                   {"sigma", args.sigma},
                   {"eta", args.eta},
                   {"truncation", args.truncation},
                   {"mc_trials", args.mc_trials},
                   {"quantiles", args.quantiles},
                   {"quantile_out", args.quantile_out},
                   {"seed", args.seed},
                   {"threads", args.threads}};
    json result = {
        {"normalization", "largest root divided by degrees of freedom"},
        {"table", rows},
    };
    if (!mc.is_null()) result["monte_carlo"] = mc;
    if (!quantile_csv.empty()) result["quantile_csv"] = quantile_csv;
    emit_report(alphalab::make_report("power", config, result), args.out);
    return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string out;
    std::string scheme = "bridge";
    int level = 10;
    int trials = 1000;
    double x0 = 0.0, target = 0.0, hurdle = 0.0, x = 0.0;
    double diffusion = 1.0;
    std::string innovations = "gaussian";
    std::string hedge = "ones";
    int component = 0;
    std::string paths_out, paths_bin;
    double girsanov_x = 0.0, girsanov_t = 0.0;
    bool girsanov_half = false;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

json ensemble_summary(const alphalab::PathEnsemble& e) {
    const Eigen::VectorXd terminal = e.paths.col(e.points() - 1);
    const double mean = terminal.mean();
    const double sd = e.trials() > 1
                          ? std::sqrt((terminal.array() - mean).square().sum() /
                                      static_cast<double>(e.trials() - 1))
                          : 0.0;
    return {{"scheme", e.scheme},
            {"level", e.level},
            {"trials", e.trials()},
            {"seed", e.seed},
            {"initial_value", e.initial_value},
            {"pinned_final_step", e.pinned_final_step},
            {"terminal_mean", mean},
            {"terminal_sd", sd}};
}

int run_simulate(const SimulateArgs& args) {
    json config = {{"scheme", args.scheme},
                   {"level", args.level},
                   {"trials", args.trials},
                   {"x0", args.x0},
                   {"target", args.target},
                   {"hurdle", args.hurdle},
                   {"x", args.x},
                   {"diffusion", args.diffusion},
                   {"innovations", args.innovations},
                   {"hedge", args.hedge},
                   {"component", args.component},
                   {"paths_out", args.paths_out},
                   {"paths_bin", args.paths_bin},
                   {"girsanov_x", args.girsanov_x},
                   {"girsanov_T", args.girsanov_t},
                   {"girsanov_half", args.girsanov_half},
                   {"seed", args.seed},
                   {"threads", args.threads}};

    json result;
    std::optional<alphalab::PathEnsemble> ensemble;

    if (args.scheme == "bridge") {
        ensemble = alphalab::simulate_bridge(args.x0, args.target, args.level, args.trials,
                                             args.seed, args.diffusion, args.threads);
    } else if (args.scheme == "const-drift") {
        ensemble = alphalab::simulate_const_drift(args.x0, args.hurdle, args.level, args.trials,
                                                  args.seed, args.diffusion, args.threads);
    } else if (args.scheme == "bm") {
        ensemble = alphalab::simulate_brownian(args.x0, args.level, args.trials, args.seed,
                                               args.threads);
    } else if (args.scheme == "strategy") {
        std::vector<Eigen::MatrixXd> hedge;
        if (args.hedge == "ones") {
            hedge.push_back(Eigen::MatrixXd::Ones(std::max(4, args.level), 1));
        } else if (args.hedge.rfind("csv:", 0) == 0) {
            const auto panel = alphalab::ingest_csv(args.hedge.substr(4));
            hedge.push_back(panel.Z);
        } else {
            throw std::invalid_argument("--hedge must be ones or csv:<panel path>");
        }
        auto strat = alphalab::strategy_sde(args.x, hedge, args.level, args.trials, args.seed,
                                            args.threads);
        if (args.component < 0 || args.component >= static_cast<int>(strat.components.size()))
            throw std::invalid_argument("--component out of range");
        json comps = json::array();
        for (const auto& c : strat.components) comps.push_back(ensemble_summary(c));
        result["components"] = comps;
        result["driver"] = ensemble_summary(strat.driver);
        ensemble = std::move(strat.components[static_cast<std::size_t>(args.component)]);
    } else if (args.scheme == "subordinated") {
        const bool keep = !args.paths_out.empty() || !args.paths_bin.empty();
        const auto sub = alphalab::subordinated_bm(
            args.level, alphalab::innovations_from_string(args.innovations), args.trials,
            args.seed, keep, args.threads);
        result["c_hat"] = sub.c_hat;
        result["c_hat_se"] = sub.c_hat_se;
        result["increment_mean"] = sub.increment_mean;
        result["increment_mean_se"] = sub.increment_mean_se;
        if (keep) {
            alphalab::PathEnsemble inc;
            inc.level = args.level;
            inc.dt = std::ldexp(1.0, -args.level);
            inc.seed = args.seed;
            inc.scheme = "subordinated";
            inc.paths = *sub.increments;
            inc.grid.setLinSpaced(inc.paths.cols(), 0.0, 1.0 - inc.dt);
            ensemble = std::move(inc);
        }
    } else {
        throw std::invalid_argument("unknown scheme: " + args.scheme);
    }

    if (ensemble) {
        result["ensemble"] = ensemble_summary(*ensemble);
        if (!args.paths_out.empty()) {
            const std::string path = resolve_out(args.paths_out);
            alphalab::write_paths_csv_file(*ensemble, path);
            result["paths_csv"] = path;
        }
        if (!args.paths_bin.empty()) {
            const std::string path = resolve_out(args.paths_bin);
            alphalab::write_paths_binary(*ensemble, path);
            result["paths_binary"] = path;
        }
        if (args.girsanov_x != 0.0 || args.girsanov_t != 0.0) {
            const double horizon = args.girsanov_t > 0.0 ? args.girsanov_t : 1.0 - ensemble->dt;
            const auto weights = alphalab::girsanov_weights(*ensemble, args.girsanov_x, horizon,
                                                            args.girsanov_half);
            result["girsanov"] = {{"x", args.girsanov_x},
                                  {"T", horizon},
                                  {"half_corrected", args.girsanov_half},
                                  {"mean_weight", weights.mean()},
                                  {"min_weight", weights.minCoeff()},
                                  {"max_weight", weights.maxCoeff()}};
        }
    }

    emit_report(alphalab::make_report("simulate", config, result), args.out);
    return 0;
}

// ---------------------------------------------------------------- excursion

struct ExcursionArgs {
    std::string out;
    int level = 8;
    int trials = 1000;
    double horizon = 3.0;
    int max_retries = 1000;
    std::string paths_out;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

int run_excursion(const ExcursionArgs& args) {
    const auto ens = alphalab::vervaat_excursion(args.level, args.trials, args.seed,
                                                 args.horizon, args.max_retries, args.threads);
    double tau_minus = 0.0, tau_plus = 0.0, mid = 0.0, min_value = 1e300;
    const auto mid_col = static_cast<Eigen::Index>(ens.grid.size() / 2);
    for (const auto& p : ens.paths) {
        tau_minus += p.tau_minus;
        tau_plus += p.tau_plus;
        mid += p.values(mid_col);
        min_value = std::min(min_value, p.values.minCoeff());
    }
    const double n = static_cast<double>(ens.paths.size());

    std::string csv_path;
    if (!args.paths_out.empty()) {
        csv_path = resolve_out(args.paths_out);
        std::ofstream out(csv_path);
        if (!out) throw std::runtime_error("cannot open " + csv_path + " for writing");
        alphalab::write_excursions_csv(ens, out);
    }

    json config = {{"level", args.level},
                   {"trials", args.trials},
                   {"horizon", args.horizon},
                   {"max_retries", args.max_retries},
                   {"paths_out", args.paths_out},
                   {"seed", args.seed},
                   {"threads", args.threads}};
    json result = {{"accepted", ens.paths.size()},
                   {"total_retries", ens.total_retries},
                   {"tau_minus_mean", tau_minus / n},
                   {"tau_plus_mean", tau_plus / n},
                   {"midpoint_mean", mid / n},
                   {"min_value", min_value}};
    if (!csv_path.empty()) result["paths_csv"] = csv_path;
    emit_report(alphalab::make_report("excursion", config, result), args.out);
    return 0;
}

// ---------------------------------------------------------------- ledger

struct LedgerArgs {
    std::string input, out;
    std::string policy = "always";
    double d1 = 0.0;
    std::string csv_out;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

int run_ledger(const LedgerArgs& args) {
    const auto panel = alphalab::ingest_csv(args.input);
    const auto ledger = alphalab::ledger_from_panel(panel, args.policy);

    std::vector<double> clipped;
    double running = args.d1;
    clipped.push_back(running);
    for (double payoff : ledger.payoff) {
        running += std::max(0.0, payoff);
        clipped.push_back(running);
    }

    std::string csv_path;
    if (!args.csv_out.empty()) {
        csv_path = resolve_out(args.csv_out);
        std::ofstream out(csv_path);
        if (!out) throw std::runtime_error("cannot open " + csv_path + " for writing");
        out << "k,d,u,dbar\n" << std::setprecision(17);
        for (std::size_t i = 0; i < ledger.d.size(); ++i)
            out << ledger.period[i] << ',' << ledger.d[i] << ','
                << (i < ledger.u.size() ? ledger.u[i] : 0) << ',' << ledger.dbar[i] << '\n';
    }

    json entries = json::array();
    for (std::size_t i = 0; i < ledger.d.size(); ++i)
        entries.push_back({{"k", ledger.period[i]},
                           {"d", ledger.d[i]},
                           {"u", i < ledger.u.size() ? ledger.u[i] : 0},
                           {"dbar", ledger.dbar[i]}});

    json config = {{"input", args.input}, {"policy", args.policy}, {"d1", args.d1},
                   {"csv_out", args.csv_out}, {"seed", args.seed},  {"threads", args.threads}};
    json result = {{"panel", panel_summary(panel)},
                   {"policy", ledger.policy},
                   {"oracle_policy", ledger.oracle_policy},
                   {"entries", entries},
                   {"final_dbar", ledger.dbar.back()},
                   {"option_ledger", clipped}};
    if (!csv_path.empty()) result["csv"] = csv_path;
    emit_report(alphalab::make_report("ledger", config, result), args.out);
    return 0;
}

// ---------------------------------------------------------------- study

struct StudyArgs {
    std::string out;
    double x = 0.1;
    int funds = 20;
    double rho = 0.0;
    int trials = 10000;
    double t_star = 0.5;
    double significance = 0.05;
    int excursion_level = 8;
    std::string per_trial_csv;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

int run_study(const StudyArgs& args) {
    const bool keep = !args.per_trial_csv.empty();
    const auto report = alphalab::false_negative_experiment(
        args.x, args.funds, args.rho, args.trials, args.seed, args.t_star, args.significance,
        args.excursion_level, args.threads, keep);

    std::string csv_path;
    if (keep) {
        csv_path = resolve_out(args.per_trial_csv);
        std::ofstream out(csv_path);
        if (!out) throw std::runtime_error("cannot open " + csv_path + " for writing");
        out << "t,stopped_alpha,reject\n" << std::setprecision(17);
        for (std::size_t i = 0; i < report.per_trial_t.size(); ++i)
            out << report.per_trial_t[i] << ',' << report.per_trial_stopped[i] << ','
                << report.per_trial_reject[i] << '\n';
    }

    json config = {{"x", args.x},
                   {"funds", args.funds},
                   {"rho", args.rho},
                   {"trials", args.trials},
                   {"t_star", args.t_star},
                   {"significance", args.significance},
                   {"excursion_level", args.excursion_level},
                   {"per_trial_csv", args.per_trial_csv},
                   {"seed", args.seed},
                   {"threads", args.threads}};
    json result = {{"false_negative_fraction", report.false_negative_fraction},
                   {"reject_rate", report.reject_rate},
                   {"mean_t", report.mean_t},
                   {"mean_stopped_alpha", report.mean_stopped_alpha},
                   {"positive_stopped_fraction", report.positive_stopped_fraction},
                   {"mean_alpha_profile", report.mean_alpha_profile},
                   {"stats",
                    {{"variance_formula", report.stats.variance_formula},
                     {"empirical_variance", report.stats.empirical_variance},
                     {"covariance_sum", report.stats.covariance_sum},
                     {"covariance_bound", report.stats.covariance_bound},
                     {"bound_holds", report.stats.bound_holds}}}};
    if (!csv_path.empty()) result["per_trial_csv"] = csv_path;
    emit_report(alphalab::make_report("study", config, result), args.out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"alphalab: market-timing tests and alpha-process simulation"};
    app.require_subcommand(1);

    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = all cores)");

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "fit hedge and benchmark sensitivities");
    fit_cmd->add_option("--input", fit.input, "panel CSV (t,y,x1..xm,z1..zp)")->required();
    fit_cmd->add_option("--alpha-variant", fit.alpha_variant, "restricted|unrestricted")
        ->check(CLI::IsMember({"restricted", "unrestricted"}));
    fit_cmd->add_option("--out", fit.out, "report path (default stdout)");
    fit_cmd->add_option("--seed", fit.seed, "seed (echoed in the report)");

    TimingArgs timing;
    auto* timing_cmd = app.add_subcommand("timing", "spectral market-timing test");
    timing_cmd->add_option("--input", timing.input, "panel CSV")->required();
    timing_cmd->add_option("--eta", timing.eta, "threshold value or 'auto'");
    timing_cmd->add_option("--quantile", timing.quantile, "calibration quantile");
    timing_cmd->add_option("--calib-trials", timing.calib_trials, "calibration sampler trials");
    timing_cmd->add_option("--calib-dof", timing.calib_dof, "calibration dof (0: panel rows)");
    timing_cmd->add_option("--z-next-mean", timing.z_next_mean,
                           "forecast mean of the next hedge row (comma list)");
    timing_cmd->add_option("--power-dof", timing.power_dof,
                           "dof of the alternative for the power computation");
    timing_cmd->add_option("--truncation", timing.truncation, "series truncation order");
    timing_cmd->add_option("--out", timing.out, "report path");
    timing_cmd->add_option("--seed", timing.seed, "seed");

    PowerArgs power;
    auto* power_cmd = app.add_subcommand("power", "largest-root distribution");
    power_cmd->add_option("--dof", power.dof, "degrees of freedom")->required();
    power_cmd->add_option("--dim", power.dim, "dimension p")->required();
    power_cmd->add_option("--sigma", power.sigma, "identity | diag:.. | full:..");
    power_cmd->add_option("--eta", power.eta, "eta grid (comma list)")->required();
    power_cmd->add_option("--truncation", power.truncation, "series truncation order");
    power_cmd->add_option("--mc-trials", power.mc_trials, "Monte Carlo cross-check trials");
    power_cmd->add_option("--quantile-out", power.quantile_out, "quantile table CSV path");
    power_cmd->add_option("--quantiles", power.quantiles, "quantiles for the table");
    power_cmd->add_option("--out", power.out, "report path");
    power_cmd->add_option("--seed", power.seed, "seed");

    SimulateArgs simulate;
    auto* sim_cmd = app.add_subcommand("simulate", "path simulators");
    sim_cmd->add_option("--scheme", simulate.scheme,
                        "bridge | const-drift | bm | strategy | subordinated")
        ->check(CLI::IsMember({"bridge", "const-drift", "bm", "strategy", "subordinated"}));
    sim_cmd->add_option("--level,--n", simulate.level, "dyadic level n (2^n steps)");
    sim_cmd->add_option("--trials", simulate.trials, "number of paths");
    sim_cmd->add_option("--x0", simulate.x0, "initial value");
    sim_cmd->add_option("--target", simulate.target, "bridge target");
    sim_cmd->add_option("--hurdle", simulate.hurdle, "const-drift numerator");
    sim_cmd->add_option("--x", simulate.x, "strategy starting point (>= 0)");
    sim_cmd->add_option("--diffusion", simulate.diffusion, "diffusion coefficient");
    sim_cmd->add_option("--innovations", simulate.innovations,
                        "gaussian | rademacher | uniform | zero");
    sim_cmd->add_option("--hedge", simulate.hedge, "ones | csv:<panel path>");
    sim_cmd->add_option("--component", simulate.component, "strategy component to dump");
    sim_cmd->add_option("--paths-out", simulate.paths_out, "CSV dump path");
    sim_cmd->add_option("--paths-bin", simulate.paths_bin, "binary dump path");
    sim_cmd->add_option("--girsanov-x", simulate.girsanov_x, "exponential weight numerator");
    sim_cmd->add_option("--girsanov-T", simulate.girsanov_t, "weight horizon (default 1 - dt)");
    sim_cmd->add_flag("--girsanov-half", simulate.girsanov_half,
                      "use the half-corrected exponent");
    sim_cmd->add_option("--out", simulate.out, "report path");
    sim_cmd->add_option("--seed", simulate.seed, "seed");

    ExcursionArgs excursion;
    auto* exc_cmd = app.add_subcommand("excursion", "normalized excursion sampler");
    exc_cmd->add_option("--level,--n", excursion.level, "dyadic level");
    exc_cmd->add_option("--trials", excursion.trials, "number of excursions");
    exc_cmd->add_option("--horizon", excursion.horizon, "simulation horizon");
    exc_cmd->add_option("--max-retries", excursion.max_retries, "resampling bound");
    exc_cmd->add_option("--paths-out", excursion.paths_out, "CSV dump path");
    exc_cmd->add_option("--out", excursion.out, "report path");
    exc_cmd->add_option("--seed", excursion.seed, "seed");

    LedgerArgs ledger;
    auto* led_cmd = app.add_subcommand("ledger", "martingale-system trading ledger");
    led_cmd->add_option("--input", ledger.input, "panel CSV")->required();
    led_cmd->add_option("--policy", ledger.policy,
                        "always|never|after-loss|after-gain|alternate|drawdown|oracle");
    led_cmd->add_option("--d1", ledger.d1, "option-ledger starting value");
    led_cmd->add_option("--csv-out", ledger.csv_out, "ledger CSV path");
    led_cmd->add_option("--out", ledger.out, "report path");
    led_cmd->add_option("--seed", ledger.seed, "seed");

    StudyArgs study;
    auto* study_cmd = app.add_subcommand("study", "correlated-fund false-negative study");
    study_cmd->add_option("--x", study.x, "hurdle x (>= 0)");
    study_cmd->add_option("--N,--funds", study.funds, "number of funds");
    study_cmd->add_option("--rho", study.rho, "pairwise correlation");
    study_cmd->add_option("--trials", study.trials, "Monte Carlo trials");
    study_cmd->add_option("--t-star", study.t_star, "profile evaluation time");
    study_cmd->add_option("--significance", study.significance, "two-sided test level");
    study_cmd->add_option("--excursion-level", study.excursion_level, "excursion grid level");
    study_cmd->add_option("--per-trial-csv", study.per_trial_csv, "per-trial CSV path");
    study_cmd->add_option("--out", study.out, "report path");
    study_cmd->add_option("--seed", study.seed, "seed");

    CLI11_PARSE(app, argc, argv);

    try {
        const std::uint64_t seed_fallback = auto_seed();
        const auto pick_seed = [&](CLI::App* cmd, std::uint64_t& seed) {
            if (cmd->count("--seed") == 0) seed = seed_fallback;
        };
        pick_seed(fit_cmd, fit.seed);
        pick_seed(timing_cmd, timing.seed);
        pick_seed(power_cmd, power.seed);
        pick_seed(sim_cmd, simulate.seed);
        pick_seed(exc_cmd, excursion.seed);
        pick_seed(led_cmd, ledger.seed);
        pick_seed(study_cmd, study.seed);
        fit.threads = timing.threads = power.threads = simulate.threads = excursion.threads =
            ledger.threads = study.threads = threads;

        if (fit_cmd->parsed()) return run_fit(fit);
        if (timing_cmd->parsed()) return run_timing(timing);
        if (power_cmd->parsed()) return run_power(power);
        if (sim_cmd->parsed()) return run_simulate(simulate);
        if (exc_cmd->parsed()) return run_excursion(excursion);
        if (led_cmd->parsed()) return run_ledger(ledger);
        if (study_cmd->parsed()) return run_study(study);
    } catch (const alphalab::RankDeficientError& err) {
        json detail = {{"type", "rank_deficient"},
                       {"message", err.what()},
                       {"tolerance", err.tolerance()},
                       {"rank", err.rank()},
                       {"expected_rank", err.expected_rank()}};
        json cols = json::array();
        for (const auto& c : err.columns()) cols.push_back(c);
        detail["columns"] = cols;
        std::cerr << json{{"error", detail}}.dump(2) << '\n';
        return 1;
    } catch (const std::exception& err) {
        std::cerr << json{{"error", {{"type", "runtime"}, {"message", err.what()}}}}.dump(2)
                  << '\n';
        return 1;
    }
    return 0;
}
