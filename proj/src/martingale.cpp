#include "alphalab/martingale.hpp"

#include <cmath>
#include <stdexcept>

#include "alphalab/panel.hpp"
#include "alphalab/regression.hpp"
#include "alphalab/rng.hpp"

namespace alphalab {

std::vector<double> snell_transform(const std::vector<double>& d, const std::vector<int>& u) {
    if (d.empty()) throw std::invalid_argument("snell_transform: empty increment sequence");
    if (u.size() + 1 < d.size())
        throw std::invalid_argument("snell_transform: need len(u) >= len(d) - 1, got " +
                                    std::to_string(u.size()) + " decisions for " +
                                    std::to_string(d.size()) + " increments");
    for (std::size_t j = 0; j < u.size(); ++j)
        if (u[j] != 0 && u[j] != 1)
            throw std::invalid_argument("snell_transform: decision u[" + std::to_string(j) +
                                        "] = " + std::to_string(u[j]) + " is not binary");

    std::vector<double> dbar(d.size());
    dbar[0] = d[0];
    for (std::size_t k = 1; k < d.size(); ++k)
        dbar[k] = dbar[k - 1] + static_cast<double>(u[k - 1]) * d[k];
    return dbar;
}

std::vector<double> option_ledger(const std::vector<Eigen::VectorXd>& z_rows,
                                  const std::vector<Eigen::VectorXd>& gammas,
                                  const std::vector<double>& eps, double d1) {
    if (z_rows.size() != gammas.size() || z_rows.size() != eps.size())
        throw std::invalid_argument("option_ledger: per-period inputs disagree on length (z=" +
                                    std::to_string(z_rows.size()) + ", gamma=" +
                                    std::to_string(gammas.size()) + ", eps=" +
                                    std::to_string(eps.size()) + ")");

    std::vector<double> ledger;
    ledger.reserve(z_rows.size() + 1);
    double running = d1;
    ledger.push_back(running);
    for (std::size_t k = 0; k < z_rows.size(); ++k) {
        if (z_rows[k].size() != gammas[k].size())
            throw std::invalid_argument("option_ledger: period " + std::to_string(k + 1) +
                                        " has z-length " + std::to_string(z_rows[k].size()) +
                                        " but gamma-length " +
                                        std::to_string(gammas[k].size()));
        const double payoff = z_rows[k].dot(gammas[k]) + eps[k];
        running += std::max(0.0, payoff);
        ledger.push_back(running);
    }
    return ledger;
}

Policy make_policy(const std::string& name) {
    if (name == "always") return [](const PolicyView&) { return 1; };
    if (name == "never") return [](const PolicyView&) { return 0; };
    if (name == "after-loss")
        return [](const PolicyView& past) {
            return past.size() > 0 && past.value(past.size() - 1) < 0.0 ? 1 : 0;
        };
    if (name == "after-gain")
        return [](const PolicyView& past) {
            return past.size() > 0 && past.value(past.size() - 1) > 0.0 ? 1 : 0;
        };
    if (name == "alternate")
        return [](const PolicyView& past) { return past.size() % 2 == 0 ? 1 : 0; };
    if (name == "drawdown")
        return [](const PolicyView& past) {
            double sum = 0.0;
            for (std::size_t i = 0; i < past.size(); ++i) sum += past.value(i);
            return sum < 0.0 ? 1 : 0;
        };
    throw std::invalid_argument("unknown policy: " + name);
}

const std::vector<std::string>& policy_names() {
    static const std::vector<std::string> names = {"always",    "never",     "after-loss",
                                                   "after-gain", "alternate", "drawdown"};
    return names;
}

namespace {

double draw_increment(Rng& rng, IncrementKind kind) {
    return kind == IncrementKind::rademacher ? rng.rademacher() : rng.normal();
}

std::vector<SnellCheck> run_check(IncrementKind kind, int trials, int horizon,
                                  const std::vector<int>& ks, std::uint64_t seed,
                                  const Policy* policy, bool peeking) {
    if (trials < 1) throw std::invalid_argument("snell_mc_check: trials must be >= 1");
    if (horizon < 2) throw std::invalid_argument("snell_mc_check: horizon must be >= 2");
    for (int k : ks)
        if (k < 1 || k > horizon)
            throw std::invalid_argument("snell_mc_check: checkpoint k=" + std::to_string(k) +
                                        " outside [1, horizon]");

    std::vector<double> sum_diff(ks.size(), 0.0), sum_diff_sq(ks.size(), 0.0);
    std::vector<double> sum_dbar(ks.size(), 0.0), sum_d(ks.size(), 0.0);

    std::vector<double> d(static_cast<std::size_t>(horizon));
    std::vector<int> u(static_cast<std::size_t>(horizon) - 1);
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(trial));
        for (int j = 0; j < horizon; ++j) d[static_cast<std::size_t>(j)] = draw_increment(rng, kind);
        for (int j = 0; j + 1 < horizon; ++j) {
            if (peeking) {
                // sees the very increment it bets on
                u[static_cast<std::size_t>(j)] = d[static_cast<std::size_t>(j) + 1] > 0.0 ? 1 : 0;
            } else {
                PolicyView view(d, static_cast<std::size_t>(j) + 1);
                const int decision = (*policy)(view);
                if (decision != 0 && decision != 1)
                    throw std::invalid_argument("snell_mc_check: policy returned non-binary " +
                                                std::to_string(decision));
                u[static_cast<std::size_t>(j)] = decision;
            }
        }
        const auto dbar = snell_transform(d, u);
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const auto idx = static_cast<std::size_t>(ks[i] - 1);
            const double diff = dbar[idx] - d[idx];
            sum_diff[i] += diff;
            sum_diff_sq[i] += diff * diff;
            sum_dbar[i] += dbar[idx];
            sum_d[i] += d[idx];
        }
    }

    std::vector<SnellCheck> checks(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        SnellCheck& c = checks[i];
        c.k = ks[i];
        const double nt = static_cast<double>(trials);
        c.mean_dbar = sum_dbar[i] / nt;
        c.mean_d = sum_d[i] / nt;
        c.diff = sum_diff[i] / nt;
        const double var = std::max(0.0, sum_diff_sq[i] / nt - c.diff * c.diff);
        c.diff_se = std::sqrt(var / nt);
        c.holds = c.diff <= 3.0 * c.diff_se;
    }
    return checks;
}

} // namespace

std::vector<SnellCheck> snell_mc_check(IncrementKind kind, const Policy& policy, int trials,
                                       int horizon, const std::vector<int>& ks,
                                       std::uint64_t seed) {
    return run_check(kind, trials, horizon, ks, seed, &policy, false);
}

std::vector<SnellCheck> snell_mc_check_peeking(IncrementKind kind, int trials, int horizon,
                                               const std::vector<int>& ks,
                                               std::uint64_t seed) {
    return run_check(kind, trials, horizon, ks, seed, nullptr, true);
}

StrategyLedger ledger_from_panel(const ReturnsPanel& panel, const std::string& policy_name) {
    const Eigen::Index first =
        std::max<Eigen::Index>(panel.benchmark_count() + panel.hedge_count() + 1, 2);
    if (panel.periods() < first + 1)
        throw std::invalid_argument("ledger_from_panel: need at least " +
                                    std::to_string(first + 1) + " rows, panel has " +
                                    std::to_string(panel.periods()));

    const bool oracle = policy_name == "oracle";
    const Policy policy = oracle ? Policy() : make_policy(policy_name);

    StrategyLedger ledger;
    ledger.policy = policy_name;
    ledger.oracle_policy = oracle;

    std::vector<int> oracle_u;
    for (Eigen::Index row = first; row <= panel.periods(); ++row) {
        ReturnsPanel prefix = panel;
        prefix.y = panel.y.head(row);
        prefix.X = panel.X.topRows(row);
        prefix.Z = panel.Z.topRows(row);
        prefix.time = panel.time.head(row);
        const RegressionFit fit = fit_panel(prefix);

        const Eigen::Index k = row - 1; // x from the previous period
        ledger.period.push_back(static_cast<int>(row));
        ledger.d.push_back(panel.y(k) - panel.X.row(k - 1).dot(fit.benchmark_delta));
        ledger.payoff.push_back(panel.y(k) - panel.X.row(k).dot(fit.benchmark_delta));
        oracle_u.push_back(panel.Z.row(k).dot(fit.hedge_gamma_restricted) +
                                       fit.residuals(k) >
                                   0.0
                               ? 1
                               : 0);
    }

    const std::size_t steps = ledger.d.size() - 1;
    ledger.u.resize(steps);
    for (std::size_t j = 0; j < steps; ++j) {
        if (oracle) {
            ledger.u[j] = oracle_u[j + 1];
        } else {
            PolicyView view(ledger.d, j + 1);
            ledger.u[j] = policy(view);
        }
    }
    ledger.dbar = snell_transform(ledger.d, ledger.u);
    return ledger;
}

} // namespace alphalab
