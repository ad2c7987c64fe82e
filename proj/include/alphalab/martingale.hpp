#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace alphalab {

// Betting/trading transform of a base increment sequence:
//   dbar_k = d_1 + sum_{j=1}^{k-1} u_j d_{j+1},
// so dbar_1 = d_1 and dbar_k - dbar_{k-1} = u_{k-1} d_k.
// u entries must be exactly 0 or 1; len(u) >= len(d) - 1.
std::vector<double> snell_transform(const std::vector<double>& d, const std::vector<int>& u);

// Cumulative option-style ledger: entry k is
//   d1 + sum_{j<=k} max(0, z_j . gamma_j + eps_j),
// with entry 0 equal to d1. Nondecreasing by construction.
std::vector<double> option_ledger(const std::vector<Eigen::VectorXd>& z_rows,
                                  const std::vector<Eigen::VectorXd>& gammas,
                                  const std::vector<double>& eps, double d1 = 0.0);

// Read-only window over the strict past handed to a policy when it
// decides u_j; asking for indices at or beyond the current time throws.
class PolicyView {
public:
    PolicyView(const std::vector<double>& history, std::size_t known)
        : history_(history), known_(known) {}

    std::size_t size() const { return known_; }

    double value(std::size_t i) const {
        if (i >= known_)
            throw std::out_of_range("policy requested future data: index " + std::to_string(i) +
                                    " with only " + std::to_string(known_) +
                                    " observations revealed");
        return history_[i];
    }

private:
    const std::vector<double>& history_;
    std::size_t known_;
};

// Decides u_j in {0,1} from the revealed past d_1..d_j.
using Policy = std::function<int(const PolicyView&)>;

// Named past-measurable policies: always, never, after-loss, after-gain,
// alternate, drawdown (bet while the running sum is negative).
Policy make_policy(const std::string& name);
const std::vector<std::string>& policy_names();

enum class IncrementKind { rademacher, gaussian };

struct SnellCheck {
    int k = 0;
    double mean_dbar = 0.0;
    double mean_d = 0.0;
    double diff = 0.0;    // mean_dbar - mean_d, paired
    double diff_se = 0.0; // standard error of the paired difference
    bool holds = false;   // diff <= 3 * diff_se
};

// Monte Carlo check of E[dbar_k] <= E[d_k] for a zero-drift increment
// source and a past-measurable policy.
std::vector<SnellCheck> snell_mc_check(IncrementKind kind, const Policy& policy, int trials,
                                       int horizon, const std::vector<int>& ks,
                                       std::uint64_t seed);

// Negative control: the policy sees d_{j+1} when deciding u_j. Expected
// to violate the inequality; kept separate so the ordinary interface
// cannot leak the future.
std::vector<SnellCheck> snell_mc_check_peeking(IncrementKind kind, int trials, int horizon,
                                               const std::vector<int>& ks, std::uint64_t seed);

struct ReturnsPanel;

// Trading ledger built from a returns panel with rolling refits:
//   d_{k+1} = y_{k+1} - x_k . delta_{k+1}
// with delta refit on rows 1..k+1. Decisions come from a named
// past-measurable policy on the d-history, or from "oracle": the
// indicator of z_{k+1} . gamma^res_{k+1} + e_{k+1} > 0, which looks at
// the period being bet on and is flagged accordingly.
struct StrategyLedger {
    std::vector<int> period;     // panel row index of each d entry (1-based)
    std::vector<double> d;
    std::vector<int> u;          // one decision per step, len = d.size() - 1
    std::vector<double> dbar;
    std::vector<double> payoff;  // y_k - x_k . delta^{(k)} per entry
    std::string policy;
    bool oracle_policy = false;  // true: decisions are not past-measurable
};

StrategyLedger ledger_from_panel(const ReturnsPanel& panel, const std::string& policy_name);

} // namespace alphalab
