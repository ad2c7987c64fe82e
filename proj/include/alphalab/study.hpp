#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace alphalab {

// Cross-section of fund alphas: `trials` draws of N pairwise-correlated
// alphas around a common mean, unit variances.
struct FundPanel {
    int funds = 0;
    Eigen::MatrixXd correlation; // N x N, unit diagonal, |off-diag| < 1, PSD
    Eigen::VectorXd mean;        // per-fund mean profile
    Eigen::MatrixXd alphas;      // trials x N
    std::uint64_t seed = 0;
};

Eigen::MatrixXd equicorrelation_matrix(int funds, double rho);

// Validates the correlation matrix (symmetry, unit diagonal, strict
// |rho| < 1 off-diagonal, positive semidefiniteness) and draws the panel
// as mean + L z with L the Cholesky factor, one substream per trial.
FundPanel sample_fund_panel(const Eigen::MatrixXd& correlation, const Eigen::VectorXd& mean,
                            int trials, std::uint64_t seed, unsigned threads = 0);

struct CrossFundStats {
    double mean_of_means = 0.0;      // average over trials of the N-fund mean
    double variance_formula = 0.0;   // N^-2 (sum var + 2 sum_{i<j} cov)
    double empirical_variance = 0.0; // across trials, of the N-fund mean
    double covariance_sum = 0.0;     // sum_{i<j} cov
    double covariance_bound = 0.0;   // binom(N, 2)
    bool bound_holds = false;        // |covariance_sum| <= bound
};

CrossFundStats cross_fund_stats(const FundPanel& panel);

// Variance of the cross-fund mean straight from the declared correlation
// structure (unit variances).
double variance_of_mean(const Eigen::MatrixXd& correlation);

struct TStatistics {
    Eigen::VectorXd t;          // per trial: mean / sigma_mean (declared variance)
    Eigen::VectorXd comparator; // per trial: mean / sqrt(1/N + 1)
    double sigma_mean = 0.0;
    bool comparator_consistent = false; // |comparator| <= |t| on every trial
};

TStatistics t_statistics(const FundPanel& panel);

struct FalseNegativeReport {
    double x = 0.0;
    int funds = 0;
    double rho = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
    double t_star = 0.0;             // evaluation time of the mean profile
    double significance = 0.05;      // two-sided, normal critical values
    double mean_alpha_profile = 0.0; // -x / (1 - t_star)
    double false_negative_fraction = 0.0;
    double reject_rate = 0.0;
    double mean_t = 0.0;
    double mean_stopped_alpha = 0.0;
    double positive_stopped_fraction = 0.0;
    CrossFundStats stats;
    // filled only when requested (per-trial CSV export)
    std::vector<double> per_trial_t;
    std::vector<double> per_trial_stopped;
    std::vector<int> per_trial_reject;
};

// Per trial: draw N correlated fund alphas around the conditional-mean
// profile at t_star, run the two-sided t-test, and sample one excursion
// alpha stopped at its midpoint. A false negative is a trial where the
// test fails to reject while the stopped alpha is positive. The alpha
// and excursion substreams depend only on (seed, trial), so sweeps over
// rho with a fixed seed are pairwise coupled.
FalseNegativeReport false_negative_experiment(double x, int funds, double rho, int trials,
                                              std::uint64_t seed, double t_star = 0.5,
                                              double significance = 0.05,
                                              int excursion_level = 8,
                                              unsigned threads = 0,
                                              bool keep_per_trial = false);

} // namespace alphalab
