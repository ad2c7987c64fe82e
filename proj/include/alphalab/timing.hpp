#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

namespace alphalab {

// Outcome of the spectral market-timing test on A = Z^T (2I - P_X) Z.
struct TimingVerdict {
    Eigen::VectorXd eigenvalues; // sorted by descending |value|
    double statistic = 0.0;      // max |eigenvalue|
    double eta = 0.0;
    bool reject_null = false;          // true = timing ability detected
    std::optional<double> power;       // P(largest root > eta) under a Wishart
};

// A = Z^T (2I - P_X) Z, symmetrized as (A + A^T)/2 after assembly.
Eigen::MatrixXd spectral_matrix(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z);

// Rejects when max_k |lambda_k(A)| exceeds eta.
TimingVerdict spectral_test(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z, double eta);

struct SupTimingResult {
    double value = 0.0;     // || z_mean^T (Z^T Z)^-1 Z^T ||^2
    double threshold = 0.0; // 2^-level
    bool satisfied = false;
    int level = 0;
    // Same statistic computed on each leading block Z_{1..j} (j from
    // first_valid_index, where the block first has full column rank), so
    // a caller can take the sup across horizons.
    Eigen::VectorXd per_period;
    int first_valid_index = 0;
};

// Timing criterion: squared norm of z_mean^T (Z^T Z)^-1 Z^T against the
// dyadic threshold 2^-level.
SupTimingResult sup_timing_criterion(const Eigen::MatrixXd& Z,
                                     const Eigen::VectorXd& z_next_mean, int level);

} // namespace alphalab
