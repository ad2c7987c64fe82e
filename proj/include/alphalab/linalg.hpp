#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace alphalab {

// Singular values below kRankTolerance x largest are treated as zero.
inline constexpr double kRankTolerance = 1e-10;

// Numerical rank; throws RankDeficientError naming the near-dependent
// columns (via the pivoted-QR permutation) when rank < columns.
int numerical_rank(const Eigen::MatrixXd& A);
void require_full_column_rank(const Eigen::MatrixXd& A, const std::string& context,
                              const std::vector<std::string>* column_names = nullptr);

struct LeastSquaresFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd fitted;
    Eigen::VectorXd residuals;
};

// Minimum-norm solution of A x ~ b through Householder QR; A must have
// full column rank (all inverse forms in this library are solved this
// way, never by explicit inversion).
LeastSquaresFit least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              const std::string& context,
                              const std::vector<std::string>* column_names = nullptr);

struct ProjectionPair {
    Eigen::MatrixXd onto;        // P = M (M^T M)^-1 M^T
    Eigen::MatrixXd annihilator; // I - P
};

// Orthogonal projector onto the column space of M and its annihilator.
ProjectionPair projection(const Eigen::MatrixXd& M, const std::string& context = "projection",
                          const std::vector<std::string>* column_names = nullptr);

} // namespace alphalab
