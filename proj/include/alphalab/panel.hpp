#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace alphalab {

// Time-indexed portfolio returns y with benchmark returns X and hedge
// factor returns Z on a dyadic grid t_j = j * 2^-n. Returns are simple
// per-period fractions. Treated as immutable after construction.
struct ReturnsPanel {
    Eigen::VectorXd time; // dyadic grid points, strictly increasing
    Eigen::VectorXd y;    // portfolio returns, length J
    Eigen::MatrixXd X;    // J x m benchmark returns
    Eigen::MatrixXd Z;    // J x p hedge factor returns
    int level = 0;        // dyadic level n (grid spacing 2^-n)
    bool grid_reindexed = false;

    std::vector<std::string> benchmark_names; // x1..xm (for error messages)
    std::vector<std::string> hedge_names;     // z1..zp

    Eigen::Index periods() const { return y.size(); }
    Eigen::Index benchmark_count() const { return X.cols(); }
    Eigen::Index hedge_count() const { return Z.cols(); }
};

// Checks shared row counts, finiteness of every entry, strictly
// increasing dyadic grid consistent with panel.level. Throws
// std::invalid_argument with the offending location.
void validate_panel(const ReturnsPanel& panel);

// Convenience builder for tests and the simulators: grid j * 2^-level
// for j = 1..J, names x1.., z1.., validated.
ReturnsPanel make_panel(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                        const Eigen::MatrixXd& Z, int level);

// Sample cross-moment X^T Z / J. The model assumes this drifts to zero
// at scale; it is reported as a diagnostic, never enforced.
Eigen::MatrixXd cross_moment(const ReturnsPanel& panel);

} // namespace alphalab
