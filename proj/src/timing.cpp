#include "alphalab/timing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "alphalab/linalg.hpp"

namespace alphalab {

Eigen::MatrixXd spectral_matrix(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z) {
    if (X.rows() != Z.rows())
        throw std::invalid_argument("spectral_matrix: X has " + std::to_string(X.rows()) +
                                    " rows, Z has " + std::to_string(Z.rows()));
    const ProjectionPair px = projection(X, "spectral_matrix[X]");
    Eigen::MatrixXd A =
        2.0 * (Z.transpose() * Z) - Z.transpose() * (px.onto * Z);
    A = 0.5 * (A + A.transpose()).eval();
    return A;
}

TimingVerdict spectral_test(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z, double eta) {
    if (!(eta > 0.0))
        throw std::invalid_argument("spectral_test: eta must be positive, got " +
                                    std::to_string(eta));
    const Eigen::MatrixXd A = spectral_matrix(X, Z);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("spectral_test: eigenvalue decomposition failed");

    Eigen::VectorXd lambda = solver.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(lambda.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&lambda](Eigen::Index a, Eigen::Index b) {
        return std::fabs(lambda(a)) > std::fabs(lambda(b));
    });

    TimingVerdict verdict;
    verdict.eigenvalues.resize(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        verdict.eigenvalues(i) = lambda(order[static_cast<std::size_t>(i)]);
    verdict.statistic = lambda.size() ? std::fabs(verdict.eigenvalues(0)) : 0.0;
    verdict.eta = eta;
    verdict.reject_null = verdict.statistic > eta;
    return verdict;
}

SupTimingResult sup_timing_criterion(const Eigen::MatrixXd& Z,
                                     const Eigen::VectorXd& z_next_mean, int level) {
    if (level < 1)
        throw std::invalid_argument("sup_timing_criterion: dyadic level must be >= 1, got " +
                                    std::to_string(level));
    if (z_next_mean.size() != Z.cols())
        throw std::invalid_argument("sup_timing_criterion: z_next_mean has " +
                                    std::to_string(z_next_mean.size()) + " entries, Z has " +
                                    std::to_string(Z.cols()) + " columns");

    // || m^T (Z^T Z)^-1 Z^T ||^2 = g^T (Z^T Z) g with g = (Z^T Z)^-1 m.
    // Using the QR of Z: g^T Z^T Z g = ||Z g||^2 where Z g solves the
    // normal equations for m.
    auto statistic = [](const Eigen::MatrixXd& block, const Eigen::VectorXd& m) {
        require_full_column_rank(block, "sup_timing_criterion");
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(block);
        // Solve (Z^T Z) g = m through R^T R g = m.
        const Eigen::MatrixXd r_full = qr.matrixQR()
                                           .topRows(block.cols())
                                           .triangularView<Eigen::Upper>();
        const Eigen::VectorXd w =
            r_full.transpose().triangularView<Eigen::Lower>().solve(m);
        return w.squaredNorm();
    };

    SupTimingResult result;
    result.level = level;
    result.threshold = std::ldexp(1.0, -level);
    result.value = statistic(Z, z_next_mean);
    result.satisfied = result.value >= result.threshold;

    const Eigen::Index p = Z.cols();
    result.first_valid_index = static_cast<int>(p);
    result.per_period.resize(Z.rows() - p + 1);
    for (Eigen::Index j = p; j <= Z.rows(); ++j) {
        const Eigen::MatrixXd block = Z.topRows(j);
        double value = std::numeric_limits<double>::quiet_NaN();
        if (numerical_rank(block) == p) value = statistic(block, z_next_mean);
        result.per_period(j - p) = value;
    }
    return result;
}

} // namespace alphalab
