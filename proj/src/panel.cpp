#include "alphalab/panel.hpp"

#include <cmath>
#include <stdexcept>

namespace alphalab {

namespace {

void require_finite(const Eigen::MatrixXd& M, const std::string& what) {
    for (Eigen::Index j = 0; j < M.cols(); ++j)
        for (Eigen::Index i = 0; i < M.rows(); ++i)
            if (!std::isfinite(M(i, j)))
                throw std::invalid_argument("panel: non-finite value in " + what + " at row " +
                                            std::to_string(i + 1) + ", column " +
                                            std::to_string(j + 1));
}

} // namespace

void validate_panel(const ReturnsPanel& panel) {
    const Eigen::Index J = panel.y.size();
    if (J == 0) throw std::invalid_argument("panel: no observations");
    if (panel.X.rows() != J || panel.Z.rows() != J || panel.time.size() != J)
        throw std::invalid_argument(
            "panel: y, X, Z and the time grid must share the row count (got y=" +
            std::to_string(J) + ", X=" + std::to_string(panel.X.rows()) + ", Z=" +
            std::to_string(panel.Z.rows()) + ", t=" + std::to_string(panel.time.size()) + ")");
    if (panel.level < 1) throw std::invalid_argument("panel: dyadic level must be >= 1");

    require_finite(panel.y, "y");
    require_finite(panel.X, "X");
    require_finite(panel.Z, "Z");
    require_finite(panel.time, "t");

    const double step = std::ldexp(1.0, -panel.level);
    for (Eigen::Index i = 0; i < J; ++i) {
        if (i > 0 && !(panel.time(i) > panel.time(i - 1)))
            throw std::invalid_argument("panel: time grid not strictly increasing at row " +
                                        std::to_string(i + 1));
        const double idx = panel.time(i) / step;
        if (std::fabs(idx - std::round(idx)) > 1e-9 * std::max(1.0, std::fabs(idx)))
            throw std::invalid_argument("panel: time " + std::to_string(panel.time(i)) +
                                        " at row " + std::to_string(i + 1) +
                                        " is not on the dyadic grid of level " +
                                        std::to_string(panel.level));
    }
}

ReturnsPanel make_panel(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                        const Eigen::MatrixXd& Z, int level) {
    ReturnsPanel panel;
    panel.y = y;
    panel.X = X;
    panel.Z = Z;
    panel.level = level;
    panel.time.resize(y.size());
    const double step = std::ldexp(1.0, -level);
    for (Eigen::Index j = 0; j < y.size(); ++j) panel.time(j) = static_cast<double>(j + 1) * step;
    for (Eigen::Index c = 0; c < X.cols(); ++c)
        panel.benchmark_names.push_back("x" + std::to_string(c + 1));
    for (Eigen::Index c = 0; c < Z.cols(); ++c)
        panel.hedge_names.push_back("z" + std::to_string(c + 1));
    validate_panel(panel);
    return panel;
}

Eigen::MatrixXd cross_moment(const ReturnsPanel& panel) {
    return panel.X.transpose() * panel.Z / static_cast<double>(panel.periods());
}

} // namespace alphalab
