#include "alphalab/regression.hpp"

#include <cmath>
#include <stdexcept>

#include "alphalab/linalg.hpp"

namespace alphalab {

namespace {

std::vector<std::string> joint_names(const ReturnsPanel& panel) {
    std::vector<std::string> names = panel.benchmark_names;
    names.insert(names.end(), panel.hedge_names.begin(), panel.hedge_names.end());
    return names;
}

Eigen::MatrixXd joint_design(const ReturnsPanel& panel) {
    Eigen::MatrixXd W(panel.periods(), panel.benchmark_count() + panel.hedge_count());
    W << panel.X, panel.Z;
    return W;
}

void require_estimable(const ReturnsPanel& panel) {
    const Eigen::Index need = panel.benchmark_count() + panel.hedge_count() + 1;
    if (panel.periods() < need)
        throw std::invalid_argument("fit: need at least m + p + 1 = " + std::to_string(need) +
                                    " observations, panel has " +
                                    std::to_string(panel.periods()));
}

} // namespace

Eigen::VectorXd restricted_gamma(const Eigen::MatrixXd& Z, const Eigen::VectorXd& eps) {
    if (Z.rows() != eps.size())
        throw std::invalid_argument("restricted_gamma: Z has " + std::to_string(Z.rows()) +
                                    " rows but eps has " + std::to_string(eps.size()) +
                                    " entries");
    return -least_squares(Z, eps, "restricted_gamma").coefficients;
}

Eigen::VectorXd unrestricted_gamma(const ReturnsPanel& panel) {
    require_estimable(panel);
    const auto names = joint_names(panel);
    require_full_column_rank(joint_design(panel), "unrestricted_gamma", &names);

    // Residualize Z and y against the benchmark columns, then regress.
    const ProjectionPair px = projection(panel.X, "unrestricted_gamma[X]",
                                         &panel.benchmark_names);
    const Eigen::MatrixXd z_resid = px.annihilator * panel.Z;
    const Eigen::VectorXd y_resid = px.annihilator * panel.y;
    return least_squares(z_resid, y_resid, "unrestricted_gamma", &panel.hedge_names)
        .coefficients;
}

RegressionFit fit_panel(const ReturnsPanel& panel, GammaVariant alpha_variant) {
    require_estimable(panel);
    const Eigen::Index m = panel.benchmark_count();
    const Eigen::Index p = panel.hedge_count();

    const auto names = joint_names(panel);
    const Eigen::MatrixXd W = joint_design(panel);
    const LeastSquaresFit joint = least_squares(W, panel.y, "fit", &names);

    RegressionFit fit;
    fit.benchmark_delta = joint.coefficients.head(m);
    fit.hedge_gamma_unrestricted = joint.coefficients.tail(p);
    fit.residuals = joint.residuals;
    fit.residual_rms =
        std::sqrt(joint.residuals.squaredNorm() / static_cast<double>(panel.periods()));

    const ProjectionPair px = projection(panel.X, "fit[X]", &panel.benchmark_names);
    fit.hedge_gamma_restricted = restricted_gamma(panel.Z, px.annihilator * panel.y);

    fit.alpha_variant = alpha_variant;
    fit.alpha_fitted = panel.Z * (alpha_variant == GammaVariant::restricted
                                      ? fit.hedge_gamma_restricted
                                      : fit.hedge_gamma_unrestricted);

    const double enorm = fit.residuals.norm();
    double worst = 0.0;
    for (Eigen::Index c = 0; c < W.cols(); ++c) {
        const double cnorm = W.col(c).norm();
        if (cnorm == 0.0 || enorm == 0.0) continue;
        worst = std::max(worst, std::fabs(W.col(c).dot(fit.residuals)) / (cnorm * enorm));
    }
    fit.orthogonality_residual = worst;
    return fit;
}

AugmentResult augment_panel(const ReturnsPanel& panel, double y_new,
                            const Eigen::VectorXd& x_new, const Eigen::VectorXd& z_new) {
    if (x_new.size() != panel.benchmark_count() || z_new.size() != panel.hedge_count())
        throw std::invalid_argument(
            "augment_panel: new row has x-length " + std::to_string(x_new.size()) +
            " and z-length " + std::to_string(z_new.size()) + ", expected " +
            std::to_string(panel.benchmark_count()) + " and " +
            std::to_string(panel.hedge_count()));
    if (!std::isfinite(y_new) || !x_new.allFinite() || !z_new.allFinite())
        throw std::invalid_argument("augment_panel: new row contains non-finite values");

    const RegressionFit before = fit_panel(panel);

    const Eigen::Index J = panel.periods();
    ReturnsPanel grown = panel;
    grown.y.conservativeResize(J + 1);
    grown.y(J) = y_new;
    grown.X.conservativeResize(J + 1, Eigen::NoChange);
    grown.X.row(J) = x_new.transpose();
    grown.Z.conservativeResize(J + 1, Eigen::NoChange);
    grown.Z.row(J) = z_new.transpose();
    grown.time.conservativeResize(J + 1);
    grown.time(J) = panel.time(J - 1) + std::ldexp(1.0, -panel.level);
    validate_panel(grown);

    AugmentResult result;
    result.fit = fit_panel(grown);
    result.delta_change = result.fit.benchmark_delta - before.benchmark_delta;
    result.gamma_unrestricted_change =
        result.fit.hedge_gamma_unrestricted - before.hedge_gamma_unrestricted;
    result.gamma_restricted_change =
        result.fit.hedge_gamma_restricted - before.hedge_gamma_restricted;
    result.panel = std::move(grown);
    return result;
}

} // namespace alphalab
