#pragma once

#include <Eigen/Dense>

#include "alphalab/panel.hpp"

namespace alphalab {

enum class GammaVariant { restricted, unrestricted };

struct RegressionFit {
    Eigen::VectorXd benchmark_delta;          // length m
    Eigen::VectorXd hedge_gamma_restricted;   // length p
    Eigen::VectorXd hedge_gamma_unrestricted; // length p
    Eigen::VectorXd residuals;                // joint-fit residuals, length J
    Eigen::VectorXd alpha_fitted;             // Z * gamma for the requested variant
    GammaVariant alpha_variant = GammaVariant::unrestricted;
    double residual_rms = 0.0;
    // max_j |[X Z]_j . e| / (||[X Z]_j|| * ||e||); ~0 for a healthy joint fit
    double orthogonality_residual = 0.0;
};

// Hedge sensitivity under the zero-tracking-error restriction:
//   gamma = -(Z^T Z)^-1 Z^T eps
// i.e. minus the least-squares regression of eps on Z. The hedge book is
// sized to offset the supplied residual vector.
Eigen::VectorXd restricted_gamma(const Eigen::MatrixXd& Z, const Eigen::VectorXd& eps);

// Partial-regression estimate gamma = (Z^T M_X Z)^-1 Z^T M_X y, computed
// by residualizing Z against X first; equals the gamma block of the joint
// least-squares fit of y on [X Z].
Eigen::VectorXd unrestricted_gamma(const ReturnsPanel& panel);

// Joint fit of y on [X Z]; fills both gamma variants. The restricted
// variant uses the benchmark-only residuals M_X y (the joint residuals
// are Z-orthogonal and would zero it identically).
RegressionFit fit_panel(const ReturnsPanel& panel,
                        GammaVariant alpha_variant = GammaVariant::unrestricted);

struct AugmentResult {
    ReturnsPanel panel; // J + 1 rows
    RegressionFit fit;
    Eigen::VectorXd delta_change;              // delta_{J+1} - delta_J
    Eigen::VectorXd gamma_unrestricted_change; // same, unrestricted gamma
    Eigen::VectorXd gamma_restricted_change;
};

// Appends one observation and refits from scratch (no incremental
// update), reporting the coefficient changes against the previous fit.
AugmentResult augment_panel(const ReturnsPanel& panel, double y_new,
                            const Eigen::VectorXd& x_new, const Eigen::VectorXd& z_new);

} // namespace alphalab
