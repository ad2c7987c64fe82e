#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace alphalab {

// W_p(n, Sigma) parameters for the largest-root distribution.
struct WishartSpec {
    int dof = 1;            // degrees of freedom n
    int dim = 1;            // dimension p
    Eigen::MatrixXd sigma;  // p x p symmetric positive definite scale

    static WishartSpec identity(int dof, int dim);
};

// Throws std::invalid_argument / std::domain_error on bad parameters
// (non-SPD sigma, dof < dim, dim outside [1, 6]).
void validate_spec(const WishartSpec& spec);

// log Gamma_dim(a) = dim (dim-1)/4 log pi + sum_i lgamma(a - (i-1)/2);
// domain a > (dim-1)/2.
double log_multivariate_gamma(double a, int dim);
double multivariate_gamma(double a, int dim);

struct SeriesResult {
    double value = 0.0;
    double last_term = 0.0; // |order-k term| at the truncation order
    int orders = 0;
    bool diverged = false;  // last-term magnitude grew 3 consecutive orders
};

// Confluent hypergeometric function of symmetric matrix argument,
// truncated zonal series sum_{k<=truncation} sum_{kappa | k}
// [(a)_kappa / (b)_kappa] C_kappa(arg) / k!.
SeriesResult matrix_hypergeometric_1f1(double a, double b, const Eigen::MatrixXd& arg,
                                       int truncation);

struct LargestRootCdf {
    double value = 0.0;
    double truncation_error = 0.0; // upper bound on the dropped tail
    bool degraded = false;         // truncation_error >= 1e-6
    int orders = 0;
};

// Distribution function of the normalized largest root ell_1 / n of
// A ~ W_p(n, Sigma):
//   P = Gamma_p((p+1)/2) / Gamma_p((n+p+1)/2)
//       * det(n eta Sigma^-1 / 2)^(n/2)
//       * 1F1(n/2; (n+p+1)/2; -n eta Sigma^-1 / 2).
// Evaluated through the Kummer transform (all-positive series) in log
// space; the dropped tail is bounded by a Poisson-tail argument.
LargestRootCdf largest_root_cdf(const WishartSpec& spec, double eta, int truncation = 30);

// Normalized largest roots ell_1 / n from `trials` Wishart draws
// (Bartlett construction), deterministic per (seed, trial index).
std::vector<double> sample_normalized_roots(const WishartSpec& spec, int trials,
                                            std::uint64_t seed, unsigned threads = 0);

struct EmpiricalCdfTable {
    std::vector<double> eta;
    std::vector<double> probability;
    int trials = 0;
    std::uint64_t seed = 0;
};

// Empirical CDF of the normalized largest root at the given eta grid.
EmpiricalCdfTable empirical_largest_root_cdf(const WishartSpec& spec, int trials,
                                             std::uint64_t seed,
                                             const std::vector<double>& etas,
                                             unsigned threads = 0);

// q-quantile of the normalized largest root, Monte Carlo.
double largest_root_quantile(const WishartSpec& spec, double q, int trials,
                             std::uint64_t seed, unsigned threads = 0);

} // namespace alphalab
