#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace alphalab {

// Seeded collection of simulated paths on the uniform grid of [0, 1]
// with 2^level steps. Deterministic for fixed (seed, scheme, grid).
struct PathEnsemble {
    int level = 0;
    double dt = 0.0;
    Eigen::VectorXd grid;  // 2^level + 1 points, 0..1
    Eigen::MatrixXd paths; // trials x (2^level + 1)
    std::uint64_t seed = 0;
    std::string scheme;
    double initial_value = 0.0;
    bool pinned_final_step = false; // last step jumps to the pinned target

    Eigen::Index trials() const { return paths.rows(); }
    Eigen::Index points() const { return paths.cols(); }
};

// Euler-Maruyama on d a = (target - a)/(1 - t) dt + diffusion dB, pinned:
// the final step is forced to the target and flagged. Scheme "bridge".
PathEnsemble simulate_bridge(double x0, double target, int level, int trials,
                             std::uint64_t seed, double diffusion = 1.0,
                             unsigned threads = 0);

// Euler-Maruyama on d a = hurdle/(1 - t) dt - diffusion dB (constant
// numerator, no pinning; diverges logarithmically towards t = 1).
// Scheme "const-drift".
PathEnsemble simulate_const_drift(double x0, double hurdle, int level, int trials,
                                  std::uint64_t seed, double diffusion = 1.0,
                                  unsigned threads = 0);

// Driftless Brownian motion from x0. Scheme "bm".
PathEnsemble simulate_brownian(double x0, int level, int trials, std::uint64_t seed,
                               unsigned threads = 0);

// Hedge sensitivity paths driven by a pinned bridge: the driver beta runs
// from x to 0; component i moves by -s_i(t) * d beta with s(t) the row
// sums of (Z_t^T Z_t)^-1 Z_t^T. With a single all-ones hedge column the
// component equals the negated driver path exactly (shared noise).
struct StrategyPaths {
    std::vector<PathEnsemble> components; // one per hedge factor
    PathEnsemble driver;                  // the pinned bridge from x to 0
    Eigen::MatrixXd loadings;             // steps x p, s_i(t_k) per step
};

// hedge_path: one matrix (constant hedge design) or one per time step.
StrategyPaths strategy_sde(double x, const std::vector<Eigen::MatrixXd>& hedge_path,
                           int level, int trials, std::uint64_t seed,
                           unsigned threads = 0);

enum class Innovations { gaussian, rademacher, uniform, zero };

Innovations innovations_from_string(const std::string& name);
std::string to_string(Innovations kind);

// Donsker-style interpolated random walk on the dyadic grid: with
// N = 2^level innovations, values at grid points are S_j / sqrt(N), so
// grid increments have second moment c * 2^-level with c the innovation
// variance. c_hat is the empirical estimate of that scale.
struct SubordinatedResult {
    int level = 0;
    Innovations kind = Innovations::gaussian;
    std::uint64_t seed = 0;
    long trials = 0;
    double c_hat = 0.0;
    double c_hat_se = 0.0;
    double increment_mean = 0.0;
    double increment_mean_se = 0.0;
    std::optional<Eigen::MatrixXd> increments; // trials x 2^level when kept
};

SubordinatedResult subordinated_bm(int level, Innovations kind, int trials,
                                   std::uint64_t seed, bool keep_increments = false,
                                   unsigned threads = 0);

// Exponential path weight
//   exp( sum f(t_k) dB_k - c * sum f(t_k)^2 dt ),  f(s) = x / (1 - s),
// left-endpoint sums over t_{k+1} <= T. c = 1 reproduces the printed
// form; c = 1/2 (half_corrected) is the unit-mean martingale weight.
Eigen::VectorXd girsanov_weights(const PathEnsemble& brownian, double x, double T,
                                 bool half_corrected);

// Nonnegative excursion rescaled to [0, 1] from the Brownian path between
// the last grid zero-crossing before t = 1 and the first one after.
struct ExcursionPath {
    double tau_minus = 0.0;
    double tau_plus = 0.0;
    int retries = 0;
    Eigen::VectorXd values; // on the ensemble grid, endpoints forced to 0
};

struct ExcursionEnsemble {
    int level = 0;
    std::uint64_t seed = 0;
    double horizon = 0.0;
    Eigen::VectorXd grid;
    std::vector<ExcursionPath> paths;
    long total_retries = 0;
};

ExcursionEnsemble vervaat_excursion(int level, int trials, std::uint64_t seed,
                                    double horizon = 3.0, int max_retries = 1000,
                                    unsigned threads = 0);

// Excursion value at interior time u only (streaming; used by the
// cross-fund study at scale).
std::vector<double> vervaat_values_at(int level, int trials, std::uint64_t seed, double u,
                                      double horizon = 3.0, int max_retries = 1000,
                                      unsigned threads = 0);

// Deterministic conditional-mean profile -x / (1 - t) with unit variance
// tag; grid must lie in [0, 1).
struct AlphaProfile {
    Eigen::VectorXd mean;
    double variance = 1.0;
};

AlphaProfile expected_alpha_profile(double x, const Eigen::VectorXd& grid);

// Quadratic-variation clock of the bridge-drift integrator
// M_t = int_0^t dB_s / (1 - s):  <M>_t = int_0^t ds / (1 - s)^2
// = t / (1 - t). Diagnostic only; grid must lie in [0, 1).
Eigen::VectorXd quadratic_variation_clock(const Eigen::VectorXd& grid);

} // namespace alphalab
