#include "alphalab/dynamics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "alphalab/linalg.hpp"
#include "alphalab/parallel.hpp"
#include "alphalab/rng.hpp"

namespace alphalab {

namespace {

void require_level(int level, int minimum, const char* who) {
    if (level < minimum || level > 24)
        throw std::invalid_argument(std::string(who) + ": level must be in [" +
                                    std::to_string(minimum) + ", 24], got " +
                                    std::to_string(level));
}

void require_trials(int trials, const char* who) {
    if (trials < 1)
        throw std::invalid_argument(std::string(who) + ": trials must be >= 1");
}

Eigen::VectorXd uniform_grid(int level) {
    const int steps = 1 << level;
    Eigen::VectorXd grid(steps + 1);
    for (int k = 0; k <= steps; ++k)
        grid(k) = static_cast<double>(k) / static_cast<double>(steps);
    return grid;
}

PathEnsemble make_ensemble(int level, int trials, std::uint64_t seed,
                           const std::string& scheme, double initial) {
    PathEnsemble e;
    e.level = level;
    e.dt = std::ldexp(1.0, -level);
    e.grid = uniform_grid(level);
    e.paths.resize(trials, (1 << level) + 1);
    e.seed = seed;
    e.scheme = scheme;
    e.initial_value = initial;
    return e;
}

// One pinned-bridge trajectory; shared by simulate_bridge and
// strategy_sde so coupled runs consume noise identically.
template <typename Row>
void bridge_row(Rng& rng, double x0, double target, int steps, double dt,
                double diffusion, Row&& row) {
    double value = x0;
    row(0, value);
    const double vol = diffusion * std::sqrt(dt);
    for (int k = 0; k + 1 < steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        value += (target - value) / (1.0 - t) * dt + vol * rng.normal();
        row(k + 1, value);
    }
    row(steps, target);
}

} // namespace

PathEnsemble simulate_bridge(double x0, double target, int level, int trials,
                             std::uint64_t seed, double diffusion, unsigned threads) {
    require_level(level, 6, "simulate_bridge");
    require_trials(trials, "simulate_bridge");
    PathEnsemble e = make_ensemble(level, trials, seed, "bridge", x0);
    e.pinned_final_step = true;
    const int steps = 1 << level;
    parallel_for(static_cast<std::size_t>(trials), threads,
                 [&](std::size_t begin, std::size_t end) {
                     for (std::size_t trial = begin; trial < end; ++trial) {
                         Rng rng = Rng::substream(seed, trial);
                         auto row = [&](int k, double v) {
                             e.paths(static_cast<Eigen::Index>(trial), k) = v;
                         };
                         bridge_row(rng, x0, target, steps, e.dt, diffusion, row);
                     }
                 });
    return e;
}

PathEnsemble simulate_const_drift(double x0, double hurdle, int level, int trials,
                                  std::uint64_t seed, double diffusion, unsigned threads) {
    require_level(level, 6, "simulate_const_drift");
    require_trials(trials, "simulate_const_drift");
    PathEnsemble e = make_ensemble(level, trials, seed, "const-drift", x0);
    const int steps = 1 << level;
    parallel_for(static_cast<std::size_t>(trials), threads,
                 [&](std::size_t begin, std::size_t end) {
                     for (std::size_t trial = begin; trial < end; ++trial) {
                         Rng rng = Rng::substream(seed, trial);
                         double value = x0;
                         e.paths(static_cast<Eigen::Index>(trial), 0) = value;
                         const double vol = diffusion * std::sqrt(e.dt);
                         for (int k = 0; k < steps; ++k) {
                             const double t = static_cast<double>(k) * e.dt;
                             value += hurdle / (1.0 - t) * e.dt - vol * rng.normal();
                             e.paths(static_cast<Eigen::Index>(trial), k + 1) = value;
                         }
                     }
                 });
    return e;
}

PathEnsemble simulate_brownian(double x0, int level, int trials, std::uint64_t seed,
                               unsigned threads) {
    require_level(level, 1, "simulate_brownian");
    require_trials(trials, "simulate_brownian");
    PathEnsemble e = make_ensemble(level, trials, seed, "bm", x0);
    const int steps = 1 << level;
    parallel_for(static_cast<std::size_t>(trials), threads,
                 [&](std::size_t begin, std::size_t end) {
                     for (std::size_t trial = begin; trial < end; ++trial) {
                         Rng rng = Rng::substream(seed, trial);
                         double value = x0;
                         e.paths(static_cast<Eigen::Index>(trial), 0) = value;
                         const double vol = std::sqrt(e.dt);
                         for (int k = 0; k < steps; ++k) {
                             value += vol * rng.normal();
                             e.paths(static_cast<Eigen::Index>(trial), k + 1) = value;
                         }
                     }
                 });
    return e;
}

StrategyPaths strategy_sde(double x, const std::vector<Eigen::MatrixXd>& hedge_path,
                           int level, int trials, std::uint64_t seed, unsigned threads) {
    require_level(level, 6, "strategy_sde");
    require_trials(trials, "strategy_sde");
    if (!(x >= 0.0))
        throw std::invalid_argument("strategy_sde: x must be >= 0, got " + std::to_string(x));
    const int steps = 1 << level;
    if (hedge_path.empty() ||
        (hedge_path.size() != 1 && hedge_path.size() != static_cast<std::size_t>(steps)))
        throw std::invalid_argument("strategy_sde: hedge_path must hold one matrix or one per "
                                    "step (" +
                                    std::to_string(steps) + "), got " +
                                    std::to_string(hedge_path.size()));

    const Eigen::Index p = hedge_path.front().cols();
    for (const auto& Z : hedge_path)
        if (Z.cols() != p)
            throw std::invalid_argument("strategy_sde: hedge matrices disagree on column count");

    // s(t) = row sums of (Z^T Z)^-1 Z^T = coefficients of the ones vector
    // regressed on Z; rank-checked at every step.
    Eigen::MatrixXd loadings(steps, p);
    for (int k = 0; k < steps; ++k) {
        const Eigen::MatrixXd& Z = hedge_path[hedge_path.size() == 1
                                                  ? 0
                                                  : static_cast<std::size_t>(k)];
        if (hedge_path.size() == 1 && k > 0) {
            loadings.row(k) = loadings.row(0);
            continue;
        }
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(Z.rows());
        loadings.row(k) =
            least_squares(Z, ones, "strategy_sde[t=" + std::to_string(k) + "]")
                .coefficients.transpose();
    }

    StrategyPaths result;
    result.loadings = loadings;
    result.driver = make_ensemble(level, trials, seed, "bridge", x);
    result.driver.pinned_final_step = true;
    result.components.reserve(static_cast<std::size_t>(p));
    for (Eigen::Index i = 0; i < p; ++i) {
        PathEnsemble comp = make_ensemble(level, trials, seed, "strategy", -loadings(0, i) * x);
        comp.pinned_final_step = true;
        result.components.push_back(std::move(comp));
    }

    parallel_for(static_cast<std::size_t>(trials), threads,
                 [&](std::size_t begin, std::size_t end) {
                     std::vector<double> beta(static_cast<std::size_t>(steps) + 1);
                     for (std::size_t trial = begin; trial < end; ++trial) {
                         Rng rng = Rng::substream(seed, trial);
                         auto row = [&](int k, double v) {
                             beta[static_cast<std::size_t>(k)] = v;
                         };
                         bridge_row(rng, x, 0.0, steps, result.driver.dt, 1.0, row);
                         const auto r = static_cast<Eigen::Index>(trial);
                         for (int k = 0; k <= steps; ++k)
                             result.driver.paths(r, k) = beta[static_cast<std::size_t>(k)];
                         for (Eigen::Index i = 0; i < p; ++i) {
                             double gamma = -loadings(0, i) * x;
                             result.components[static_cast<std::size_t>(i)].paths(r, 0) = gamma;
                             for (int k = 0; k < steps; ++k) {
                                 gamma -= loadings(k, i) * (beta[static_cast<std::size_t>(k) + 1] -
                                                            beta[static_cast<std::size_t>(k)]);
                                 result.components[static_cast<std::size_t>(i)].paths(r, k + 1) =
                                     gamma;
                             }
                         }
                     }
                 });
    return result;
}

Innovations innovations_from_string(const std::string& name) {
    if (name == "gaussian") return Innovations::gaussian;
    if (name == "rademacher") return Innovations::rademacher;
    if (name == "uniform") return Innovations::uniform;
    if (name == "zero") return Innovations::zero;
    throw std::invalid_argument("unknown innovations kind: " + name);
}

std::string to_string(Innovations kind) {
    switch (kind) {
        case Innovations::gaussian: return "gaussian";
        case Innovations::rademacher: return "rademacher";
        case Innovations::uniform: return "uniform";
        case Innovations::zero: return "zero";
    }
    return "unknown";
}

SubordinatedResult subordinated_bm(int level, Innovations kind, int trials,
                                   std::uint64_t seed, bool keep_increments,
                                   unsigned threads) {
    require_level(level, 4, "subordinated_bm");
    require_trials(trials, "subordinated_bm");

    const int n_cells = 1 << level;
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n_cells));
    const double sqrt3 = std::sqrt(3.0);

    SubordinatedResult result;
    result.level = level;
    result.kind = kind;
    result.seed = seed;
    result.trials = trials;
    if (keep_increments) result.increments.emplace(trials, n_cells);

    std::vector<double> sum_sq(static_cast<std::size_t>(trials));
    std::vector<double> sum_quad(static_cast<std::size_t>(trials));
    std::vector<double> sum_inc(static_cast<std::size_t>(trials));

    parallel_for(static_cast<std::size_t>(trials), threads,
                 [&](std::size_t begin, std::size_t end) {
                     for (std::size_t trial = begin; trial < end; ++trial) {
                         Rng rng = Rng::substream(seed, trial);
                         double s2 = 0.0, s4 = 0.0, s1 = 0.0;
                         double walk_prev = 0.0;
                         for (int j = 0; j < n_cells; ++j) {
                             double innovation = 0.0;
                             switch (kind) {
                                 case Innovations::gaussian: innovation = rng.normal(); break;
                                 case Innovations::rademacher:
                                     innovation = rng.rademacher();
                                     break;
                                 case Innovations::uniform:
                                     innovation = rng.uniform(-sqrt3, sqrt3);
                                     break;
                                 case Innovations::zero: innovation = 0.0; break;
                             }
                             const double walk = walk_prev + innovation;
                             const double inc = (walk - walk_prev) * inv_sqrt_n;
                             walk_prev = walk;
                             if (result.increments)
                                 (*result.increments)(static_cast<Eigen::Index>(trial), j) = inc;
                             s1 += inc;
                             const double q = inc * inc;
                             s2 += q;
                             s4 += q * q;
                         }
                         sum_inc[trial] = s1;
                         sum_sq[trial] = s2;
                         sum_quad[trial] = s4;
                     }
                 });

    const double count = static_cast<double>(trials) * n_cells;
    double total_sq = 0.0, total_quad = 0.0, total_inc = 0.0;
    for (std::size_t t = 0; t < sum_sq.size(); ++t) {
        total_sq += sum_sq[t];
        total_quad += sum_quad[t];
        total_inc += sum_inc[t];
    }
    const double mean_sq = total_sq / count;
    const double var_sq = std::max(0.0, total_quad / count - mean_sq * mean_sq);
    const double scale = static_cast<double>(n_cells); // 1 / 2^-level

    result.c_hat = mean_sq * scale;
    result.c_hat_se = scale * std::sqrt(var_sq / count);
    result.increment_mean = total_inc / count;
    const double var_inc = std::max(0.0, mean_sq - result.increment_mean * result.increment_mean);
    result.increment_mean_se = std::sqrt(var_inc / count);
    return result;
}

Eigen::VectorXd girsanov_weights(const PathEnsemble& brownian, double x, double T,
                                 bool half_corrected) {
    if (!(T > 0.0) || T >= 1.0)
        throw std::invalid_argument("girsanov_weights: require 0 < T < 1, got T = " +
                                    std::to_string(T));
    const double c = half_corrected ? 0.5 : 1.0;
    const Eigen::Index trials = brownian.trials();
    Eigen::VectorXd weights(trials);

    // Left-endpoint sums over increments with t_{k+1} <= T.
    double quad = 0.0;
    std::vector<double> f;
    Eigen::Index used = 0;
    for (Eigen::Index k = 0; k + 1 < brownian.points(); ++k) {
        if (brownian.grid(k + 1) > T + 1e-12) break;
        const double fk = x / (1.0 - brownian.grid(k));
        f.push_back(fk);
        quad += fk * fk * brownian.dt;
        ++used;
    }
    for (Eigen::Index r = 0; r < trials; ++r) {
        double stoch = 0.0;
        for (Eigen::Index k = 0; k < used; ++k)
            stoch += f[static_cast<std::size_t>(k)] *
                     (brownian.paths(r, k + 1) - brownian.paths(r, k));
        weights(r) = std::exp(stoch - c * quad);
    }
    return weights;
}

namespace {

struct RawExcursion {
    std::vector<double> walk; // B on the simulation grid, B_0 = 0
    int left_index = 0;       // grid index of tau_minus
    int right_index = 0;      // grid index of tau_plus
    int retries = 0;
};

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

// Walks B forward on the grid; a zero-crossing lives on the step
// (k, k+1) when the sign changes, B_k is exactly zero, or -- for
// same-sign endpoints -- a bridge-corrected Bernoulli says the minimum
// dipped through zero inside the cell: P = exp(-2 B_k B_{k+1} / dt).
// Without that correction the detected zeros lag the true ones by
// O(sqrt(dt)) and the excursion span is biased long. tau_minus is the
// left index of the last crossing completing at or before t = 1,
// tau_plus the right index of the first crossing starting at or after.
bool raw_excursion(Rng& rng, int level, double horizon, RawExcursion& out) {
    const int steps_unit = 1 << level;
    const int steps = static_cast<int>(std::ceil(horizon * steps_unit));
    const double dt = std::ldexp(1.0, -level);
    const double vol = std::sqrt(dt);

    out.walk.assign(static_cast<std::size_t>(steps) + 1, 0.0);
    int last_before = -1;
    int first_after = -1;
    for (int k = 0; k < steps; ++k) {
        const double b0 = out.walk[static_cast<std::size_t>(k)];
        const double b1 = b0 + vol * rng.normal();
        out.walk[static_cast<std::size_t>(k) + 1] = b1;
        const int s0 = sign_of(b0);
        const int s1 = sign_of(b1);
        bool crossing = (s0 == 0) || (s0 * s1 < 0);
        if (!crossing) {
            const double exponent = -2.0 * b0 * b1 / dt;
            if (exponent > -40.0 && rng.uniform01() < std::exp(exponent)) crossing = true;
        }
        if (!crossing) continue;
        if (k + 1 <= steps_unit) {
            last_before = k;
        } else if (first_after < 0) {
            first_after = k;
            break;
        }
    }
    if (last_before < 0 || first_after < 0) return false;
    out.left_index = last_before;
    out.right_index = first_after + 1;
    return true;
}

double interpolate(const std::vector<double>& walk, double position) {
    const auto lo = static_cast<std::size_t>(position);
    if (lo + 1 >= walk.size()) return walk.back();
    const double frac = position - static_cast<double>(lo);
    return walk[lo] * (1.0 - frac) + walk[lo + 1] * frac;
}

RawExcursion sample_excursion(std::uint64_t seed, std::size_t trial, int level,
                              double horizon, int max_retries) {
    RawExcursion raw;
    for (int retry = 0; retry <= max_retries; ++retry) {
        Rng rng = Rng::substream(seed, trial, static_cast<std::uint64_t>(retry));
        if (raw_excursion(rng, level, horizon, raw)) {
            raw.retries = retry;
            return raw;
        }
    }
    throw std::runtime_error(
        "vervaat_excursion: no zero-crossing after t=1 within horizon " +
        std::to_string(horizon) + " after " + std::to_string(max_retries + 1) +
        " attempts (trial " + std::to_string(trial) + ", seed " + std::to_string(seed) + ")");
}

} // namespace

ExcursionEnsemble vervaat_excursion(int level, int trials, std::uint64_t seed,
                                    double horizon, int max_retries, unsigned threads) {
    require_level(level, 4, "vervaat_excursion");
    require_trials(trials, "vervaat_excursion");
    if (!(horizon > 1.0))
        throw std::invalid_argument("vervaat_excursion: horizon must exceed 1");

    ExcursionEnsemble ensemble;
    ensemble.level = level;
    ensemble.seed = seed;
    ensemble.horizon = horizon;
    ensemble.grid = uniform_grid(level);
    ensemble.paths.resize(static_cast<std::size_t>(trials));

    const int points = (1 << level) + 1;
    const double dt = std::ldexp(1.0, -level);
    parallel_for(static_cast<std::size_t>(trials), threads,
                 [&](std::size_t begin, std::size_t end) {
                     for (std::size_t trial = begin; trial < end; ++trial) {
                         const RawExcursion raw =
                             sample_excursion(seed, trial, level, horizon, max_retries);
                         ExcursionPath path;
                         path.tau_minus = raw.left_index * dt;
                         path.tau_plus = raw.right_index * dt;
                         path.retries = raw.retries;
                         const double span = path.tau_plus - path.tau_minus;
                         const double scale = 1.0 / std::sqrt(span);
                         path.values.resize(points);
                         for (int i = 0; i < points; ++i) {
                             const double u = ensemble.grid(i);
                             const double position =
                                 (path.tau_minus + u * span) / dt;
                             path.values(i) = std::fabs(interpolate(raw.walk, position)) * scale;
                         }
                         path.values(0) = 0.0;
                         path.values(points - 1) = 0.0;
                         ensemble.paths[trial] = std::move(path);
                     }
                 });
    for (const auto& p : ensemble.paths) ensemble.total_retries += p.retries;
    return ensemble;
}

std::vector<double> vervaat_values_at(int level, int trials, std::uint64_t seed, double u,
                                      double horizon, int max_retries, unsigned threads) {
    require_level(level, 4, "vervaat_values_at");
    require_trials(trials, "vervaat_values_at");
    if (!(u > 0.0 && u < 1.0))
        throw std::invalid_argument("vervaat_values_at: u must be inside (0, 1)");

    const double dt = std::ldexp(1.0, -level);
    std::vector<double> values(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), threads,
                 [&](std::size_t begin, std::size_t end) {
                     for (std::size_t trial = begin; trial < end; ++trial) {
                         const RawExcursion raw =
                             sample_excursion(seed, trial, level, horizon, max_retries);
                         const double tau_minus = raw.left_index * dt;
                         const double span = raw.right_index * dt - tau_minus;
                         const double position = (tau_minus + u * span) / dt;
                         values[trial] =
                             std::fabs(interpolate(raw.walk, position)) / std::sqrt(span);
                     }
                 });
    return values;
}

Eigen::VectorXd quadratic_variation_clock(const Eigen::VectorXd& grid) {
    Eigen::VectorXd clock(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double t = grid(i);
        if (!(t >= 0.0) || t >= 1.0)
            throw std::invalid_argument("quadratic_variation_clock: grid point " +
                                        std::to_string(t) + " is outside [0, 1)");
        clock(i) = t / (1.0 - t);
    }
    return clock;
}

AlphaProfile expected_alpha_profile(double x, const Eigen::VectorXd& grid) {
    AlphaProfile profile;
    profile.mean.resize(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double t = grid(i);
        if (!(t >= 0.0) || t >= 1.0)
            throw std::invalid_argument("expected_alpha_profile: grid point " +
                                        std::to_string(t) + " is outside [0, 1)");
        profile.mean(i) = -x / (1.0 - t);
    }
    profile.variance = 1.0;
    return profile;
}

} // namespace alphalab
