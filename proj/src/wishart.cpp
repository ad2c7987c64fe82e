#include "alphalab/wishart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "alphalab/parallel.hpp"
#include "alphalab/rng.hpp"
#include "alphalab/zonal.hpp"

namespace alphalab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Coefficient tables are eigenvalue-independent; share one grown-on-demand
// instance across calls (a table built for larger order/parts serves any
// smaller request, extra partitions evaluate to zero on short spectra).
std::shared_ptr<const ZonalTable> shared_zonal_table(int order, int parts) {
    static std::mutex mutex;
    static std::shared_ptr<const ZonalTable> table;
    std::lock_guard<std::mutex> lock(mutex);
    if (!table || table->max_order() < order || table->max_parts() < parts)
        table = std::make_shared<const ZonalTable>(std::max(order, table ? table->max_order() : 0),
                                                   std::max(parts, table ? table->max_parts() : 1));
    return table;
}

double log_sum_exp(const std::vector<double>& logs) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : logs) hi = std::max(hi, v);
    if (!std::isfinite(hi)) return hi;
    double sum = 0.0;
    for (double v : logs) sum += std::exp(v - hi);
    return hi + std::log(sum);
}

} // namespace

WishartSpec WishartSpec::identity(int dof, int dim) {
    WishartSpec spec;
    spec.dof = dof;
    spec.dim = dim;
    spec.sigma = Eigen::MatrixXd::Identity(dim, dim);
    return spec;
}

void validate_spec(const WishartSpec& spec) {
    if (spec.dim < 1 || spec.dim > 6)
        throw std::invalid_argument("wishart: dimension must be in [1, 6], got " +
                                    std::to_string(spec.dim));
    if (spec.dof < spec.dim)
        throw std::invalid_argument("wishart: need dof >= dim, got dof=" +
                                    std::to_string(spec.dof) + " dim=" +
                                    std::to_string(spec.dim));
    if (spec.sigma.rows() != spec.dim || spec.sigma.cols() != spec.dim)
        throw std::invalid_argument("wishart: sigma must be dim x dim");
    if ((spec.sigma - spec.sigma.transpose()).cwiseAbs().maxCoeff() >
        1e-10 * std::max(1.0, spec.sigma.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("wishart: sigma must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(spec.sigma);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("wishart: sigma is not positive definite");
}

double log_multivariate_gamma(double a, int dim) {
    if (dim < 1)
        throw std::invalid_argument("log_multivariate_gamma: dim must be >= 1");
    if (!(a > 0.5 * (dim - 1)))
        throw std::domain_error("log_multivariate_gamma: a = " + std::to_string(a) +
                                " is at or below the pole (dim-1)/2 = " +
                                std::to_string(0.5 * (dim - 1)));
    double result = 0.25 * dim * (dim - 1) * std::log(kPi);
    for (int i = 1; i <= dim; ++i) result += std::lgamma(a - 0.5 * (i - 1));
    return result;
}

double multivariate_gamma(double a, int dim) { return std::exp(log_multivariate_gamma(a, dim)); }

SeriesResult matrix_hypergeometric_1f1(double a, double b, const Eigen::MatrixXd& arg,
                                       int truncation) {
    if (truncation < 1)
        throw std::invalid_argument("matrix_hypergeometric_1f1: truncation must be >= 1");
    if (arg.rows() != arg.cols())
        throw std::invalid_argument("matrix_hypergeometric_1f1: argument must be square");
    const double scale_ref = std::max(1.0, arg.cwiseAbs().maxCoeff());
    if ((arg - arg.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale_ref)
        throw std::invalid_argument("matrix_hypergeometric_1f1: argument must be symmetric");
    const int p = static_cast<int>(arg.rows());
    if (p > 6)
        throw std::invalid_argument(
            "matrix_hypergeometric_1f1: dimensions above 6 are not supported");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(arg);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("matrix_hypergeometric_1f1: eigensolver failed");
    const Eigen::VectorXd eigs = solver.eigenvalues();

    SeriesResult result;
    result.value = 1.0; // k = 0 term
    result.orders = 0;

    const double spread = eigs.cwiseAbs().maxCoeff();
    if (spread == 0.0) {
        result.last_term = 0.0;
        return result;
    }
    const Eigen::VectorXd scaled = eigs / spread;
    const double log_spread = std::log(spread);

    const auto table_ptr = shared_zonal_table(truncation, p);
    const ZonalTable& table = *table_ptr;
    int growth_streak = 0;
    double prev_mag = 0.0;
    for (int k = 1; k <= truncation; ++k) {
        const auto& parts = table.partitions(k);
        const auto zvals = table.values(k, scaled);
        const double order_factor = std::exp(k * log_spread - std::lgamma(k + 1.0));
        double term = 0.0;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const double denom = pochhammer_partition(b, parts[i]);
            if (denom == 0.0)
                throw std::domain_error(
                    "matrix_hypergeometric_1f1: b = " + std::to_string(b) +
                    " hits a pole of the partition rising factorial");
            term += pochhammer_partition(a, parts[i]) / denom * zvals[i] * order_factor;
        }
        result.value += term;
        result.orders = k;
        result.last_term = std::fabs(term);

        if (k > 1 && result.last_term > prev_mag) {
            if (++growth_streak >= 3) {
                result.diverged = true;
                break;
            }
        } else {
            growth_streak = 0;
        }
        prev_mag = result.last_term;
    }
    return result;
}

LargestRootCdf largest_root_cdf(const WishartSpec& spec, double eta, int truncation) {
    validate_spec(spec);
    if (!(eta > 0.0))
        throw std::invalid_argument("largest_root_cdf: eta must be positive, got " +
                                    std::to_string(eta));
    if (truncation < 1)
        throw std::invalid_argument("largest_root_cdf: truncation must be >= 1");

    const int p = spec.dim;
    const double n = static_cast<double>(spec.dof);

    // R = (n eta / 2) Sigma^-1, symmetric positive definite.
    Eigen::LLT<Eigen::MatrixXd> llt(spec.sigma);
    Eigen::MatrixXd sigma_inv = llt.solve(Eigen::MatrixXd::Identity(p, p));
    Eigen::MatrixXd R = 0.5 * n * eta * (0.5 * (sigma_inv + sigma_inv.transpose()));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(R);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("largest_root_cdf: eigensolver failed");
    const Eigen::VectorXd eigs = solver.eigenvalues();
    const double trace_r = eigs.sum();
    double log_det_r = 0.0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) log_det_r += std::log(eigs(i));

    const double log_pre = log_multivariate_gamma(0.5 * (p + 1), p) -
                           log_multivariate_gamma(0.5 * (n + p + 1), p) +
                           0.5 * n * log_det_r;

    // Kummer transform: 1F1(n/2; b; -R) = etr(-R) 1F1(b - n/2; b; R) with
    // b = (n+p+1)/2, so every series term is positive and the series is
    // dominated order by order by (tr R)^k / k!.
    const double a = 0.5 * (p + 1);       // b - n/2
    const double b = 0.5 * (n + p + 1);

    const double spread = eigs.maxCoeff();
    const Eigen::VectorXd scaled = eigs / spread;
    const double log_spread = std::log(spread);

    const auto table_ptr = shared_zonal_table(truncation, p);
    const ZonalTable& table = *table_ptr;
    std::vector<double> order_logs;
    order_logs.reserve(static_cast<std::size_t>(truncation) + 1);
    order_logs.push_back(0.0); // k = 0
    for (int k = 1; k <= truncation; ++k) {
        const auto& parts = table.partitions(k);
        const auto zvals = table.values(k, scaled);
        std::vector<double> term_logs;
        term_logs.reserve(parts.size());
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (zvals[i] <= 0.0) continue; // zero zonal value (more parts than eigs)
            term_logs.push_back(log_pochhammer_partition(a, parts[i]) -
                                log_pochhammer_partition(b, parts[i]) + std::log(zvals[i]) +
                                k * log_spread - std::lgamma(k + 1.0));
        }
        order_logs.push_back(term_logs.empty()
                                 ? -std::numeric_limits<double>::infinity()
                                 : log_sum_exp(term_logs));
    }
    const double log_series = log_sum_exp(order_logs);

    LargestRootCdf out;
    out.orders = truncation;
    const double log_cdf = log_pre - trace_r + log_series;
    out.value = std::clamp(std::exp(log_cdf), 0.0, 1.0);

    // Tail bound: dropped orders contribute at most
    // exp(log_pre - tr R) * sum_{k > K} (tr R)^k / k!.
    const double log_outer = log_pre - trace_r;
    double tail = 0.0;
    const double log_tr = std::log(trace_r);
    double last_log = -std::numeric_limits<double>::infinity();
    for (int k = truncation + 1; k <= truncation + 400; ++k) {
        last_log = log_outer + k * log_tr - std::lgamma(k + 1.0);
        tail += std::exp(last_log);
    }
    const double ratio = trace_r / static_cast<double>(truncation + 401);
    if (ratio < 1.0) tail += std::exp(last_log) * ratio / (1.0 - ratio);
    out.truncation_error = tail;
    out.degraded = !(tail < 1e-6);
    return out;
}

std::vector<double> sample_normalized_roots(const WishartSpec& spec, int trials,
                                            std::uint64_t seed, unsigned threads) {
    validate_spec(spec);
    if (trials < 1)
        throw std::invalid_argument("sample_normalized_roots: trials must be >= 1");

    const int p = spec.dim;
    const double n = static_cast<double>(spec.dof);
    const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(spec.sigma).matrixL();

    std::vector<double> roots(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), threads,
                 [&](std::size_t begin, std::size_t end) {
                     Eigen::MatrixXd bartlett(p, p);
                     for (std::size_t trial = begin; trial < end; ++trial) {
                         Rng rng = Rng::substream(seed, trial);
                         bartlett.setZero();
                         for (int i = 0; i < p; ++i) {
                             bartlett(i, i) = std::sqrt(rng.chi_square(n - i));
                             for (int j = 0; j < i; ++j) bartlett(i, j) = rng.normal();
                         }
                         const Eigen::MatrixXd factor = chol * bartlett;
                         double root;
                         if (p == 1) {
                             root = factor(0, 0) * factor(0, 0);
                         } else {
                             Eigen::MatrixXd w = factor * factor.transpose();
                             Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
                             root = es.eigenvalues().maxCoeff();
                         }
                         roots[trial] = root / n;
                     }
                 });
    return roots;
}

EmpiricalCdfTable empirical_largest_root_cdf(const WishartSpec& spec, int trials,
                                             std::uint64_t seed,
                                             const std::vector<double>& etas,
                                             unsigned threads) {
    auto roots = sample_normalized_roots(spec, trials, seed, threads);
    std::sort(roots.begin(), roots.end());
    EmpiricalCdfTable table;
    table.eta = etas;
    table.trials = trials;
    table.seed = seed;
    table.probability.reserve(etas.size());
    for (double eta : etas) {
        const auto it = std::upper_bound(roots.begin(), roots.end(), eta);
        table.probability.push_back(static_cast<double>(it - roots.begin()) /
                                    static_cast<double>(trials));
    }
    return table;
}

double largest_root_quantile(const WishartSpec& spec, double q, int trials,
                             std::uint64_t seed, unsigned threads) {
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("largest_root_quantile: q must be in (0, 1)");
    auto roots = sample_normalized_roots(spec, trials, seed, threads);
    const auto k = static_cast<std::size_t>(q * static_cast<double>(roots.size() - 1));
    std::nth_element(roots.begin(), roots.begin() + static_cast<std::ptrdiff_t>(k),
                     roots.end());
    return roots[k];
}

} // namespace alphalab
