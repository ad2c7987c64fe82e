#include "alphalab/study.hpp"

#include <cmath>
#include <stdexcept>

#include "alphalab/dynamics.hpp"
#include "alphalab/parallel.hpp"
#include "alphalab/rng.hpp"
#include "alphalab/special.hpp"

namespace alphalab {

namespace {

void validate_correlation(const Eigen::MatrixXd& corr) {
    const Eigen::Index n = corr.rows();
    if (n < 2 || corr.cols() != n)
        throw std::invalid_argument("fund panel: correlation matrix must be square with N >= 2");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::fabs(corr(i, i) - 1.0) > 1e-12)
            throw std::invalid_argument("fund panel: correlation diagonal must be 1");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::fabs(corr(i, j) - corr(j, i)) > 1e-12)
                throw std::invalid_argument("fund panel: correlation matrix must be symmetric");
            if (i != j && !(std::fabs(corr(i, j)) < 1.0))
                throw std::invalid_argument(
                    "fund panel: off-diagonal correlations must satisfy |rho| < 1");
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < -1e-10)
        throw std::invalid_argument("fund panel: correlation matrix is not positive semidefinite");
}

Eigen::MatrixXd correlation_cholesky(const Eigen::MatrixXd& corr) {
    // LDLT tolerates the semidefinite boundary better than LLT.
    Eigen::LDLT<Eigen::MatrixXd> ldlt(corr);
    if (ldlt.info() != Eigen::Success)
        throw std::invalid_argument("fund panel: correlation factorization failed");
    Eigen::VectorXd d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
    return ldlt.transpositionsP().transpose() *
           (Eigen::MatrixXd(ldlt.matrixL()) * d.asDiagonal());
}

} // namespace

Eigen::MatrixXd equicorrelation_matrix(int funds, double rho) {
    if (funds < 2) throw std::invalid_argument("equicorrelation_matrix: need N >= 2");
    if (!(rho > -1.0 / (funds - 1) - 1e-12) || !(rho < 1.0))
        throw std::invalid_argument("equicorrelation_matrix: rho = " + std::to_string(rho) +
                                    " outside (-1/(N-1), 1) for N = " + std::to_string(funds));
    Eigen::MatrixXd corr = Eigen::MatrixXd::Constant(funds, funds, rho);
    corr.diagonal().setOnes();
    return corr;
}

FundPanel sample_fund_panel(const Eigen::MatrixXd& correlation, const Eigen::VectorXd& mean,
                            int trials, std::uint64_t seed, unsigned threads) {
    validate_correlation(correlation);
    if (mean.size() != correlation.rows())
        throw std::invalid_argument("fund panel: mean profile length " +
                                    std::to_string(mean.size()) + " does not match N = " +
                                    std::to_string(correlation.rows()));
    if (trials < 1) throw std::invalid_argument("fund panel: trials must be >= 1");

    const Eigen::Index n = correlation.rows();
    const Eigen::MatrixXd chol = correlation_cholesky(correlation);

    FundPanel panel;
    panel.funds = static_cast<int>(n);
    panel.correlation = correlation;
    panel.mean = mean;
    panel.seed = seed;
    panel.alphas.resize(trials, n);

    parallel_for(static_cast<std::size_t>(trials), threads,
                 [&](std::size_t begin, std::size_t end) {
                     Eigen::VectorXd z(n);
                     for (std::size_t trial = begin; trial < end; ++trial) {
                         Rng rng = Rng::substream(seed, trial);
                         for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
                         panel.alphas.row(static_cast<Eigen::Index>(trial)) =
                             (mean + chol * z).transpose();
                     }
                 });
    return panel;
}

double variance_of_mean(const Eigen::MatrixXd& correlation) {
    const Eigen::Index n = correlation.rows();
    double cov_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) cov_sum += correlation(i, j);
    const double nn = static_cast<double>(n);
    return (nn + 2.0 * cov_sum) / (nn * nn);
}

CrossFundStats cross_fund_stats(const FundPanel& panel) {
    if (panel.funds < 2) throw std::invalid_argument("cross_fund_stats: need N >= 2");
    validate_correlation(panel.correlation);

    CrossFundStats stats;
    const Eigen::Index n = panel.correlation.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) stats.covariance_sum += panel.correlation(i, j);
    stats.covariance_bound = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    stats.bound_holds = std::fabs(stats.covariance_sum) <= stats.covariance_bound;
    stats.variance_formula = variance_of_mean(panel.correlation);

    const Eigen::VectorXd trial_means = panel.alphas.rowwise().mean();
    stats.mean_of_means = trial_means.mean();
    stats.empirical_variance =
        (trial_means.array() - stats.mean_of_means).square().sum() /
        std::max<double>(1.0, static_cast<double>(trial_means.size()) - 1.0);
    return stats;
}

TStatistics t_statistics(const FundPanel& panel) {
    const double var = variance_of_mean(panel.correlation);
    if (!(var > 0.0))
        throw std::invalid_argument("t_statistics: degenerate zero-variance panel");
    TStatistics out;
    out.sigma_mean = std::sqrt(var);
    const Eigen::VectorXd trial_means = panel.alphas.rowwise().mean();
    out.t = trial_means / out.sigma_mean;
    const double denom = std::sqrt(1.0 / static_cast<double>(panel.funds) + 1.0);
    out.comparator = trial_means / denom;
    out.comparator_consistent = true;
    for (Eigen::Index i = 0; i < out.t.size(); ++i)
        if (std::fabs(out.comparator(i)) > std::fabs(out.t(i)) + 1e-12) {
            out.comparator_consistent = false;
            break;
        }
    return out;
}

FalseNegativeReport false_negative_experiment(double x, int funds, double rho, int trials,
                                              std::uint64_t seed, double t_star,
                                              double significance, int excursion_level,
                                              unsigned threads, bool keep_per_trial) {
    if (!(x >= 0.0)) throw std::invalid_argument("false_negative_experiment: x must be >= 0");
    if (!(t_star >= 0.0 && t_star < 1.0))
        throw std::invalid_argument("false_negative_experiment: t_star must be in [0, 1)");
    if (!(significance > 0.0 && significance < 1.0))
        throw std::invalid_argument("false_negative_experiment: significance must be in (0, 1)");

    Eigen::VectorXd grid(1);
    grid(0) = t_star;
    const AlphaProfile profile = expected_alpha_profile(x, grid);
    const Eigen::VectorXd mean = Eigen::VectorXd::Constant(funds, profile.mean(0));

    const Eigen::MatrixXd corr = equicorrelation_matrix(funds, rho);
    const FundPanel panel = sample_fund_panel(corr, mean, trials, seed, threads);
    const TStatistics tstats = t_statistics(panel);

    // Excursion substream is keyed off (seed, trial) only, so sweeps over
    // rho with the same seed reuse identical stopped-alpha draws.
    const std::vector<double> stopped =
        vervaat_values_at(excursion_level, trials, seed + 0x5741A5ULL, 0.5, 3.0, 1000, threads);

    const double critical = normal_quantile(1.0 - 0.5 * significance);
    long false_negatives = 0, rejects = 0, positives = 0;
    double sum_t = 0.0, sum_stopped = 0.0;
    FalseNegativeReport report;
    if (keep_per_trial) {
        report.per_trial_t.reserve(static_cast<std::size_t>(trials));
        report.per_trial_stopped.reserve(static_cast<std::size_t>(trials));
        report.per_trial_reject.reserve(static_cast<std::size_t>(trials));
    }
    for (int trial = 0; trial < trials; ++trial) {
        const double t = tstats.t(trial);
        const bool reject = std::fabs(t) > critical;
        const bool positive_alpha = stopped[static_cast<std::size_t>(trial)] > 0.0;
        if (reject) ++rejects;
        if (positive_alpha) ++positives;
        if (!reject && positive_alpha) ++false_negatives;
        sum_t += t;
        sum_stopped += stopped[static_cast<std::size_t>(trial)];
        if (keep_per_trial) {
            report.per_trial_t.push_back(t);
            report.per_trial_stopped.push_back(stopped[static_cast<std::size_t>(trial)]);
            report.per_trial_reject.push_back(reject ? 1 : 0);
        }
    }

    report.x = x;
    report.funds = funds;
    report.rho = rho;
    report.trials = trials;
    report.seed = seed;
    report.t_star = t_star;
    report.significance = significance;
    report.mean_alpha_profile = profile.mean(0);
    const double nt = static_cast<double>(trials);
    report.false_negative_fraction = static_cast<double>(false_negatives) / nt;
    report.reject_rate = static_cast<double>(rejects) / nt;
    report.mean_t = sum_t / nt;
    report.mean_stopped_alpha = sum_stopped / nt;
    report.positive_stopped_fraction = static_cast<double>(positives) / nt;
    report.stats = cross_fund_stats(panel);
    return report;
}

} // namespace alphalab
