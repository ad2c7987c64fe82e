#include "alphalab/zonal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace alphalab {

namespace {

void generate_partitions(int remaining, int max_part, int max_parts, Partition& prefix,
                         std::vector<Partition>& out) {
    if (remaining == 0) {
        out.push_back(prefix);
        return;
    }
    if (max_parts == 0) return;
    for (int first = std::min(max_part, remaining); first >= 1; --first) {
        prefix.push_back(first);
        generate_partitions(remaining - first, first, max_parts - 1, prefix, out);
        prefix.pop_back();
    }
}

// kappa dominates lambda: every prefix sum of kappa is >= that of lambda.
bool dominates(const Partition& kappa, const Partition& lambda) {
    int sk = 0, sl = 0;
    const std::size_t len = std::max(kappa.size(), lambda.size());
    for (std::size_t i = 0; i < len; ++i) {
        sk += i < kappa.size() ? kappa[i] : 0;
        sl += i < lambda.size() ? lambda[i] : 0;
        if (sk < sl) return false;
    }
    return true;
}

double rho(const Partition& kappa) {
    double r = 0.0;
    for (std::size_t i = 0; i < kappa.size(); ++i)
        r += static_cast<double>(kappa[i]) * (kappa[i] - static_cast<double>(i + 1));
    return r;
}

Partition conjugate(const Partition& kappa) {
    if (kappa.empty()) return {};
    Partition conj(static_cast<std::size_t>(kappa[0]), 0);
    for (int part : kappa)
        for (int j = 0; j < part; ++j) conj[static_cast<std::size_t>(j)] += 1;
    return conj;
}

// log of 2^k k! / prod over cells (i,j) of [leg + 2 (arm + 1)], the
// factor taking the monic (P) normalization to the C-normalization.
double log_c_norm_factor(const Partition& kappa, int k) {
    const Partition conj = conjugate(kappa);
    double log_hooks = 0.0;
    for (std::size_t i = 0; i < kappa.size(); ++i) {
        for (int j = 1; j <= kappa[i]; ++j) {
            const int arm = kappa[i] - j;
            const int leg = conj[static_cast<std::size_t>(j - 1)] - static_cast<int>(i) - 1;
            log_hooks += std::log(static_cast<double>(leg + 2 * (arm + 1)));
        }
    }
    return k * std::log(2.0) + std::lgamma(k + 1.0) - log_hooks;
}

} // namespace

double pochhammer_partition(double a, const Partition& kappa) {
    double prod = 1.0;
    for (std::size_t i = 0; i < kappa.size(); ++i) {
        const double base = a - 0.5 * static_cast<double>(i);
        for (int j = 0; j < kappa[i]; ++j) prod *= base + j;
    }
    return prod;
}

double log_pochhammer_partition(double a, const Partition& kappa) {
    double sum = 0.0;
    for (std::size_t i = 0; i < kappa.size(); ++i) {
        const double base = a - 0.5 * static_cast<double>(i);
        if (!(base > 0.0))
            throw std::domain_error(
                "log_pochhammer_partition: nonpositive base factor at row " +
                std::to_string(i + 1) + " for a=" + std::to_string(a));
        sum += std::lgamma(base + kappa[i]) - std::lgamma(base);
    }
    return sum;
}

double monomial_symmetric(const Partition& lambda, const Eigen::VectorXd& eigs) {
    const std::size_t nvars = static_cast<std::size_t>(eigs.size());
    if (lambda.size() > nvars) return 0.0;

    std::vector<int> expo(nvars, 0);
    std::copy(lambda.begin(), lambda.end(), expo.begin());
    std::sort(expo.begin(), expo.end()); // ascending start for next_permutation

    double total = 0.0;
    do {
        double term = 1.0;
        for (std::size_t v = 0; v < nvars; ++v) {
            if (expo[v] == 0) continue;
            term *= std::pow(eigs(static_cast<Eigen::Index>(v)), expo[v]);
        }
        total += term;
    } while (std::next_permutation(expo.begin(), expo.end()));
    return total;
}

ZonalTable::ZonalTable(int max_order, int max_parts)
    : max_order_(max_order), max_parts_(max_parts) {
    if (max_order < 0) throw std::invalid_argument("ZonalTable: max_order must be >= 0");
    if (max_parts < 1) throw std::invalid_argument("ZonalTable: max_parts must be >= 1");
    orders_.resize(static_cast<std::size_t>(max_order) + 1);
    for (int k = 0; k <= max_order; ++k) build_order(k);
}

void ZonalTable::build_order(int k) {
    OrderTable& table = orders_[static_cast<std::size_t>(k)];
    Partition prefix;
    generate_partitions(k, k == 0 ? 1 : k, max_parts_, prefix, table.parts);
    if (k == 0) table.parts.assign(1, Partition{});
    for (std::size_t i = 0; i < table.parts.size(); ++i)
        table.index.emplace(table.parts[i], static_cast<int>(i));

    const std::size_t count = table.parts.size();
    table.coeff.assign(count, std::vector<double>(count, 0.0));

    for (std::size_t ki = 0; ki < count; ++ki) {
        const Partition& kappa = table.parts[ki];
        auto& row = table.coeff[ki];
        row[ki] = 1.0; // monic seed
        const double rho_kappa = rho(kappa);

        // Reverse-lex order is a linear extension of dominance, so every
        // mu strictly above lambda is already final when lambda is visited.
        for (std::size_t li = ki + 1; li < count; ++li) {
            const Partition& lambda = table.parts[li];
            if (!dominates(kappa, lambda)) continue;

            double acc = 0.0;
            const std::size_t len = lambda.size();
            for (std::size_t i = 0; i + 1 < len; ++i) {
                for (std::size_t j = i + 1; j < len; ++j) {
                    for (int t = 1; t <= lambda[j]; ++t) {
                        Partition mu = lambda;
                        mu[i] += t;
                        mu[j] -= t;
                        std::sort(mu.begin(), mu.end(), std::greater<int>());
                        while (!mu.empty() && mu.back() == 0) mu.pop_back();
                        const auto it = table.index.find(mu);
                        if (it == table.index.end()) continue;
                        const double c_mu = row[static_cast<std::size_t>(it->second)];
                        if (c_mu == 0.0) continue;
                        acc += static_cast<double>(lambda[i] - lambda[j] + 2 * t) * c_mu;
                    }
                }
            }
            row[li] = acc / (rho_kappa - rho(lambda));
        }

        const double scale = std::exp(log_c_norm_factor(kappa, k));
        for (auto& c : row) c *= scale;
    }
}

const std::vector<Partition>& ZonalTable::partitions(int order) const {
    if (order < 0 || order > max_order_)
        throw std::out_of_range("ZonalTable::partitions: order " + std::to_string(order) +
                                " outside table range");
    return orders_[static_cast<std::size_t>(order)].parts;
}

std::vector<double> ZonalTable::values(int order, const Eigen::VectorXd& eigs) const {
    const OrderTable& table = orders_[static_cast<std::size_t>(order)];
    const std::size_t count = table.parts.size();

    std::vector<double> monomials(count);
    for (std::size_t li = 0; li < count; ++li)
        monomials[li] = monomial_symmetric(table.parts[li], eigs);

    std::vector<double> out(count, 0.0);
    for (std::size_t ki = 0; ki < count; ++ki) {
        double v = 0.0;
        const auto& row = table.coeff[ki];
        for (std::size_t li = ki; li < count; ++li)
            if (row[li] != 0.0 && monomials[li] != 0.0) v += row[li] * monomials[li];
        out[ki] = v;
    }
    return out;
}

} // namespace alphalab
