#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

namespace alphalab {

// Partition of an integer, weakly decreasing positive parts.
using Partition = std::vector<int>;

// Generalized rising factorial over a partition (real case, alpha = 2):
//   (a)_kappa = prod_i prod_{j=1..kappa_i} (a - (i-1)/2 + j - 1)
// Signed direct product; zero when a factor hits zero.
double pochhammer_partition(double a, const Partition& kappa);

// Log of the same; requires every factor positive (throws otherwise).
double log_pochhammer_partition(double a, const Partition& kappa);

// Monomial coefficients of zonal polynomials, built once per
// (max_order, max_parts), eigenvalue-independent. Normalization:
//   sum over partitions kappa of k of C_kappa(Y) = (tr Y)^k.
//
// Coefficients come from the classical recurrence on monomial symmetric
// functions: with rho_kappa = sum_i kappa_i (kappa_i - i), for lambda
// strictly below kappa in dominance order,
//   c_{kappa,lambda} = sum over moves (lambda_i + t, lambda_j - t)
//                      of (lambda_i - lambda_j + 2t) c_{kappa,mu}
//                      / (rho_kappa - rho_lambda),
// seeded with c_{kappa,kappa} = 1 and rescaled to the C-normalization by
// 2^k k! / prod over cells of (leg + 2 (arm + 1)).
class ZonalTable {
public:
    ZonalTable(int max_order, int max_parts);

    int max_order() const { return max_order_; }
    int max_parts() const { return max_parts_; }

    // Partitions of `order` with at most max_parts parts, reverse-lex.
    const std::vector<Partition>& partitions(int order) const;

    // C_kappa(diag(eigs)) for every partition of `order`, in the same
    // order as partitions(order). eigs.size() may be below max_parts.
    std::vector<double> values(int order, const Eigen::VectorXd& eigs) const;

private:
    struct OrderTable {
        std::vector<Partition> parts;
        std::map<Partition, int> index;
        // coeff[kappa][lambda], dense over partitions of this order
        std::vector<std::vector<double>> coeff;
    };

    void build_order(int k);

    int max_order_;
    int max_parts_;
    std::vector<OrderTable> orders_;
};

// Monomial symmetric function m_lambda evaluated at eigs (sums each
// distinct permutation of the exponent vector once).
double monomial_symmetric(const Partition& lambda, const Eigen::VectorXd& eigs);

} // namespace alphalab
