#include "alphalab/linalg.hpp"

#include <stdexcept>

#include "alphalab/errors.hpp"

namespace alphalab {

namespace {

std::vector<std::string> offending_columns(const Eigen::MatrixXd& A, int rank,
                                           const std::vector<std::string>* names) {
    // Columns permuted past the numerical rank by pivoted QR are the ones
    // that are (nearly) linear combinations of the leading set.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    const auto perm = qr.colsPermutation().indices();
    std::vector<std::string> cols;
    for (Eigen::Index k = rank; k < A.cols(); ++k) {
        const int col = static_cast<int>(perm(k));
        if (names && col < static_cast<int>(names->size()))
            cols.push_back((*names)[static_cast<std::size_t>(col)]);
        else
            cols.push_back("col" + std::to_string(col));
    }
    return cols;
}

} // namespace

int numerical_rank(const Eigen::MatrixXd& A) {
    if (A.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    const double cutoff = kRankTolerance * sv(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    return rank;
}

void require_full_column_rank(const Eigen::MatrixXd& A, const std::string& context,
                              const std::vector<std::string>* column_names) {
    if (A.rows() < A.cols())
        throw RankDeficientError(context, {}, kRankTolerance, static_cast<int>(A.rows()),
                                 static_cast<int>(A.cols()));
    const int rank = numerical_rank(A);
    if (rank < A.cols())
        throw RankDeficientError(context, offending_columns(A, rank, column_names),
                                 kRankTolerance, rank, static_cast<int>(A.cols()));
}

LeastSquaresFit least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              const std::string& context,
                              const std::vector<std::string>* column_names) {
    if (A.rows() != b.size())
        throw std::invalid_argument(context + ": row count mismatch (" +
                                    std::to_string(A.rows()) + " rows vs " +
                                    std::to_string(b.size()) + " responses)");
    require_full_column_rank(A, context, column_names);
    LeastSquaresFit fit;
    fit.coefficients = A.householderQr().solve(b);
    fit.fitted = A * fit.coefficients;
    fit.residuals = b - fit.fitted;
    return fit;
}

ProjectionPair projection(const Eigen::MatrixXd& M, const std::string& context,
                          const std::vector<std::string>* column_names) {
    require_full_column_rank(M, context, column_names);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    Eigen::MatrixXd thin_q =
        qr.householderQ() * Eigen::MatrixXd::Identity(M.rows(), M.cols());
    ProjectionPair pair;
    pair.onto = thin_q * thin_q.transpose();
    pair.annihilator = Eigen::MatrixXd::Identity(M.rows(), M.rows()) - pair.onto;
    return pair;
}

} // namespace alphalab
