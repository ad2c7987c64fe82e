#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace alphalab {

// Design matrix failed the numerical full-column-rank test. Carries the
// offending column labels and the tolerance that was applied so callers
// (and the CLI error report) can surface them.
class RankDeficientError : public std::runtime_error {
public:
    RankDeficientError(const std::string& context, std::vector<std::string> columns,
                       double tolerance, int rank, int expected)
        : std::runtime_error(format(context, columns, tolerance, rank, expected)),
          columns_(std::move(columns)),
          tolerance_(tolerance),
          rank_(rank),
          expected_(expected) {}

    const std::vector<std::string>& columns() const { return columns_; }
    double tolerance() const { return tolerance_; }
    int rank() const { return rank_; }
    int expected_rank() const { return expected_; }

private:
    static std::string format(const std::string& context,
                              const std::vector<std::string>& columns, double tolerance,
                              int rank, int expected) {
        std::string msg = context + ": rank-deficient design (rank " + std::to_string(rank) +
                          " of " + std::to_string(expected) + ", singular values below " +
                          std::to_string(tolerance) + " x largest treated as zero)";
        if (!columns.empty()) {
            msg += "; near-dependent columns: ";
            for (std::size_t i = 0; i < columns.size(); ++i) {
                if (i) msg += ", ";
                msg += columns[i];
            }
        }
        return msg;
    }

    std::vector<std::string> columns_;
    double tolerance_;
    int rank_;
    int expected_;
};

} // namespace alphalab
