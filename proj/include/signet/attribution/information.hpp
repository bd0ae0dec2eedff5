#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace signet::attribution {

/// Joint counts of a categorical feature X (rows) against predicted labels Y
/// (columns). Row totals are the per-value group sizes n_i.
class ContingencyTable {
public:
    /// `counts` is row-major, rows.size() x cols.size(). Throws
    /// Error(EmptyTable) when every count is zero or a dimension is empty.
    ContingencyTable(std::vector<std::string> rows, std::vector<std::string> cols,
                     std::vector<std::uint64_t> counts);

    /// Rows and columns take the sorted distinct values of each side.
    static ContingencyTable from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs);
    /// Unlabeled matrix; labels are the decimal indices.
    static ContingencyTable from_matrix(const std::vector<std::vector<std::uint64_t>>& matrix);

    std::size_t num_rows() const noexcept { return rows_.size(); }
    std::size_t num_cols() const noexcept { return cols_.size(); }
    const std::vector<std::string>& row_labels() const noexcept { return rows_; }
    const std::vector<std::string>& col_labels() const noexcept { return cols_; }

    std::uint64_t at(std::size_t i, std::size_t j) const { return counts_[i * cols_.size() + j]; }
    std::uint64_t row_total(std::size_t i) const { return row_totals_[i]; }
    std::uint64_t col_total(std::size_t j) const { return col_totals_[j]; }
    std::uint64_t total() const noexcept { return total_; }

    const std::vector<std::uint64_t>& row_totals() const noexcept { return row_totals_; }
    const std::vector<std::uint64_t>& col_totals() const noexcept { return col_totals_; }

private:
    std::vector<std::string> rows_;
    std::vector<std::string> cols_;
    std::vector<std::uint64_t> counts_;
    std::vector<std::uint64_t> row_totals_;
    std::vector<std::uint64_t> col_totals_;
    std::uint64_t total_ = 0;
};

// All information quantities are in bits.

/// Shannon entropy of a count vector (zeros ignored).
double entropy_bits(const std::vector<std::uint64_t>& counts);

double mutual_information(const ContingencyTable& table);

/// Exact E[I(X;Y)] under the hypergeometric model: all tables with the
/// observed row and column totals equally likely by permutation.
double expected_mi(const ContingencyTable& table);

struct AdjustedMI {
    double value = 0.0;
    bool degenerate = false;  // a constant side or a vanishing denominator; value forced to 0
};

/// (I - E[I]) / (max{H(X), H(Y)} - E[I]).
AdjustedMI adjusted_mi(const ContingencyTable& table);

using LabelCounts = std::map<std::string, std::uint64_t>;

/// H(Y | X = x) of one feature-value group. Throws Error(EmptyGroup).
double conditional_entropy(const LabelCounts& group);

/// 1 - sum_i n_i H(Y|X=x_i) / (N log2 |Y|); 1.0 when |Y| = 1. |Y| is raised
/// to the number of distinct labels observed if the caller passed fewer.
/// Throws Error(NoGroups) when there is no non-empty group.
double stability(const std::map<std::string, LabelCounts>& groups, std::size_t label_space_size);
double stability(const ContingencyTable& table, std::size_t label_space_size);

/// alpha * stability + (1 - alpha) * ami. Throws Error(AlphaOutOfRange).
double proxy_cmi(double ami, double stab, double alpha);

}  // namespace signet::attribution
