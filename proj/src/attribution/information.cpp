#include "signet/attribution/information.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "signet/error.hpp"

namespace signet::attribution {

namespace {

constexpr double kDenominatorEps = 1e-12;

}  // namespace

ContingencyTable::ContingencyTable(std::vector<std::string> rows, std::vector<std::string> cols,
                                   std::vector<std::uint64_t> counts)
    : rows_(std::move(rows)), cols_(std::move(cols)), counts_(std::move(counts)) {
    if (rows_.empty() || cols_.empty()) throw Error(Errc::EmptyTable, "table has no rows or columns");
    if (counts_.size() != rows_.size() * cols_.size()) {
        throw Error(Errc::InvalidArgument, "count matrix does not match label dimensions");
    }
    row_totals_.assign(rows_.size(), 0);
    col_totals_.assign(cols_.size(), 0);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        for (std::size_t j = 0; j < cols_.size(); ++j) {
            const auto c = at(i, j);
            row_totals_[i] += c;
            col_totals_[j] += c;
            total_ += c;
        }
    }
    if (total_ == 0) throw Error(Errc::EmptyTable, "all counts are zero");
}

ContingencyTable ContingencyTable::from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::set<std::string> xs, ys;
    for (const auto& [x, y] : pairs) {
        xs.insert(x);
        ys.insert(y);
    }
    std::vector<std::string> rows(xs.begin(), xs.end()), cols(ys.begin(), ys.end());
    std::vector<std::uint64_t> counts(rows.size() * cols.size(), 0);
    for (const auto& [x, y] : pairs) {
        auto i = std::lower_bound(rows.begin(), rows.end(), x) - rows.begin();
        auto j = std::lower_bound(cols.begin(), cols.end(), y) - cols.begin();
        ++counts[static_cast<std::size_t>(i) * cols.size() + static_cast<std::size_t>(j)];
    }
    return ContingencyTable(std::move(rows), std::move(cols), std::move(counts));
}

ContingencyTable ContingencyTable::from_matrix(const std::vector<std::vector<std::uint64_t>>& matrix) {
    if (matrix.empty() || matrix.front().empty()) throw Error(Errc::EmptyTable, "empty matrix");
    const std::size_t r = matrix.size(), c = matrix.front().size();
    std::vector<std::string> rows, cols;
    for (std::size_t i = 0; i < r; ++i) rows.push_back(std::to_string(i));
    for (std::size_t j = 0; j < c; ++j) cols.push_back(std::to_string(j));
    std::vector<std::uint64_t> counts;
    counts.reserve(r * c);
    for (const auto& row : matrix) {
        if (row.size() != c) throw Error(Errc::InvalidArgument, "ragged matrix");
        counts.insert(counts.end(), row.begin(), row.end());
    }
    return ContingencyTable(std::move(rows), std::move(cols), std::move(counts));
}

double entropy_bits(const std::vector<std::uint64_t>& counts) {
    double n = 0.0;
    for (auto c : counts) n += static_cast<double>(c);
    if (n <= 0.0) return 0.0;
    double h = 0.0;
    for (auto c : counts) {
        if (c > 0) {
            const double p = static_cast<double>(c) / n;
            h -= p * std::log2(p);
        }
    }
    return h;
}

double mutual_information(const ContingencyTable& t) {
    const double n = static_cast<double>(t.total());
    double mi = 0.0;
    for (std::size_t i = 0; i < t.num_rows(); ++i) {
        for (std::size_t j = 0; j < t.num_cols(); ++j) {
            const auto nij = t.at(i, j);
            if (nij == 0) continue;
            const double v = static_cast<double>(nij);
            mi += v / n * std::log2(n * v / (static_cast<double>(t.row_total(i)) * static_cast<double>(t.col_total(j))));
        }
    }
    return std::max(0.0, mi);
}

double expected_mi(const ContingencyTable& t) {
    const std::uint64_t N = t.total();
    const double n = static_cast<double>(N);
    std::vector<double> lfact(N + 1);
    for (std::uint64_t k = 0; k <= N; ++k) lfact[k] = std::lgamma(static_cast<double>(k) + 1.0);

    double emi = 0.0;
    for (auto a : t.row_totals()) {
        if (a == 0) continue;
        for (auto b : t.col_totals()) {
            if (b == 0) continue;
            const std::uint64_t lo = std::max<std::int64_t>(1, static_cast<std::int64_t>(a + b) - static_cast<std::int64_t>(N));
            const std::uint64_t hi = std::min(a, b);
            const double log_const = lfact[a] + lfact[b] + lfact[N - a] + lfact[N - b] - lfact[N];
            for (std::uint64_t nij = lo; nij <= hi; ++nij) {
                const double log_p = log_const - lfact[nij] - lfact[a - nij] - lfact[b - nij] - lfact[N - a - b + nij];
                const double v = static_cast<double>(nij);
                emi += v / n * std::log2(n * v / (static_cast<double>(a) * static_cast<double>(b))) * std::exp(log_p);
            }
        }
    }
    return std::max(0.0, emi);
}

AdjustedMI adjusted_mi(const ContingencyTable& t) {
    const double hx = entropy_bits(t.row_totals());
    const double hy = entropy_bits(t.col_totals());
    if (hx <= 0.0 || hy <= 0.0) return AdjustedMI{0.0, true};
    const double mi = mutual_information(t);
    const double emi = expected_mi(t);
    const double denom = std::max(hx, hy) - emi;
    if (std::abs(denom) < kDenominatorEps) return AdjustedMI{0.0, true};
    return AdjustedMI{(mi - emi) / denom, false};
}

double conditional_entropy(const LabelCounts& group) {
    std::vector<std::uint64_t> counts;
    counts.reserve(group.size());
    std::uint64_t n = 0;
    for (const auto& [label, c] : group) {
        counts.push_back(c);
        n += c;
    }
    if (n == 0) throw Error(Errc::EmptyGroup, "group has no samples");
    return entropy_bits(counts);
}

double stability(const std::map<std::string, LabelCounts>& groups, std::size_t label_space_size) {
    std::set<std::string> labels;
    double weighted = 0.0;
    std::uint64_t total = 0;
    for (const auto& [value, group] : groups) {
        std::uint64_t n = 0;
        for (const auto& [label, c] : group) {
            n += c;
            if (c > 0) labels.insert(label);
        }
        if (n == 0) continue;
        weighted += static_cast<double>(n) * conditional_entropy(group);
        total += n;
    }
    if (total == 0) throw Error(Errc::NoGroups, "no non-empty feature-value groups");
    const std::size_t k = std::max(label_space_size, labels.size());
    if (k <= 1) return 1.0;
    const double s = 1.0 - weighted / (static_cast<double>(total) * std::log2(static_cast<double>(k)));
    return std::clamp(s, 0.0, 1.0);
}

double stability(const ContingencyTable& t, std::size_t label_space_size) {
    std::map<std::string, LabelCounts> groups;
    for (std::size_t i = 0; i < t.num_rows(); ++i) {
        auto& g = groups[t.row_labels()[i]];
        for (std::size_t j = 0; j < t.num_cols(); ++j) {
            if (t.at(i, j) > 0) g[t.col_labels()[j]] = t.at(i, j);
        }
    }
    return stability(groups, label_space_size);
}

double proxy_cmi(double ami, double stab, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(Errc::AlphaOutOfRange, "alpha must lie in [0, 1]");
    return alpha * stab + (1.0 - alpha) * ami;
}

}  // namespace signet::attribution
