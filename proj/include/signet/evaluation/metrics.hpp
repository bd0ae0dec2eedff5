#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "signet/evaluation/rubric.hpp"

namespace signet::evaluation {

/// (p_o - p_e) / (1 - p_e) over normalized predicted vs reference vendors.
/// When p_e = 1 the result is 1.0 if p_o = 1 and 0.0 otherwise.
/// Throws Error(EmptyInput).
double cohens_kappa(const std::vector<LabeledPair>& pairs);
/// Same statistic over a square confusion matrix (rows: rater A, columns:
/// rater B). Throws Error(EmptyInput) on an all-zero matrix and
/// Error(InvalidArgument) when it is not square.
double cohens_kappa(const std::vector<std::vector<std::uint64_t>>& confusion);

enum class SupportBucket { head, mid, tail };

std::string_view to_string(SupportBucket b) noexcept;
/// >100 head, 11..100 mid, <=10 tail.
SupportBucket bucket_for_support(std::uint64_t samples) noexcept;

struct BucketStats {
    std::optional<double> accuracy;  // manual tier; absent for an empty bucket
    std::uint64_t classes = 0;
    std::uint64_t samples = 0;
};

using TierBreakdown = std::array<BucketStats, 3>;  // indexed by SupportBucket

/// Buckets reference classes (normalized reference vendors) by support.
/// Throws Error(EmptyInput).
TierBreakdown tier_partition(const std::vector<LabeledPair>& pairs, const RubricConfig& rubric);

std::string render_breakdown_tsv(const TierBreakdown& breakdown);
nlohmann::json to_json(const TierBreakdown& breakdown);

}  // namespace signet::evaluation
