#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "signet/attribution/information.hpp"
#include "signet/labeling/types.hpp"
#include "signet/preprocess/features.hpp"

namespace signet::attribution {

inline constexpr double kDefaultAlpha = 0.5;

struct AttributionScore {
    std::string feature_name;
    // All three are absent when the feature is present on fewer than two devices.
    std::optional<double> ami;
    std::optional<double> stability;
    std::optional<double> proxy_cmi;
    bool ami_degenerate = false;
    double alpha = kDefaultAlpha;
    std::uint64_t n_samples = 0;   // (value, label) pairs in the table
    std::uint64_t n_devices = 0;   // devices carrying the feature

    bool operator==(const AttributionScore&) const = default;
};

/// (feature value, predicted vendor) pairs for one feature, one pair per
/// distinct value per device. Devices lacking the feature contribute nothing.
std::vector<std::pair<std::string, std::string>> feature_pairs(
    const std::vector<preprocess::DeviceSignature>& signatures,
    const std::vector<labeling::PseudoLabel>& predictions, preprocess::Feature feature);

/// Scores every native feature. Predictions are joined to signatures by
/// device_id; search-augmented predictions and signatures without a
/// prediction are left out. |Y| is the number of distinct predicted vendors in
/// that slice. Sorted by proxy_cmi descending, then feature name, unscored
/// features last. Throws Error(AlphaOutOfRange) and, on two predictions for
/// one device, Error(InvalidArgument).
std::vector<AttributionScore> rank_features(const std::vector<preprocess::DeviceSignature>& signatures,
                                            const std::vector<labeling::PseudoLabel>& predictions,
                                            double alpha = kDefaultAlpha);

/// Tab-separated table with a header row; unscored cells read "NA".
std::string render_scores_tsv(const std::vector<AttributionScore>& scores);
nlohmann::json to_json(const AttributionScore& score);
AttributionScore attribution_score_from_json(const nlohmann::json& j);

}  // namespace signet::attribution
