#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "signet/labeling/alias.hpp"

namespace signet::evaluation {

/// Lowercase, trim, collapse whitespace and drop trailing corporate suffixes
/// (inc, corp, co, ltd, with or without a period). Never strips a label down
/// to nothing. Idempotent.
std::string normalize_label(std::string_view s);

enum class ReferenceSource { pseudo, manual };

struct LabeledPair {
    std::string device_id;
    std::string predicted_vendor;
    std::string reference_vendor;
    ReferenceSource reference_source = ReferenceSource::pseudo;
};

struct Adjudication {
    bool accept = false;
    std::string note;
};

/// Rubric components. The semantic map and ambiguous set are stored in
/// normalized form.
struct RubricConfig {
    std::map<std::string, std::string> semantic_map;  // descriptor -> canonical descriptor
    labeling::VendorAliasStore brand_aliases;
    std::set<std::string> ambiguous;
    std::optional<std::map<std::string, Adjudication>> manual;  // device_id -> verdict

    /// Reads semantic_map.tsv, brand_aliases.tsv and ambiguous.txt from
    /// `dir`, plus an optional adjudication file (`device_id<TAB>accept|reject
    /// [<TAB>note]`). Throws Error(MissingRubricComponent) when a required
    /// file is absent and Error(ConfigError) when one is malformed.
    static RubricConfig load(const std::filesystem::path& dir,
                             const std::optional<std::filesystem::path>& manual_path = std::nullopt);

    static std::map<std::string, std::string> parse_semantic_map(std::string_view tsv);
    static std::set<std::string> parse_ambiguous(std::string_view text);
    static std::map<std::string, Adjudication> parse_adjudications(std::string_view tsv);
};

struct TierVerdict {
    bool strict = false;
    bool semantic = false;
    bool brand = false;
    bool ambiguous_excluded = false;  // reference is in the ambiguous set
    bool unified = false;
    bool manual = false;

    bool operator==(const TierVerdict&) const = default;
};

/// Throws Error(InvalidArgument) on an empty vendor.
TierVerdict tier_match(const LabeledPair& pair, const RubricConfig& rubric);

/// Per-tier accuracy. Strict, semantic, brand, unified and manual use all
/// pairs as denominator. The ambiguous-exclusion tier is the strict accuracy
/// over pairs whose reference is not ambiguous; it is absent when every
/// reference is ambiguous.
struct TierAccuracy {
    double strict = 0.0;
    double semantic = 0.0;
    double brand = 0.0;
    std::optional<double> ambiguous_exclusion;
    double unified = 0.0;
    double manual = 0.0;
    std::size_t n_pairs = 0;
    std::size_t n_ambiguous = 0;
};

/// Throws Error(EmptyInput).
TierAccuracy tiered_accuracy(const std::vector<LabeledPair>& pairs, const RubricConfig& rubric);

/// Table with rows in tier order, Strict Match through Manual Validation Tier.
std::string render_tiers_tsv(const TierAccuracy& acc);
nlohmann::json to_json(const TierAccuracy& acc);

}  // namespace signet::evaluation
