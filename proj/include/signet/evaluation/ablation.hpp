#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "signet/evaluation/rubric.hpp"
#include "signet/labeling/ensemble.hpp"

namespace signet::evaluation {

/// Produces a vendor prediction for a signature with some fields withheld
/// from the prompt. Throwing signet::Error marks the device as failed.
using PredictFn = std::function<labeling::PseudoLabel(const preprocess::DeviceSignature&,
                                                      const std::set<preprocess::Feature>& omit)>;

/// Prediction through every backend followed by an ensemble vote.
PredictFn make_ensemble_predictor(std::vector<labeling::Predictor*> backends, labeling::PromptConfig config,
                                  const labeling::VendorAliasStore& store);

inline constexpr const char* kBaselineRow = "All Features (Baseline)";

struct AblationRow {
    std::string name;          // kBaselineRow or the ablated feature
    double accuracy = 0.0;     // manual tier over devices with a reference
    double delta = 0.0;        // accuracy - baseline accuracy
    std::uint64_t devices = 0;
    std::uint64_t failures = 0;  // devices whose prediction threw; scored wrong
    std::uint64_t label_leaks = 0;  // rendered prompts that still contain the field label

    bool operator==(const AblationRow&) const = default;
};

/// Baseline row followed by one row per feature, in the given order. Only
/// signatures with an entry in `references` (device_id -> vendor) are scored.
/// `config` is used to render the prompts audited for label leaks.
std::vector<AblationRow> leave_one_out(const std::vector<preprocess::DeviceSignature>& signatures,
                                       const PredictFn& predict, const std::vector<preprocess::Feature>& features,
                                       const std::map<std::string, std::string>& references, const RubricConfig& rubric,
                                       const labeling::PromptConfig& config = {});

std::string render_ablation_tsv(const std::vector<AblationRow>& rows);
nlohmann::json to_json(const AblationRow& row);

}  // namespace signet::evaluation
