#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "signet/attribution/ranking.hpp"
#include "signet/labeling/alias.hpp"
#include "signet/labeling/predictor.hpp"
#include "signet/labeling/prompt.hpp"
#include "signet/labeling/types.hpp"

namespace signet::labeling {

/// model name -> non-negative vote weight.
using EnsembleWeights = std::map<std::string, double>;

inline constexpr const char* kEnsembleModelName = "ensemble";

/// Aliases are resolved first, then the canonical vendor with the largest
/// weight sum wins. An exact tie goes to the vendor whose highest-weight
/// supporter has the lexicographically smallest model name. Explanation,
/// device type and config come from the highest-weight supporter of the
/// winner. Throws Error(NoLabels), Error(MissingWeight), and
/// Error(InvalidArgument) on mixed devices, negative weights or no positive
/// weight.
PseudoLabel ensemble_vote(const std::vector<PseudoLabel>& labels, const EnsembleWeights& weights,
                          const VendorAliasStore& store);

/// Per-model calibration: rank_features output computed on that model's own
/// predictions.
using Calibration = std::map<std::string, std::vector<attribution::AttributionScore>>;

/// Each model's weight for one device is the mean proxy_cmi (clamped at 0)
/// over the native features present in the signature that the model's
/// calibration scored. If any model has no usable score, or every weight
/// would be zero, all models get weight 1.
EnsembleWeights cmi_weights(const Calibration& calibration, const preprocess::DeviceSignature& sig,
                            const std::vector<std::string>& models);

Calibration calibrate(const std::vector<preprocess::DeviceSignature>& signatures,
                      const std::vector<PseudoLabel>& labels, double alpha = attribution::kDefaultAlpha);

struct LabelError {
    std::string device_id;
    std::string model_name;  // "*" when every backend failed for the device
    std::string code;
    std::string message;

    bool operator==(const LabelError&) const = default;
};

nlohmann::json to_json(const LabelError& e);

/// Queries every backend for one device. Separate granularity combines the
/// vendor answer (and its explanation) with the type answer.
PseudoLabel label_device(const preprocess::DeviceSignature& sig, Predictor& backend, const PromptConfig& config,
                         const std::set<preprocess::Feature>& omit = {}, const AugmentHook& hook = {});

struct LabelingOptions {
    PromptConfig config;
    std::set<preprocess::Feature> omit;
    AugmentHook hook;
    std::size_t jobs = 1;
};

struct LabelingResult {
    std::vector<PseudoLabel> per_model;  // sorted by (device_id, model_name)
    std::vector<PseudoLabel> voted;      // sorted by device_id
    std::vector<LabelError> errors;      // sorted by (device_id, model_name)
};

/// Labels every signature with every backend and votes. `weights_for` maps a
/// signature to the vote weights; pass an empty function for uniform weights.
/// Backends are shared across worker threads and must be thread-safe.
LabelingResult label_dataset(const std::vector<preprocess::DeviceSignature>& signatures,
                             const std::vector<Predictor*>& backends, const LabelingOptions& options,
                             const std::function<EnsembleWeights(const preprocess::DeviceSignature&)>& weights_for,
                             const VendorAliasStore& store);

/// Groups per-model labels by device and votes each group.
std::vector<PseudoLabel> vote_all(const std::vector<PseudoLabel>& per_model, const VendorAliasStore& store,
                                  const std::function<EnsembleWeights(const std::string& device_id,
                                                                      const std::vector<std::string>& models)>& weights_for);

}  // namespace signet::labeling
