#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace signet::labeling {

enum class Granularity { separate, joint };

/// One point in the four-dimensional prompt design space.
struct PromptConfig {
    Granularity granularity = Granularity::joint;
    bool cot = true;
    bool include_ports = false;
    bool search_augmented = false;  // requires an augmentation hook at prompt time

    bool operator==(const PromptConfig&) const = default;

    /// Display name in ablation-table style, e.g. "Joint + CoT + Ports" or
    /// "Brave + CoT".
    std::string name() const;
    /// Inverse of name(); also accepts lowercase and '+'-joined words without
    /// spaces ("joint+cot"). Throws Error(ConfigError).
    static PromptConfig parse(std::string_view name);
    /// The twelve ablation configurations: {Separate, Joint, Brave} x CoT x Ports.
    static std::vector<PromptConfig> ablation_grid();
};

nlohmann::json to_json(const PromptConfig& config);
PromptConfig prompt_config_from_json(const nlohmann::json& j);

/// Structured model output for one device, with provenance.
struct PseudoLabel {
    std::string device_id;
    std::string explanation;
    std::optional<std::string> device_type;
    std::string vendor;
    std::string model_name;
    PromptConfig config;
    std::string raw_response;

    bool operator==(const PseudoLabel&) const = default;
};

nlohmann::json to_json(const PseudoLabel& label);
/// Throws Error(DecodeError) on missing fields or an empty vendor.
PseudoLabel pseudo_label_from_json(const nlohmann::json& j);

}  // namespace signet::labeling
