#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "signet/preprocess/types.hpp"

namespace signet::preprocess {

/// Signature fields as seen by prompts, attribution and ablation.
enum class Feature { oui_friendly, dhcp_hostname, remote_hostname, user_agent_info, talks_to_ads, user_labels, netdisco_info };

/// The six fields observed directly on the network; talks_to_ads is derived.
inline constexpr std::array<Feature, 6> kNativeFeatures{
    Feature::oui_friendly,  Feature::dhcp_hostname, Feature::remote_hostname,
    Feature::user_agent_info, Feature::netdisco_info, Feature::user_labels,
};

std::string_view to_string(Feature f) noexcept;
/// Accepts the names above plus "remote_hostnames" and "user_label".
std::optional<Feature> feature_from_string(std::string_view s) noexcept;

/// Categorical values of a feature for one device: empty when absent.
/// remote_hostname yields each distinct base domain with ports stripped;
/// user_agent_info, netdisco_info and user_labels each collapse to a single
/// canonical string.
std::vector<std::string> feature_values(const DeviceSignature& sig, Feature f);

bool has_feature(const DeviceSignature& sig, Feature f);

/// Copy of `sig` with the feature cleared (talks_to_ads becomes false).
DeviceSignature without_feature(const DeviceSignature& sig, Feature f);

}  // namespace signet::preprocess
