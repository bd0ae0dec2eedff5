#pragma once

#include <array>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "signet/labeling/types.hpp"
#include "signet/preprocess/features.hpp"

namespace signet::labeling {

enum class PromptTarget { joint, vendor, type };

std::string_view to_string(PromptTarget t) noexcept;

struct RenderedPrompt {
    PromptTarget target = PromptTarget::joint;
    std::string text;

    bool operator==(const RenderedPrompt&) const = default;
};

/// Extra context appended to search-augmented prompts. No implementation ships.
using AugmentHook = std::function<std::string(const preprocess::DeviceSignature&)>;

/// Line label used when rendering a field, e.g. "Remote Hostnames".
std::string_view field_label(preprocess::Feature f) noexcept;

/// Prompt fields in render order.
inline constexpr std::array<preprocess::Feature, 7> kPromptFieldOrder{
    preprocess::Feature::oui_friendly,    preprocess::Feature::dhcp_hostname, preprocess::Feature::remote_hostname,
    preprocess::Feature::user_agent_info, preprocess::Feature::talks_to_ads,  preprocess::Feature::user_labels,
    preprocess::Feature::netdisco_info,
};

/// Field block only ("OUI: ...\nDHCP Hostname: ...\n..."), absent fields and
/// fields in `omit` left out. Talks to Ads is rendered whenever it is not
/// omitted.
std::string render_fields(const preprocess::DeviceSignature& sig, bool include_ports,
                          const std::set<preprocess::Feature>& omit = {});

/// One prompt for joint granularity, two (vendor, then type) for separate.
/// Throws Error(EmptySignature) when no native field would be rendered and
/// Error(ConfigError) when search augmentation is requested without a hook.
std::vector<RenderedPrompt> build_prompt(const preprocess::DeviceSignature& sig, const PromptConfig& config,
                                         const std::set<preprocess::Feature>& omit = {},
                                         const AugmentHook& hook = {});

}  // namespace signet::labeling
