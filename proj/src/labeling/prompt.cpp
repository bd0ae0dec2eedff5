#include "signet/labeling/prompt.hpp"

#include <set>

#include "signet/error.hpp"
#include "signet/text.hpp"

namespace signet::labeling {

using preprocess::Feature;

namespace {

constexpr std::string_view kIntro = "Below is information about a device.";
constexpr std::string_view kGrounding =
    "Make sure the explanations are meaningful, easy to understand, succinct, and grounded in the input data.";
constexpr std::string_view kNoPlaceholders = "Do not include placeholders like '<explanation>' or '...'.";

std::string instruction(PromptTarget target, bool cot) {
    std::string_view what = target == PromptTarget::joint    ? "the device type and vendor"
                            : target == PromptTarget::vendor ? "the vendor"
                                                             : "the device type";
    std::string_view form = target == PromptTarget::joint    ? "Device Type: <type>, Vendor: <vendor>"
                            : target == PromptTarget::vendor ? "Vendor: <vendor>"
                                                             : "Device Type: <type>";
    std::string out(kIntro);
    if (cot) {
        out += " Think step-by-step, then predict " + std::string(what) + ".\n";
        out += std::string(kGrounding) + "\n";
        out += "Respond with an Explanation followed by a structured prediction in the form: " + std::string(form) + ".\n";
    } else {
        out += " Predict " + std::string(what) + ".\n";
        out += "Respond with only a structured prediction in the form: " + std::string(form) + ".\n";
    }
    out += std::string(kNoPlaceholders) + "\n";
    return out;
}

std::string render_value(const preprocess::DeviceSignature& sig, Feature f, bool include_ports) {
    switch (f) {
        case Feature::remote_hostname: {
            std::vector<std::string> parts;
            std::set<std::string> seen;
            for (const auto& d : sig.remote_hostnames) {
                auto s = include_ports ? d.to_string() : d.base_domain;
                if (seen.insert(s).second) parts.push_back(std::move(s));
            }
            return text::join(parts, ", ");
        }
        case Feature::netdisco_info: {
            std::vector<std::string> parts;
            for (const auto& [k, v] : sig.netdisco_identifiers) parts.push_back(v);
            return text::join(parts, ", ");
        }
        default: {
            auto values = preprocess::feature_values(sig, f);
            return values.empty() ? std::string() : values.front();
        }
    }
}

}  // namespace

std::string_view to_string(PromptTarget t) noexcept {
    switch (t) {
        case PromptTarget::joint: return "joint";
        case PromptTarget::vendor: return "vendor";
        case PromptTarget::type: return "type";
    }
    return "joint";
}

std::string_view field_label(Feature f) noexcept {
    switch (f) {
        case Feature::oui_friendly: return "OUI";
        case Feature::dhcp_hostname: return "DHCP Hostname";
        case Feature::remote_hostname: return "Remote Hostnames";
        case Feature::user_agent_info: return "User Agent";
        case Feature::talks_to_ads: return "Talks to Ads";
        case Feature::user_labels: return "User Label";
        case Feature::netdisco_info: return "Netdisco Info";
    }
    return "";
}

std::string render_fields(const preprocess::DeviceSignature& sig, bool include_ports, const std::set<Feature>& omit) {
    std::string out;
    for (auto f : kPromptFieldOrder) {
        if (omit.count(f)) continue;
        if (!preprocess::has_feature(sig, f)) continue;
        out += std::string(field_label(f)) + ": " + render_value(sig, f, include_ports) + "\n";
    }
    return out;
}

std::vector<RenderedPrompt> build_prompt(const preprocess::DeviceSignature& sig, const PromptConfig& config,
                                         const std::set<Feature>& omit, const AugmentHook& hook) {
    bool any_native = false;
    for (auto f : preprocess::kNativeFeatures) {
        if (!omit.count(f) && preprocess::has_feature(sig, f)) any_native = true;
    }
    if (!any_native) throw Error(Errc::EmptySignature, "device " + sig.device_id + " has no renderable fields");
    if (config.search_augmented && !hook) {
        throw Error(Errc::ConfigError, "search-augmented prompt requested but no augmentation hook is registered");
    }

    auto body = render_fields(sig, config.include_ports, omit);
    if (config.search_augmented) {
        auto extra = text::squash_whitespace(hook(sig));
        if (!extra.empty()) body += "Search Context: " + extra + "\n";
    }

    std::vector<RenderedPrompt> out;
    auto emit = [&](PromptTarget t) { out.push_back({t, instruction(t, config.cot) + "\n" + body}); };
    if (config.granularity == Granularity::joint) {
        emit(PromptTarget::joint);
    } else {
        emit(PromptTarget::vendor);
        emit(PromptTarget::type);
    }
    return out;
}

}  // namespace signet::labeling
