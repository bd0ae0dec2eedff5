#include "signet/preprocess/features.hpp"

#include <set>

#include "signet/text.hpp"

namespace signet::preprocess {

std::string_view to_string(Feature f) noexcept {
    switch (f) {
        case Feature::oui_friendly: return "oui_friendly";
        case Feature::dhcp_hostname: return "dhcp_hostname";
        case Feature::remote_hostname: return "remote_hostname";
        case Feature::user_agent_info: return "user_agent_info";
        case Feature::talks_to_ads: return "talks_to_ads";
        case Feature::user_labels: return "user_labels";
        case Feature::netdisco_info: return "netdisco_info";
    }
    return "oui_friendly";
}

std::optional<Feature> feature_from_string(std::string_view s) noexcept {
    const auto t = text::trim(s);
    for (auto f : {Feature::oui_friendly, Feature::dhcp_hostname, Feature::remote_hostname, Feature::user_agent_info,
                   Feature::talks_to_ads, Feature::user_labels, Feature::netdisco_info}) {
        if (t == to_string(f)) return f;
    }
    if (t == "remote_hostnames") return Feature::remote_hostname;
    if (t == "user_label") return Feature::user_labels;
    return std::nullopt;
}

std::vector<std::string> feature_values(const DeviceSignature& sig, Feature f) {
    switch (f) {
        case Feature::oui_friendly:
            if (sig.oui_friendly) return {*sig.oui_friendly};
            return {};
        case Feature::dhcp_hostname:
            if (sig.dhcp_hostname) return {*sig.dhcp_hostname};
            return {};
        case Feature::remote_hostname: {
            std::set<std::string> domains;
            for (const auto& d : sig.remote_hostnames) domains.insert(d.base_domain);
            return {domains.begin(), domains.end()};
        }
        case Feature::user_agent_info: {
            if (sig.user_agent_tokens.empty()) return {};
            std::vector<std::string> parts;
            for (const auto& t : sig.user_agent_tokens) parts.push_back(t.value);
            return {text::join(parts, " ")};
        }
        case Feature::talks_to_ads:
            return {sig.talks_to_ads ? "True" : "False"};
        case Feature::user_labels:
            if (sig.user_labels.empty()) return {};
            return {text::join(sig.user_labels, "+")};
        case Feature::netdisco_info: {
            if (sig.netdisco_identifiers.empty()) return {};
            std::vector<std::string> parts;
            for (const auto& [k, v] : sig.netdisco_identifiers) parts.push_back(k + "=" + v);
            return {text::join(parts, "; ")};
        }
    }
    return {};
}

bool has_feature(const DeviceSignature& sig, Feature f) {
    if (f == Feature::talks_to_ads) return true;
    return !feature_values(sig, f).empty();
}

DeviceSignature without_feature(const DeviceSignature& sig, Feature f) {
    DeviceSignature out = sig;
    switch (f) {
        case Feature::oui_friendly: out.oui_friendly.reset(); break;
        case Feature::dhcp_hostname: out.dhcp_hostname.reset(); break;
        case Feature::remote_hostname: out.remote_hostnames.clear(); break;
        case Feature::user_agent_info: out.user_agent_tokens.clear(); break;
        case Feature::talks_to_ads: out.talks_to_ads = false; break;
        case Feature::user_labels: out.user_labels.clear(); break;
        case Feature::netdisco_info: out.netdisco_identifiers.clear(); break;
    }
    return out;
}

}  // namespace signet::preprocess
