#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace signet::preprocess {

using NetdiscoMap = std::map<std::string, std::string>;

/// One timestamped flow-level observation.
struct FlowRecord {
    std::string device_id;
    std::int64_t timestamp = 0;
    std::optional<std::string> remote_hostname;
    std::optional<std::uint16_t> remote_port;
    std::optional<std::string> user_label;
    std::optional<std::string> oui_friendly;
    std::optional<std::string> dhcp_hostname;
    std::optional<std::string> user_agent_info;
    std::optional<NetdiscoMap> netdisco_info;

    bool operator==(const FlowRecord&) const = default;
};

/// Registrable base domain with the destination port observed alongside it.
struct DomainPort {
    std::string base_domain;
    std::optional<std::uint16_t> port;

    auto operator<=>(const DomainPort&) const = default;
    bool operator==(const DomainPort&) const = default;

    /// "ring.com:443" or "ring.com".
    std::string to_string() const;
    static DomainPort parse(std::string_view rendered);
};

enum class UAKind { browser, os, model, sdk, other };

std::string_view to_string(UAKind kind) noexcept;
std::optional<UAKind> ua_kind_from_string(std::string_view s) noexcept;

struct UAToken {
    UAKind kind = UAKind::other;
    std::string value;

    auto operator<=>(const UAToken&) const = default;
    bool operator==(const UAToken&) const = default;
};

/// Canonical per-device aggregation of all flows sharing a device_id.
struct DeviceSignature {
    std::string device_id;
    std::optional<std::string> oui_friendly;
    std::optional<std::string> dhcp_hostname;
    std::set<DomainPort> remote_hostnames;
    std::set<UAToken> user_agent_tokens;
    NetdiscoMap netdisco_identifiers;
    std::vector<std::string> user_labels;
    bool talks_to_ads = false;

    bool operator==(const DeviceSignature&) const = default;
};

/// Flow counts after each stage plus per-stage drop counters. Counts are
/// additive so partial stats from parallel workers merge with +=.
struct PipelineStats {
    std::uint64_t input_flows = 0;
    std::uint64_t decoded_flows = 0;
    std::uint64_t flows_after_hostname_filter = 0;
    std::uint64_t canonical_rows = 0;
    std::uint64_t unique_devices = 0;
    std::map<std::string, std::uint64_t> per_stage_drop_counts;

    PipelineStats& operator+=(const PipelineStats& other);
    bool operator==(const PipelineStats&) const = default;

    bool monotone() const noexcept;
};

}  // namespace signet::preprocess
