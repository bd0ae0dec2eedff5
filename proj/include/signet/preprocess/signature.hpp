#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "signet/preprocess/hostname.hpp"
#include "signet/preprocess/public_suffix.hpp"
#include "signet/preprocess/types.hpp"

namespace signet::preprocess {

/// Lookup tables shared by every per-device canonicalization.
struct Resources {
    PublicSuffixRules psl;
    DomainAliasMap domain_aliases;
    AdDomainList ad_domains;
};

/// Steps 1-5 applied to a single flow. Timestamps are not part of the row.
struct CanonicalRow {
    std::optional<DomainPort> domain;
    std::optional<std::string> oui_friendly;
    std::optional<std::string> dhcp_hostname;
    std::set<UAToken> user_agent_tokens;
    NetdiscoMap netdisco;
    std::optional<std::string> user_label;

    auto operator<=>(const CanonicalRow&) const = default;
    bool operator==(const CanonicalRow&) const = default;

    bool empty() const noexcept;
};

/// Hostname-level outcome for one flow, for stage accounting.
struct RowOutcome {
    CanonicalRow row;
    bool had_fields = false;                 // any feature present before step 1
    HostnameDrop hostname_drop = HostnameDrop::none;
    bool hostname_rejected_by_psl = false;   // survived step 1, failed step 2
};

RowOutcome canonicalize_flow(const FlowRecord& flow, const Resources& res);

/// Steps 1-6 for one device. Scalar fields (OUI, DHCP hostname) take the most
/// frequent value across flows, ties to the lexicographically smallest;
/// netdisco identifiers with several distinct values are joined with " | " in
/// sorted order; user labels are ordered by (timestamp, label), first seen
/// wins. Throws Error(EmptyInput) on no flows and Error(InvalidArgument) on
/// mixed device ids.
DeviceSignature canonicalize_device(std::span<const FlowRecord> flows, const PublicSuffixRules& psl,
                                    const DomainAliasMap& alias_map, const AdDomainList& ad_list);
DeviceSignature canonicalize_device(std::span<const FlowRecord> flows, const Resources& res);

/// One flow per signature element; canonicalizing the result reproduces the
/// signature.
std::vector<FlowRecord> signature_as_flows(const DeviceSignature& sig);

// Newline-delimited record codecs.
FlowRecord flow_from_json(const nlohmann::json& j);
nlohmann::json flow_to_json(const FlowRecord& flow);
nlohmann::json signature_to_json(const DeviceSignature& sig);
DeviceSignature signature_from_json(const nlohmann::json& j);

/// Compact single-line serialization used for bit-exact output.
std::string serialize_signature(const DeviceSignature& sig);

/// Reads a signatures file, skipping `_header` records.
std::vector<DeviceSignature> load_signatures(const std::filesystem::path& path);

}  // namespace signet::preprocess
