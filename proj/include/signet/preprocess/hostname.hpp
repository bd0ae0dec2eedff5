#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "signet/preprocess/public_suffix.hpp"
#include "signet/preprocess/types.hpp"

namespace signet::preprocess {

/// Why a remote_hostname was judged non-informative.
enum class HostnameDrop { none, empty, private_ip, ip_literal, local_suffix, arpa_suffix };

std::string_view to_string(HostnameDrop reason) noexcept;

/// Rule table for step 1: empty/whitespace, IP literals (private, link-local
/// and loopback ranges reported separately), `.local` and `.arpa` suffixes.
HostnameDrop classify_hostname(std::string_view hostname);

/// The hostname unchanged when informative, otherwise absent.
std::optional<std::string> filter_hostname(std::string_view hostname);

/// Registrable domain (one label beyond the matched public suffix), lowercased,
/// port attached. Hostnames under no listed suffix fall back to the last two
/// labels. Throws Error(HostnameIsPublicSuffix) or Error(InvalidHostname).
DomainPort extract_base_domain(std::string_view hostname, std::optional<std::uint16_t> port,
                               const PublicSuffixRules& psl);

/// alias base domain -> canonical base domain. Chains are resolved at load so
/// every target is a fixed point.
class DomainAliasMap {
public:
    DomainAliasMap() = default;
    explicit DomainAliasMap(const std::map<std::string, std::string>& raw);

    static DomainAliasMap parse(std::string_view tsv);
    static DomainAliasMap load(const std::filesystem::path& path);

    const std::string& canonical(const std::string& domain) const;
    std::size_t size() const noexcept { return map_.size(); }
    bool empty() const noexcept { return map_.empty(); }

private:
    std::map<std::string, std::string> map_;
};

DomainPort merge_equivalent_domains(const DomainPort& domain, const DomainAliasMap& alias_map);

/// Exact-match set of advertising base domains.
class AdDomainList {
public:
    AdDomainList() = default;
    explicit AdDomainList(const std::set<std::string>& domains);

    /// One domain per line; blank lines and `#` comments skipped.
    static AdDomainList parse(std::string_view contents);
    static AdDomainList load(const std::filesystem::path& path);

    bool contains(std::string_view domain) const;
    std::size_t size() const noexcept { return domains_.size(); }

private:
    std::set<std::string, std::less<>> domains_;
};

bool derive_talks_to_ads(const std::set<DomainPort>& domains, const AdDomainList& ad_list);

}  // namespace signet::preprocess
