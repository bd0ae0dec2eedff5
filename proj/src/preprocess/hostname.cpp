#include "signet/preprocess/hostname.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <array>

#include "signet/error.hpp"
#include "signet/text.hpp"

namespace signet::preprocess {

namespace {

bool is_private_address(std::string_view raw) {
    auto s = text::trim(raw);
    if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
    std::string buf(s);
    if (auto pct = buf.find('%'); pct != std::string::npos) buf.resize(pct);

    std::array<unsigned char, 16> a{};
    if (inet_pton(AF_INET, buf.c_str(), a.data()) == 1) {
        return a[0] == 10 || a[0] == 127 || (a[0] == 172 && (a[1] & 0xF0) == 16) ||
               (a[0] == 192 && a[1] == 168) || (a[0] == 169 && a[1] == 254);
    }
    if (inet_pton(AF_INET6, buf.c_str(), a.data()) == 1) {
        const bool loopback = std::all_of(a.begin(), a.begin() + 15, [](unsigned char b) { return b == 0; }) &&
                              a[15] == 1;
        const bool link_local = a[0] == 0xFE && (a[1] & 0xC0) == 0x80;
        const bool unique_local = (a[0] & 0xFE) == 0xFC;
        return loopback || link_local || unique_local;
    }
    return false;
}

std::string normalize_domain(std::string_view s) {
    std::string d = text::to_lower_ascii(text::trim(s));
    while (!d.empty() && d.back() == '.') d.pop_back();
    while (!d.empty() && d.front() == '.') d.erase(d.begin());
    return d;
}

}  // namespace

std::string_view to_string(HostnameDrop reason) noexcept {
    switch (reason) {
        case HostnameDrop::none: return "none";
        case HostnameDrop::empty: return "empty";
        case HostnameDrop::private_ip: return "private_ip";
        case HostnameDrop::ip_literal: return "ip_literal";
        case HostnameDrop::local_suffix: return "local_suffix";
        case HostnameDrop::arpa_suffix: return "arpa_suffix";
    }
    return "none";
}

HostnameDrop classify_hostname(std::string_view hostname) {
    auto h = text::trim(hostname);
    if (h.empty()) return HostnameDrop::empty;
    if (text::is_ip_literal(h)) {
        return is_private_address(h) ? HostnameDrop::private_ip : HostnameDrop::ip_literal;
    }
    while (!h.empty() && h.back() == '.') h.remove_suffix(1);
    if (h.empty()) return HostnameDrop::empty;
    if (text::iequals(h, "local") || text::ends_with_ci(h, ".local")) return HostnameDrop::local_suffix;
    if (text::iequals(h, "arpa") || text::ends_with_ci(h, ".arpa")) return HostnameDrop::arpa_suffix;
    return HostnameDrop::none;
}

std::optional<std::string> filter_hostname(std::string_view hostname) {
    if (classify_hostname(hostname) != HostnameDrop::none) return std::nullopt;
    return std::string(hostname);
}

DomainPort extract_base_domain(std::string_view hostname, std::optional<std::uint16_t> port,
                               const PublicSuffixRules& psl) {
    auto match = psl.match(hostname);
    if (!match.registrable) {
        throw Error(Errc::HostnameIsPublicSuffix, "'" + std::string(text::trim(hostname)) + "' is a public suffix");
    }
    return DomainPort{*match.registrable, port};
}

DomainAliasMap::DomainAliasMap(const std::map<std::string, std::string>& raw) {
    std::map<std::string, std::string> normalized;
    for (const auto& [alias, target] : raw) {
        auto a = normalize_domain(alias);
        auto t = normalize_domain(target);
        if (a.empty() || t.empty()) throw Error(Errc::ConfigError, "empty entry in domain alias map");
        if (a != t) normalized[a] = t;
    }
    for (const auto& [alias, target] : normalized) {
        std::string current = target;
        std::set<std::string> seen{alias};
        while (true) {
            auto it = normalized.find(current);
            if (it == normalized.end()) break;
            if (!seen.insert(current).second) {
                throw Error(Errc::ConfigError, "cycle in domain alias map at '" + alias + "'");
            }
            current = it->second;
        }
        map_[alias] = current;
    }
}

DomainAliasMap DomainAliasMap::parse(std::string_view tsv) {
    std::map<std::string, std::string> raw;
    std::size_t lineno = 0;
    for (auto line : text::split(tsv, '\n')) {
        ++lineno;
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto cols = text::split(t, '\t');
        if (cols.size() != 2) {
            throw Error(Errc::ConfigError, "domain alias map line " + std::to_string(lineno) + ": expected 2 columns");
        }
        raw[std::string(text::trim(cols[0]))] = std::string(text::trim(cols[1]));
    }
    return DomainAliasMap(raw);
}

DomainAliasMap DomainAliasMap::load(const std::filesystem::path& path) {
    return parse(text::read_file(path));
}

const std::string& DomainAliasMap::canonical(const std::string& domain) const {
    auto it = map_.find(domain);
    return it == map_.end() ? domain : it->second;
}

DomainPort merge_equivalent_domains(const DomainPort& domain, const DomainAliasMap& alias_map) {
    return DomainPort{alias_map.canonical(domain.base_domain), domain.port};
}

AdDomainList::AdDomainList(const std::set<std::string>& domains) {
    for (const auto& d : domains) {
        auto n = normalize_domain(d);
        if (!n.empty()) domains_.insert(std::move(n));
    }
}

AdDomainList AdDomainList::parse(std::string_view contents) {
    std::set<std::string> domains;
    for (auto line : text::split(contents, '\n')) {
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        domains.emplace(t);
    }
    return AdDomainList(domains);
}

AdDomainList AdDomainList::load(const std::filesystem::path& path) {
    return parse(text::read_file(path));
}

bool AdDomainList::contains(std::string_view domain) const {
    return domains_.find(domain) != domains_.end();
}

bool derive_talks_to_ads(const std::set<DomainPort>& domains, const AdDomainList& ad_list) {
    for (const auto& d : domains) {
        if (ad_list.contains(d.base_domain)) return true;
    }
    return false;
}

}  // namespace signet::preprocess
