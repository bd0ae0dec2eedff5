#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace signet::labeling {

/// Brand -> canonical parent organization. Lookup ignores case and
/// surrounding or repeated whitespace; chains are followed to their end so
/// every canonical name is a fixed point.
class VendorAliasStore {
public:
    enum class Source { file, live_endpoint_cache };

    VendorAliasStore() = default;
    /// Throws Error(ConfigError) on cycles or empty entries.
    explicit VendorAliasStore(const std::map<std::string, std::string>& raw, Source source = Source::file);

    /// Two columns, `alias<TAB>canonical`; '#' comments and blank lines skipped.
    static VendorAliasStore parse(std::string_view tsv, Source source = Source::file);
    static VendorAliasStore load(const std::filesystem::path& path, Source source = Source::file);

    /// Canonical parent, or `vendor` unchanged when unknown.
    std::string resolve(std::string_view vendor) const;
    bool contains(std::string_view vendor) const;

    /// Adds one mapping and re-resolves chains. Throws Error(ConfigError) on a cycle.
    void add(const std::string& alias, const std::string& canonical);

    Source source() const noexcept { return source_; }
    std::size_t size() const noexcept { return map_.size(); }
    /// alias (as first written) -> resolved canonical, sorted by folded alias.
    std::map<std::string, std::string> entries() const;
    std::string to_tsv() const;

private:
    void rebuild();

    // folded alias -> (alias as written, target as written)
    std::map<std::string, std::pair<std::string, std::string>> raw_;
    // folded alias -> resolved canonical display name
    std::map<std::string, std::string> map_;
    Source source_ = Source::file;
};

/// Case-folded, whitespace-collapsed lookup key.
std::string fold_vendor(std::string_view vendor);

/// Cache-through resolver for a Wikidata-style SPARQL endpoint. Lookups hit
/// the cache file first; misses query `endpoint` for the parent organization
/// (P749) of the entity labelled with the vendor name, append the answer to
/// the cache file, and fall back to identity on any transport failure.
class LiveAliasResolver {
public:
    LiveAliasResolver(std::string endpoint, std::filesystem::path cache_path,
                      std::chrono::seconds timeout = std::chrono::seconds(20));

    std::string resolve(const std::string& vendor);
    const VendorAliasStore& store() const noexcept { return store_; }
    /// Vendors whose endpoint query failed; they resolved to themselves.
    const std::set<std::string>& failures() const noexcept { return failures_; }

    static std::string sparql_query(const std::string& vendor);

private:
    std::string endpoint_;
    std::filesystem::path cache_path_;
    std::chrono::seconds timeout_;
    VendorAliasStore store_;
    std::set<std::string> negative_;
    std::set<std::string> failures_;
};

}  // namespace signet::labeling
