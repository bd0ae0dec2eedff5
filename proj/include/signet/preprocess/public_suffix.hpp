#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>

namespace signet::preprocess {

/// Rules from a public-suffix-list file (`//` comments, `*.` wildcards,
/// `!` exceptions). Unicode rules are stored in their punycode (ACE) form so
/// that both U-label and A-label hostnames match.
class PublicSuffixRules {
public:
    struct Options {
        bool include_private = true;
    };

    PublicSuffixRules() = default;

    static PublicSuffixRules parse(std::string_view contents, Options options);
    static PublicSuffixRules parse(std::string_view contents) { return parse(contents, Options{}); }
    static PublicSuffixRules load(const std::filesystem::path& path, Options options);
    static PublicSuffixRules load(const std::filesystem::path& path) { return load(path, Options{}); }

    struct Match {
        std::string public_suffix;
        std::optional<std::string> registrable;  // absent when host is itself a suffix
        bool listed = false;                     // false when only the implicit "*" rule applied
    };

    /// Lowercases and strips one trailing dot. Throws Error(InvalidHostname) on
    /// empty labels (leading dot, "a..b").
    Match match(std::string_view hostname) const;

    std::size_t size() const noexcept { return rules_.size(); }

private:
    // Stored verbatim with their "*." / "!" prefixes.
    std::unordered_set<std::string> rules_;
};

/// RFC 3492 punycode conversion of one label; ASCII labels are returned
/// unchanged, others as "xn--...".
std::string to_ace_label(std::string_view utf8_label);

}  // namespace signet::preprocess
