#include "signet/preprocess/public_suffix.hpp"

#include <cstdint>
#include <vector>

#include "signet/error.hpp"
#include "signet/text.hpp"

namespace signet::preprocess {

namespace {

std::vector<char32_t> decode_utf8(std::string_view s) {
    std::vector<char32_t> out;
    for (std::size_t i = 0; i < s.size();) {
        auto c = static_cast<unsigned char>(s[i]);
        char32_t cp = 0;
        std::size_t extra = 0;
        if (c < 0x80) {
            cp = c;
        } else if ((c >> 5) == 0x6) {
            cp = c & 0x1F;
            extra = 1;
        } else if ((c >> 4) == 0xE) {
            cp = c & 0x0F;
            extra = 2;
        } else if ((c >> 3) == 0x1E) {
            cp = c & 0x07;
            extra = 3;
        } else {
            throw Error(Errc::InvalidHostname, "invalid UTF-8 in hostname");
        }
        if (i + extra >= s.size()) {
            throw Error(Errc::InvalidHostname, "truncated UTF-8 in hostname");
        }
        for (std::size_t k = 1; k <= extra; ++k) {
            auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) throw Error(Errc::InvalidHostname, "invalid UTF-8 in hostname");
            cp = (cp << 6) | (cc & 0x3F);
        }
        out.push_back(cp);
        i += extra + 1;
    }
    return out;
}

// RFC 3492 parameters.
constexpr std::uint32_t kBase = 36, kTMin = 1, kTMax = 26, kSkew = 38, kDamp = 700;
constexpr std::uint32_t kInitialBias = 72, kInitialN = 128;

char encode_digit(std::uint32_t d) {
    return static_cast<char>(d < 26 ? 'a' + d : '0' + (d - 26));
}

std::uint32_t adapt(std::uint32_t delta, std::uint32_t num_points, bool first_time) {
    delta = first_time ? delta / kDamp : delta / 2;
    delta += delta / num_points;
    std::uint32_t k = 0;
    while (delta > ((kBase - kTMin) * kTMax) / 2) {
        delta /= kBase - kTMin;
        k += kBase;
    }
    return k + (kBase - kTMin + 1) * delta / (delta + kSkew);
}

std::string punycode_encode(const std::vector<char32_t>& input) {
    std::string out;
    for (char32_t c : input) {
        if (c < 0x80) out.push_back(static_cast<char>(c));
    }
    const auto basic = static_cast<std::uint32_t>(out.size());
    std::uint32_t handled = basic;
    if (basic > 0) out.push_back('-');

    std::uint32_t n = kInitialN, delta = 0, bias = kInitialBias;
    while (handled < input.size()) {
        std::uint32_t m = UINT32_MAX;
        for (char32_t c : input) {
            if (c >= n && c < m) m = c;
        }
        delta += (m - n) * (handled + 1);
        n = m;
        for (char32_t c : input) {
            if (c < n) ++delta;
            if (c == n) {
                std::uint32_t q = delta;
                for (std::uint32_t k = kBase;; k += kBase) {
                    std::uint32_t t = k <= bias ? kTMin : (k >= bias + kTMax ? kTMax : k - bias);
                    if (q < t) break;
                    out.push_back(encode_digit(t + (q - t) % (kBase - t)));
                    q = (q - t) / (kBase - t);
                }
                out.push_back(encode_digit(q));
                bias = adapt(delta, handled + 1, handled == basic);
                delta = 0;
                ++handled;
            }
        }
        ++delta;
        ++n;
    }
    return out;
}

std::vector<std::string> ace_labels(const std::vector<std::string_view>& labels) {
    std::vector<std::string> out;
    out.reserve(labels.size());
    for (auto l : labels) out.push_back(to_ace_label(l));
    return out;
}

std::string join_from(const std::vector<std::string>& labels, std::size_t start) {
    std::string out;
    for (std::size_t i = start; i < labels.size(); ++i) {
        if (i > start) out.push_back('.');
        out.append(labels[i]);
    }
    return out;
}

std::string ace_rule(std::string_view rule) {
    std::vector<std::string> parts;
    for (auto label : text::split(rule, '.')) {
        parts.push_back(label == "*" ? std::string("*") : to_ace_label(label));
    }
    return join_from(parts, 0);
}

}  // namespace

std::string to_ace_label(std::string_view utf8_label) {
    bool ascii = true;
    for (unsigned char c : utf8_label) {
        if (c >= 0x80) {
            ascii = false;
            break;
        }
    }
    if (ascii) return text::to_lower_ascii(utf8_label);
    return "xn--" + punycode_encode(decode_utf8(text::to_lower_ascii(utf8_label)));
}

PublicSuffixRules PublicSuffixRules::parse(std::string_view contents, Options options) {
    PublicSuffixRules rules;
    bool in_private = false;
    for (auto raw : text::split(contents, '\n')) {
        auto line = text::trim(raw);
        if (line.starts_with("//")) {
            if (line.find("===BEGIN PRIVATE DOMAINS===") != std::string_view::npos) in_private = true;
            if (line.find("===END PRIVATE DOMAINS===") != std::string_view::npos) in_private = false;
            continue;
        }
        if (line.empty()) continue;
        if (in_private && !options.include_private) continue;
        // Only the first whitespace-delimited token is the rule.
        auto end = line.find_first_of(" \t");
        auto rule = line.substr(0, end);
        std::string prefix;
        if (rule.starts_with('!')) {
            prefix = "!";
            rule.remove_prefix(1);
        }
        if (rule.empty()) continue;
        rules.rules_.insert(prefix + ace_rule(rule));
    }
    return rules;
}

PublicSuffixRules PublicSuffixRules::load(const std::filesystem::path& path, Options options) {
    return parse(text::read_file(path), options);
}

PublicSuffixRules::Match PublicSuffixRules::match(std::string_view hostname) const {
    std::string host = text::to_lower_ascii(text::trim(hostname));
    if (!host.empty() && host.back() == '.') host.pop_back();
    if (host.empty()) throw Error(Errc::InvalidHostname, "empty hostname");

    auto raw_labels = text::split(host, '.');
    for (auto l : raw_labels) {
        if (l.empty()) throw Error(Errc::InvalidHostname, "empty label in '" + host + "'");
    }
    const auto labels = ace_labels(raw_labels);
    const std::size_t n = labels.size();

    std::size_t suffix_len = 0;  // labels in the prevailing public suffix
    bool listed = false;
    bool exception = false;
    for (std::size_t i = 0; i < n && !exception; ++i) {
        const std::string candidate = join_from(labels, i);
        if (rules_.contains("!" + candidate)) {
            suffix_len = n - i - 1;
            listed = true;
            exception = true;
            break;
        }
        const std::size_t len = n - i;
        if (len > suffix_len && rules_.contains(candidate)) {
            suffix_len = len;
            listed = true;
        }
        if (i + 1 < n && len > suffix_len && rules_.contains("*." + join_from(labels, i + 1))) {
            suffix_len = len;
            listed = true;
        }
    }
    if (suffix_len == 0 && !exception) suffix_len = 1;

    std::vector<std::string> original;
    original.reserve(n);
    for (auto l : raw_labels) original.emplace_back(l);

    Match m;
    m.listed = listed;
    m.public_suffix = join_from(original, n - suffix_len);
    if (suffix_len < n) m.registrable = join_from(original, n - suffix_len - 1);
    return m;
}

}  // namespace signet::preprocess
