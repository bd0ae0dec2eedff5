#include "signet/preprocess/user_agent.hpp"

#include <array>
#include <cctype>
#include <string>

#include "signet/text.hpp"

namespace signet::preprocess {

namespace {

// Matched against the lowercased token as a prefix.
constexpr std::array<std::string_view, 27> kOsPrefixes{
    "linux",   "android",  "windows", "win64",    "ubuntu",  "debian",  "fedora",
    "cros",    "tizen",    "webos",   "web0s",    "fireos",  "ios",     "iphone os",
    "cpu iphone os", "cpu os", "mac os x", "intel mac os x", "macos", "darwin",
    "freebsd", "kaios",    "harmonyos", "freertos", "openwrt", "roku os", "rtos",
};

constexpr std::array<std::string_view, 22> kBrowserNames{
    "mozilla", "applewebkit", "chrome",  "chromium", "safari",         "firefox",
    "gecko",   "edge",        "edg",     "opr",      "opera",          "version",
    "mobile",  "khtml",       "samsungbrowser", "crios", "fxios",      "silk",
    "amazonwebview", "webview", "wv",    "cobalt",
};

constexpr std::array<std::string_view, 33> kSdkNames{
    "okhttp",        "dalvik",       "cfnetwork",  "python-requests", "python-urllib",
    "python",        "curl",         "libcurl",    "wget",            "java",
    "go-http-client", "apache-httpclient", "exoplayer", "exoplayerlib", "upnp",
    "dlnadoc",       "alamofire",    "node-fetch", "axios",           "cpprest",
    "grpc-java",     "grpc-c",       "dart",       "unityplayer",     "restsharp",
    "volley",        "retrofit",     "esp8266httpclient", "esp32httpclient", "arduino",
    "lwip",          "qtnetwork",    "electron",
};

// Case-insensitive prefixes that identify device model designators.
constexpr std::array<std::string_view, 22> kModelPrefixes{
    "sm-",     "gt-",    "sgh-",       "sch-",    "shv-",   "lm-",   "pixel",   "nexus",
    "iphone",  "ipad",   "ipod",       "bravia",  "shield", "chromecast", "moto", "redmi",
    "oneplus", "huawei", "appletv",    "kindle",  "mitv",   "mibox",
};

std::string product_name(std::string_view value) {
    auto end = value.find_first_of("/ ");
    return text::to_lower_ascii(value.substr(0, end));
}

bool is_upper_alnum(std::string_view s) {
    for (char c : s) {
        if (!((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'))) return false;
    }
    return true;
}

// e.g. SM-G900A, KD-55X8000, LM-G710: 1-5 capitals, '-', then capitals,
// digits or hyphens including at least one digit.
bool looks_like_model_code(std::string_view v) {
    auto dash = v.find('-');
    if (dash == 0 || dash == std::string_view::npos || dash > 5) return false;
    for (std::size_t i = 0; i < dash; ++i) {
        if (v[i] < 'A' || v[i] > 'Z') return false;
    }
    bool digit = false;
    auto rest = v.substr(dash + 1);
    if (rest.empty()) return false;
    for (char c : rest) {
        if (c >= '0' && c <= '9') digit = true;
        else if (!((c >= 'A' && c <= 'Z') || c == '-')) return false;
    }
    return digit;
}

bool is_model(std::string_view value) {
    const auto lower = text::to_lower_ascii(value);
    for (auto p : kModelPrefixes) {
        if (lower.starts_with(p)) return true;
    }
    // Amazon Fire TV (AFTMM) and Kindle Fire (KFTT) codes.
    if (value.size() >= 4 && (value.starts_with("AFT") || value.starts_with("KF")) && is_upper_alnum(value)) {
        return true;
    }
    return looks_like_model_code(value);
}

std::string strip_build_suffix(std::string_view item) {
    std::string out;
    for (auto word : text::split(item, ' ')) {
        if (word.empty() || is_build_tag(word)) continue;
        if (!out.empty()) out.push_back(' ');
        out.append(word);
    }
    return out;
}

void add_token(std::set<UAToken>& out, std::string_view raw) {
    auto v = text::trim(raw);
    if (v.empty() || is_build_tag(v)) return;
    out.insert(UAToken{classify_ua_token(v), std::string(v)});
}

}  // namespace

bool is_build_tag(std::string_view token) {
    auto t = text::trim(token);
    if (t.size() >= 6 && text::iequals(t.substr(0, 6), "build/")) return true;
    if (t.size() < 7 || t.size() > 40) return false;
    bool digit = false, alpha = false;
    for (char c : t) {
        if (c >= '0' && c <= '9') digit = true;
        else if ((c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F')) alpha = true;
        else return false;
    }
    return digit && alpha;
}

UAKind classify_ua_token(std::string_view value) {
    const auto lower = text::to_lower_ascii(text::trim(value));
    const auto name = product_name(lower);
    for (auto p : kOsPrefixes) {
        if (lower.starts_with(p)) {
            // "ios" must not swallow words such as "iosapp"
            if (lower.size() == p.size() || !std::isalpha(static_cast<unsigned char>(lower[p.size()]))) {
                return UAKind::os;
            }
        }
    }
    for (auto b : kBrowserNames) {
        if (name == b) return UAKind::browser;
    }
    for (auto s : kSdkNames) {
        if (name == s) return UAKind::sdk;
    }
    if (name.starts_with("aws-sdk") || name.starts_with("grpc")) return UAKind::sdk;
    if (is_model(text::trim(value))) return UAKind::model;
    return UAKind::other;
}

std::set<UAToken> parse_user_agent(std::string_view ua) {
    std::set<UAToken> out;
    std::string outside;
    auto flush_outside = [&] {
        std::string word;
        for (char c : outside) {
            if (c == ';' || c == ' ' || c == '\t' || c == ',') {
                add_token(out, word);
                word.clear();
            } else {
                word.push_back(c);
            }
        }
        add_token(out, word);
        outside.clear();
    };

    for (std::size_t i = 0; i < ua.size(); ++i) {
        if (ua[i] != '(') {
            outside.push_back(ua[i]);
            continue;
        }
        flush_outside();
        int depth = 1;
        std::size_t j = i + 1;
        while (j < ua.size() && depth > 0) {
            if (ua[j] == '(') ++depth;
            if (ua[j] == ')') --depth;
            if (depth > 0) ++j;
        }
        auto comment = ua.substr(i + 1, j - i - 1);
        for (auto item : text::split(comment, ';')) {
            add_token(out, strip_build_suffix(text::squash_whitespace(item)));
        }
        i = j;
    }
    flush_outside();
    return out;
}

}  // namespace signet::preprocess
