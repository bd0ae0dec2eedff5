#include "signet/labeling/response.hpp"

#include <array>
#include <cctype>
#include <vector>

#include "json.hpp"

#include "signet/error.hpp"
#include "signet/text.hpp"

namespace signet::labeling {

namespace {

constexpr std::array<std::string_view, 3> kPlaceholders{"<explanation>", "<vendor>", "<type>"};
constexpr std::array<std::string_view, 7> kAbbreviations{"inc", "co", "corp", "ltd", "llc", "bv", "ag"};

std::size_t find_ci(std::string_view hay, std::string_view needle, std::size_t from = 0) {
    if (needle.size() > hay.size()) return std::string_view::npos;
    for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
        if (text::iequals(hay.substr(i, needle.size()), needle)) return i;
    }
    return std::string_view::npos;
}

// Strips markdown emphasis, quotes and a sentence-final period.
std::string clean_value(std::string_view raw) {
    std::string v(text::trim(raw));
    auto strip = [&v](std::string_view chars) {
        while (!v.empty() && chars.find(v.front()) != std::string_view::npos) v.erase(v.begin());
        while (!v.empty() && chars.find(v.back()) != std::string_view::npos) v.pop_back();
    };
    strip("*_`\"' \t");
    if (v.find("...") != std::string::npos || v.find("\xE2\x80\xA6") != std::string::npos) {
        throw Error(Errc::PlaceholderResponse, "response contains a '...' placeholder");
    }
    if (!v.empty() && v.back() == '.') {
        auto space = v.find_last_of(' ');
        auto last = text::to_lower_ascii(v.substr(space == std::string::npos ? 0 : space + 1));
        last.pop_back();
        bool abbrev = false;
        for (auto a : kAbbreviations) abbrev = abbrev || last == a;
        if (!abbrev) v.pop_back();
    }
    strip("*_`\"' \t,;");
    return text::squash_whitespace(v);
}

void check_placeholder_value(const std::string& v) {
    if (v == "..." || v.find("...") != std::string::npos) {
        throw Error(Errc::PlaceholderResponse, "response contains a '...' placeholder");
    }
}

// First balanced {...} object, honoring string literals.
std::optional<nlohmann::json> first_json_object(std::string_view s) {
    for (std::size_t start = s.find('{'); start != std::string_view::npos; start = s.find('{', start + 1)) {
        int depth = 0;
        bool in_str = false, esc = false;
        for (std::size_t i = start; i < s.size(); ++i) {
            char c = s[i];
            if (in_str) {
                if (esc) esc = false;
                else if (c == '\\') esc = true;
                else if (c == '"') in_str = false;
                continue;
            }
            if (c == '"') in_str = true;
            else if (c == '{') ++depth;
            else if (c == '}' && --depth == 0) {
                auto j = nlohmann::json::parse(s.substr(start, i - start + 1), nullptr, false);
                if (!j.is_discarded() && j.is_object()) return j;
                break;
            }
        }
    }
    return std::nullopt;
}

std::string fold_key(std::string_view k) {
    std::string out;
    for (char c : k) {
        if (c == ' ' || c == '_' || c == '-') continue;
        out.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
    }
    return out;
}

std::optional<ParsedResponse> from_json(const nlohmann::json& obj) {
    ParsedResponse r;
    bool any = false;
    for (const auto& [k, v] : obj.items()) {
        if (!v.is_string()) continue;
        const auto key = fold_key(k);
        const auto value = v.get<std::string>();
        if (key == "explanation" || key == "reasoning") {
            r.explanation = std::string(text::trim(value));
            any = true;
        } else if (key == "vendor" || key == "manufacturer") {
            r.vendor = clean_value(value);
            any = true;
        } else if (key == "devicetype" || key == "type") {
            auto t = clean_value(value);
            if (!t.empty()) r.device_type = t;
            any = true;
        }
    }
    if (!any) return std::nullopt;
    return r;
}

struct LabelHit {
    std::size_t pos;
    std::size_t value_begin;
};

// "<label>:" at a word boundary.
std::optional<LabelHit> find_label(std::string_view line, std::string_view label) {
    for (std::size_t p = find_ci(line, label); p != std::string_view::npos; p = find_ci(line, label, p + 1)) {
        if (p > 0 && std::isalnum(static_cast<unsigned char>(line[p - 1]))) continue;
        std::size_t q = p + label.size();
        while (q < line.size() && (line[q] == '*' || line[q] == ' ')) ++q;
        if (q < line.size() && line[q] == ':') {
            ++q;
            while (q < line.size() && line[q] == '*') ++q;
            return LabelHit{p, q};
        }
    }
    return std::nullopt;
}

std::optional<ParsedResponse> from_lines(std::string_view text, PromptTarget target) {
    const auto lines = text::split(text, '\n');
    const std::string_view primary = target == PromptTarget::type ? "Device Type" : "Vendor";

    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto hit = find_label(lines[i], primary);
        if (!hit) continue;
        ParsedResponse r;
        std::string_view line = lines[i];
        std::size_t prediction_begin = hit->pos;

        if (target == PromptTarget::type) {
            auto end = find_label(line.substr(hit->value_begin), "Vendor");
            auto value = line.substr(hit->value_begin, end ? end->pos : std::string_view::npos);
            auto t = clean_value(value);
            if (t.empty()) continue;
            r.device_type = t;
        } else {
            r.vendor = clean_value(line.substr(hit->value_begin));
            if (r.vendor.empty()) continue;
            if (auto type = find_label(line.substr(0, hit->pos), "Device Type")) {
                auto t = clean_value(line.substr(type->value_begin, hit->pos - type->value_begin));
                if (!t.empty()) r.device_type = t;
                prediction_begin = type->pos;
            } else if (i > 0) {
                auto prev = find_label(lines[i - 1], "Device Type");
                if (prev && text::trim(lines[i - 1].substr(0, prev->pos)).empty()) {
                    auto t = clean_value(lines[i - 1].substr(prev->value_begin));
                    if (!t.empty()) r.device_type = t;
                    --i;
                    line = lines[i];
                    prediction_begin = prev->pos;
                }
            }
        }

        std::string before;
        for (std::size_t k = 0; k < i; ++k) before += std::string(lines[k]) + "\n";
        before += std::string(line.substr(0, prediction_begin));
        if (auto ex = find_label(before, "Explanation")) before = before.substr(ex->value_begin);
        r.explanation = std::string(text::trim(before));
        while (!r.explanation.empty() && (r.explanation.back() == '*' || r.explanation.back() == ',')) {
            r.explanation.pop_back();
        }
        r.explanation = std::string(text::trim(r.explanation));
        return r;
    }
    return std::nullopt;
}

}  // namespace

ParsedResponse parse_response(std::string_view text, const PromptConfig& config, PromptTarget target) {
    for (auto p : kPlaceholders) {
        if (find_ci(text, p) != std::string_view::npos) {
            throw Error(Errc::PlaceholderResponse, "response echoes placeholder " + std::string(p));
        }
    }

    std::optional<ParsedResponse> parsed;
    const auto brace = text.find('{');
    const auto vendor_label = find_label(text, target == PromptTarget::type ? "Device Type" : "Vendor");
    if (brace != std::string_view::npos && (!vendor_label || brace < vendor_label->pos)) {
        if (auto obj = first_json_object(text)) parsed = from_json(*obj);
    }
    if (!parsed || (target == PromptTarget::type ? !parsed->device_type : parsed->vendor.empty())) {
        parsed = from_lines(text, target);
    }
    if (!parsed) throw Error(Errc::MalformedResponse, "no prediction found in response");

    if (target == PromptTarget::type) {
        if (!parsed->device_type) throw Error(Errc::MalformedResponse, "no device type in response");
    } else if (parsed->vendor.empty()) {
        throw Error(Errc::MalformedResponse, "no vendor in response");
    }
    check_placeholder_value(parsed->vendor);
    if (parsed->device_type) check_placeholder_value(*parsed->device_type);
    if (text::trim(parsed->explanation) == "...") throw Error(Errc::PlaceholderResponse, "placeholder explanation");
    if (config.cot && parsed->explanation.empty()) {
        throw Error(Errc::MalformedResponse, "chain-of-thought response without an explanation");
    }
    return *parsed;
}

std::string render_response(const PseudoLabel& label) {
    std::string out;
    if (!label.explanation.empty()) out += "Explanation: " + label.explanation + "\n";
    if (label.device_type) out += "Device Type: " + *label.device_type + ", ";
    out += "Vendor: " + label.vendor;
    return out;
}

}  // namespace signet::labeling
