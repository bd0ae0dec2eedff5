#include "signet/preprocess/netdisco.hpp"

#include <array>
#include <utility>

#include "json.hpp"

#include "signet/text.hpp"

namespace signet::preprocess {

namespace {

constexpr std::array<std::pair<std::string_view, std::string_view>, 21> kKeyTable{{
    {"manufacturer", "manufacturer"}, {"mfr", "manufacturer"},
    {"mfg", "manufacturer"},          {"maker", "manufacturer"},
    {"vendor", "manufacturer"},       {"brand", "manufacturer"},
    {"model", "model"},               {"model_name", "model"},
    {"modelname", "model"},           {"md", "model"},
    {"product", "model"},             {"device_type", "device_type"},
    {"devicetype", "device_type"},    {"type", "device_type"},
    {"st", "device_type"},            {"nt", "device_type"},
    {"category", "device_type"},      {"friendly_name", "friendly_name"},
    {"friendlyname", "friendly_name"}, {"fn", "friendly_name"},
    {"name", "friendly_name"},
}};

constexpr std::array<std::string_view, 6> kVolatile{"serial", "uuid", "ip", "host", "mac", "port"};

std::string fold_key(std::string_view raw) {
    std::string k;
    for (char c : text::trim(raw)) {
        if (c == '-' || c == ' ' || c == '.') c = '_';
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        k.push_back(c);
    }
    return k;
}

bool is_volatile(const std::string& folded) {
    for (auto word : text::split(folded, '_')) {
        for (auto v : kVolatile) {
            if (word.starts_with(v)) return true;
        }
    }
    return false;
}

}  // namespace

std::string_view normalize_netdisco_key(std::string_view raw_key) {
    const auto folded = fold_key(raw_key);
    if (folded.empty() || is_volatile(folded)) return {};
    for (const auto& [from, to] : kKeyTable) {
        if (folded == from) return to;
    }
    return {};
}

NetdiscoMap parse_netdisco(const NetdiscoMap& blob) {
    // canonical key -> (priority, raw key, value); lower priority tuple wins
    std::map<std::string, std::pair<std::pair<int, std::string>, std::string>> best;
    for (const auto& [raw_key, raw_value] : blob) {
        auto key = normalize_netdisco_key(raw_key);
        if (key.empty()) continue;
        auto value = text::squash_whitespace(raw_value);
        if (value.empty() || text::is_ip_literal(value)) continue;
        std::pair<int, std::string> rank{fold_key(raw_key) == key ? 0 : 1, raw_key};
        auto it = best.find(std::string(key));
        if (it == best.end() || rank < it->second.first) {
            best[std::string(key)] = {std::move(rank), std::move(value)};
        }
    }
    NetdiscoMap out;
    for (auto& [key, entry] : best) out.emplace(key, std::move(entry.second));
    return out;
}

NetdiscoMap decode_netdisco_blob(std::string_view json_text) {
    NetdiscoMap out;
    auto doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded()) return out;
    if (doc.is_string()) {
        doc = nlohmann::json::parse(doc.get<std::string>(), nullptr, false);
        if (doc.is_discarded()) return out;
    }
    if (!doc.is_object()) return out;
    for (const auto& [k, v] : doc.items()) {
        if (v.is_string()) {
            out[k] = v.get<std::string>();
        } else if (v.is_number() || v.is_boolean()) {
            out[k] = v.dump();
        }
    }
    return out;
}

}  // namespace signet::preprocess
