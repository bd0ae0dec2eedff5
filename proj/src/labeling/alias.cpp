#include "signet/labeling/alias.hpp"

#include <fstream>

#include "httplib.h"
#include "json.hpp"

#include "signet/error.hpp"
#include "signet/text.hpp"

namespace signet::labeling {

std::string fold_vendor(std::string_view vendor) { return text::to_lower_ascii(text::squash_whitespace(vendor)); }

VendorAliasStore::VendorAliasStore(const std::map<std::string, std::string>& raw, Source source) : source_(source) {
    for (const auto& [alias, target] : raw) {
        auto a = text::squash_whitespace(alias);
        auto t = text::squash_whitespace(target);
        if (a.empty() || t.empty()) throw Error(Errc::ConfigError, "empty entry in vendor alias store");
        raw_[fold_vendor(a)] = {a, t};
    }
    rebuild();
}

void VendorAliasStore::rebuild() {
    std::map<std::string, std::string> resolved;
    for (const auto& [key, entry] : raw_) {
        std::string current = entry.second;
        std::set<std::string> seen{key};
        while (true) {
            const auto k = fold_vendor(current);
            auto it = raw_.find(k);
            if (it == raw_.end() || k == fold_vendor(it->second.second)) {
                if (it != raw_.end()) current = it->second.second;
                break;
            }
            if (!seen.insert(k).second) throw Error(Errc::ConfigError, "cycle in vendor alias store at '" + entry.first + "'");
            current = it->second.second;
        }
        resolved[key] = current;
    }
    map_ = std::move(resolved);
}

VendorAliasStore VendorAliasStore::parse(std::string_view tsv, Source source) {
    std::map<std::string, std::string> raw;
    std::size_t lineno = 0;
    for (auto line : text::split(tsv, '\n')) {
        ++lineno;
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto cols = text::split(t, '\t');
        if (cols.size() != 2) {
            throw Error(Errc::ConfigError, "vendor alias line " + std::to_string(lineno) + ": expected 2 columns");
        }
        raw[std::string(text::trim(cols[0]))] = std::string(text::trim(cols[1]));
    }
    return VendorAliasStore(raw, source);
}

VendorAliasStore VendorAliasStore::load(const std::filesystem::path& path, Source source) {
    return parse(text::read_file(path), source);
}

std::string VendorAliasStore::resolve(std::string_view vendor) const {
    auto it = map_.find(fold_vendor(vendor));
    return it == map_.end() ? std::string(vendor) : it->second;
}

bool VendorAliasStore::contains(std::string_view vendor) const { return map_.count(fold_vendor(vendor)) > 0; }

void VendorAliasStore::add(const std::string& alias, const std::string& canonical) {
    auto a = text::squash_whitespace(alias);
    auto t = text::squash_whitespace(canonical);
    if (a.empty() || t.empty()) throw Error(Errc::ConfigError, "empty entry in vendor alias store");
    auto previous = raw_;
    raw_[fold_vendor(a)] = {a, t};
    try {
        rebuild();
    } catch (...) {
        raw_ = std::move(previous);
        rebuild();
        throw;
    }
}

std::map<std::string, std::string> VendorAliasStore::entries() const {
    std::map<std::string, std::string> out;
    for (const auto& [key, entry] : raw_) out[entry.first] = map_.at(key);
    return out;
}

std::string VendorAliasStore::to_tsv() const {
    std::string out;
    for (const auto& [key, entry] : raw_) out += entry.first + "\t" + entry.second + "\n";
    return out;
}

LiveAliasResolver::LiveAliasResolver(std::string endpoint, std::filesystem::path cache_path, std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), cache_path_(std::move(cache_path)), timeout_(timeout) {
    if (std::filesystem::exists(cache_path_)) {
        store_ = VendorAliasStore::load(cache_path_, VendorAliasStore::Source::live_endpoint_cache);
    } else {
        store_ = VendorAliasStore({}, VendorAliasStore::Source::live_endpoint_cache);
    }
}

std::string LiveAliasResolver::sparql_query(const std::string& vendor) {
    std::string escaped;
    for (char c : vendor) {
        if (c == '"' || c == '\\') escaped.push_back('\\');
        escaped.push_back(c);
    }
    return "SELECT ?parentLabel WHERE { ?item rdfs:label \"" + escaped +
           "\"@en; wdt:P749 ?parent. SERVICE wikibase:label { bd:serviceParam wikibase:language \"en\". } } LIMIT 1";
}

std::string LiveAliasResolver::resolve(const std::string& vendor) {
    const auto key = fold_vendor(vendor);
    if (store_.contains(vendor) || negative_.count(key)) return store_.resolve(vendor);

    auto scheme = endpoint_.find("://");
    auto slash = scheme == std::string::npos ? std::string::npos : endpoint_.find('/', scheme + 3);
    const std::string origin = endpoint_.substr(0, slash);
    const std::string path = slash == std::string::npos ? "/" : endpoint_.substr(slash);

    httplib::Client client(origin);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    httplib::Params params{{"query", sparql_query(text::squash_whitespace(vendor))}, {"format", "json"}};
    httplib::Headers headers{{"Accept", "application/sparql-results+json"}, {"User-Agent", "signet/1.0"}};
    auto res = client.Get(path, params, headers);
    if (!res || res->status != 200) {
        failures_.insert(vendor);
        return vendor;
    }
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    std::string parent;
    if (!j.is_discarded()) {
        auto bindings = j.value("/results/bindings"_json_pointer, nlohmann::json::array());
        if (!bindings.empty()) {
            parent = bindings.front().value("/parentLabel/value"_json_pointer, std::string());
        }
    }
    parent = text::squash_whitespace(parent);
    if (parent.empty() || fold_vendor(parent) == key) {
        negative_.insert(key);
        return vendor;
    }
    try {
        store_.add(vendor, parent);
    } catch (const Error&) {
        negative_.insert(key);
        return vendor;
    }
    std::ofstream out(cache_path_, std::ios::app | std::ios::binary);
    out << text::squash_whitespace(vendor) << '\t' << parent << '\n';
    return store_.resolve(vendor);
}

}  // namespace signet::labeling
