#include "signet/preprocess/signature.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <utility>

#include "signet/error.hpp"
#include "signet/preprocess/netdisco.hpp"
#include "signet/preprocess/user_agent.hpp"
#include "signet/records.hpp"
#include "signet/text.hpp"

namespace signet::preprocess {

namespace {

std::optional<std::string> clean_text(const std::optional<std::string>& s) {
    if (!s) return std::nullopt;
    auto v = text::squash_whitespace(*s);
    if (v.empty()) return std::nullopt;
    return v;
}

std::optional<std::string> most_frequent(const std::map<std::string, std::size_t>& counts) {
    std::optional<std::string> best;
    std::size_t best_count = 0;
    for (const auto& [value, count] : counts) {  // map order gives the lexicographic tie-break
        if (count > best_count) {
            best = value;
            best_count = count;
        }
    }
    return best;
}

std::optional<std::string> opt_string(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw Error(Errc::DecodeError, std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

nlohmann::json opt_json(const std::optional<std::string>& s) {
    return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
}

}  // namespace

bool CanonicalRow::empty() const noexcept {
    return !domain && !oui_friendly && !dhcp_hostname && user_agent_tokens.empty() && netdisco.empty() &&
           !user_label;
}

namespace {

struct Tables {
    const PublicSuffixRules& psl;
    const DomainAliasMap& domain_aliases;
    const AdDomainList& ad_domains;
};

RowOutcome canonicalize_flow_impl(const FlowRecord& flow, const Tables& res) {
    RowOutcome out;
    out.had_fields = flow.remote_hostname || flow.user_label || flow.oui_friendly || flow.dhcp_hostname ||
                     flow.user_agent_info || flow.netdisco_info;

    if (flow.remote_hostname) {
        out.hostname_drop = classify_hostname(*flow.remote_hostname);
        if (out.hostname_drop == HostnameDrop::none) {
            try {
                auto base = extract_base_domain(*flow.remote_hostname, flow.remote_port, res.psl);
                out.row.domain = merge_equivalent_domains(base, res.domain_aliases);
            } catch (const Error&) {
                out.hostname_rejected_by_psl = true;
            }
        }
    }
    out.row.oui_friendly = clean_text(flow.oui_friendly);
    out.row.dhcp_hostname = clean_text(flow.dhcp_hostname);
    if (flow.user_agent_info) out.row.user_agent_tokens = parse_user_agent(*flow.user_agent_info);
    if (flow.netdisco_info) out.row.netdisco = parse_netdisco(*flow.netdisco_info);
    out.row.user_label = clean_text(flow.user_label);
    return out;
}

DeviceSignature canonicalize_device_impl(std::span<const FlowRecord> flows, const Tables& res) {
    if (flows.empty()) throw Error(Errc::EmptyInput, "no flows for device");
    DeviceSignature sig;
    sig.device_id = flows.front().device_id;

    std::map<std::string, std::size_t> oui_counts, dhcp_counts;
    std::map<std::string, std::set<std::string>> netdisco_values;
    std::vector<std::pair<std::int64_t, std::string>> labels;

    for (const auto& flow : flows) {
        if (flow.device_id != sig.device_id) {
            throw Error(Errc::InvalidArgument, "mixed device ids '" + sig.device_id + "' and '" + flow.device_id + "'");
        }
        auto row = canonicalize_flow_impl(flow, res).row;
        if (row.domain) sig.remote_hostnames.insert(*row.domain);
        if (row.oui_friendly) ++oui_counts[*row.oui_friendly];
        if (row.dhcp_hostname) ++dhcp_counts[*row.dhcp_hostname];
        sig.user_agent_tokens.insert(row.user_agent_tokens.begin(), row.user_agent_tokens.end());
        for (auto& [k, v] : row.netdisco) {
            // re-expanded signatures carry already-joined values
            for (auto part : text::split(v, '|')) {
                auto p = text::trim(part);
                if (!p.empty()) netdisco_values[k].emplace(p);
            }
        }
        if (row.user_label) labels.emplace_back(flow.timestamp, *row.user_label);
    }

    sig.oui_friendly = most_frequent(oui_counts);
    sig.dhcp_hostname = most_frequent(dhcp_counts);
    for (const auto& [k, values] : netdisco_values) {
        sig.netdisco_identifiers[k] = text::join(std::vector<std::string>(values.begin(), values.end()), " | ");
    }
    std::sort(labels.begin(), labels.end());
    std::set<std::string> seen;
    for (auto& [ts, label] : labels) {
        if (seen.insert(label).second) sig.user_labels.push_back(std::move(label));
    }
    sig.talks_to_ads = derive_talks_to_ads(sig.remote_hostnames, res.ad_domains);
    return sig;
}

}  // namespace

RowOutcome canonicalize_flow(const FlowRecord& flow, const Resources& res) {
    return canonicalize_flow_impl(flow, Tables{res.psl, res.domain_aliases, res.ad_domains});
}

DeviceSignature canonicalize_device(std::span<const FlowRecord> flows, const Resources& res) {
    return canonicalize_device_impl(flows, Tables{res.psl, res.domain_aliases, res.ad_domains});
}

DeviceSignature canonicalize_device(std::span<const FlowRecord> flows, const PublicSuffixRules& psl,
                                    const DomainAliasMap& alias_map, const AdDomainList& ad_list) {
    return canonicalize_device_impl(flows, Tables{psl, alias_map, ad_list});
}

std::vector<FlowRecord> signature_as_flows(const DeviceSignature& sig) {
    std::vector<FlowRecord> flows;
    auto base = [&] {
        FlowRecord f;
        f.device_id = sig.device_id;
        return f;
    };
    for (const auto& d : sig.remote_hostnames) {
        auto f = base();
        f.remote_hostname = d.base_domain;
        f.remote_port = d.port;
        flows.push_back(std::move(f));
    }
    for (const auto& t : sig.user_agent_tokens) {
        auto f = base();
        f.user_agent_info = "(" + t.value + ")";
        flows.push_back(std::move(f));
    }
    if (sig.oui_friendly || sig.dhcp_hostname || !sig.netdisco_identifiers.empty()) {
        auto f = base();
        f.oui_friendly = sig.oui_friendly;
        f.dhcp_hostname = sig.dhcp_hostname;
        if (!sig.netdisco_identifiers.empty()) f.netdisco_info = sig.netdisco_identifiers;
        flows.push_back(std::move(f));
    }
    std::int64_t ts = 0;
    for (const auto& label : sig.user_labels) {
        auto f = base();
        f.timestamp = ts++;
        f.user_label = label;
        flows.push_back(std::move(f));
    }
    if (flows.empty()) flows.push_back(base());
    return flows;
}

FlowRecord flow_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(Errc::DecodeError, "flow record is not an object");
    FlowRecord f;
    auto id = opt_string(j, "device_id");
    if (!id || text::trim(*id).empty()) throw Error(Errc::DecodeError, "missing device_id");
    f.device_id = *id;

    auto ts = j.find("ts");
    if (ts == j.end() || !ts->is_number_integer()) throw Error(Errc::DecodeError, "missing or non-integer ts");
    f.timestamp = ts->get<std::int64_t>();

    f.remote_hostname = opt_string(j, "remote_hostname");
    if (auto p = j.find("remote_port"); p != j.end() && !p->is_null()) {
        if (!p->is_number_integer()) throw Error(Errc::DecodeError, "remote_port must be an integer");
        auto v = p->get<std::int64_t>();
        if (v < 0 || v > 65535) throw Error(Errc::DecodeError, "remote_port out of range");
        f.remote_port = static_cast<std::uint16_t>(v);
    }
    if (f.remote_port && !f.remote_hostname) throw Error(Errc::DecodeError, "remote_port without remote_hostname");
    f.user_label = opt_string(j, "user_label");
    f.oui_friendly = opt_string(j, "oui_friendly");
    f.dhcp_hostname = opt_string(j, "dhcp_hostname");
    f.user_agent_info = opt_string(j, "user_agent_info");
    if (auto n = j.find("netdisco_info"); n != j.end() && !n->is_null()) {
        f.netdisco_info = decode_netdisco_blob(n->dump());
    }
    return f;
}

nlohmann::json flow_to_json(const FlowRecord& flow) {
    nlohmann::json j;
    j["device_id"] = flow.device_id;
    j["ts"] = flow.timestamp;
    j["remote_hostname"] = opt_json(flow.remote_hostname);
    j["remote_port"] = flow.remote_port ? nlohmann::json(*flow.remote_port) : nlohmann::json(nullptr);
    j["user_label"] = opt_json(flow.user_label);
    j["oui_friendly"] = opt_json(flow.oui_friendly);
    j["dhcp_hostname"] = opt_json(flow.dhcp_hostname);
    j["user_agent_info"] = opt_json(flow.user_agent_info);
    j["netdisco_info"] = flow.netdisco_info ? nlohmann::json(*flow.netdisco_info) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json signature_to_json(const DeviceSignature& sig) {
    nlohmann::json j;
    j["device_id"] = sig.device_id;
    j["oui_friendly"] = opt_json(sig.oui_friendly);
    j["dhcp_hostname"] = opt_json(sig.dhcp_hostname);
    auto hosts = nlohmann::json::array();
    for (const auto& d : sig.remote_hostnames) hosts.push_back(d.to_string());
    j["remote_hostnames"] = std::move(hosts);
    auto ua = nlohmann::json::array();
    for (const auto& t : sig.user_agent_tokens) ua.push_back({{"kind", to_string(t.kind)}, {"value", t.value}});
    j["user_agent_tokens"] = std::move(ua);
    j["netdisco_identifiers"] = sig.netdisco_identifiers.empty() ? nlohmann::json::object()
                                                                 : nlohmann::json(sig.netdisco_identifiers);
    j["user_labels"] = sig.user_labels;
    j["talks_to_ads"] = sig.talks_to_ads;
    return j;
}

DeviceSignature signature_from_json(const nlohmann::json& j) {
    try {
        DeviceSignature sig;
        sig.device_id = j.at("device_id").get<std::string>();
        sig.oui_friendly = opt_string(j, "oui_friendly");
        sig.dhcp_hostname = opt_string(j, "dhcp_hostname");
        for (const auto& h : j.value("remote_hostnames", nlohmann::json::array())) {
            sig.remote_hostnames.insert(DomainPort::parse(h.get<std::string>()));
        }
        for (const auto& t : j.value("user_agent_tokens", nlohmann::json::array())) {
            auto kind = ua_kind_from_string(t.at("kind").get<std::string>());
            if (!kind) throw Error(Errc::DecodeError, "unknown user-agent token kind");
            sig.user_agent_tokens.insert(UAToken{*kind, t.at("value").get<std::string>()});
        }
        if (auto nd = j.find("netdisco_identifiers"); nd != j.end() && nd->is_object()) {
            sig.netdisco_identifiers = nd->get<NetdiscoMap>();
        }
        sig.user_labels = j.value("user_labels", std::vector<std::string>{});
        sig.talks_to_ads = j.value("talks_to_ads", false);
        return sig;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::DecodeError, std::string("bad signature record: ") + e.what());
    }
}

std::string serialize_signature(const DeviceSignature& sig) {
    return signature_to_json(sig).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::vector<DeviceSignature> load_signatures(const std::filesystem::path& path) {
    std::vector<DeviceSignature> out;
    for (const auto& j : records::read_jsonl(path)) out.push_back(signature_from_json(j));
    return out;
}

}  // namespace signet::preprocess
