#include "signet/attribution/ranking.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "signet/error.hpp"
#include "signet/text.hpp"

namespace signet::attribution {

namespace {

using preprocess::DeviceSignature;
using labeling::PseudoLabel;

// device_id -> vendor for the predictions that enter attribution
std::map<std::string, std::string> usable_predictions(const std::vector<PseudoLabel>& predictions) {
    std::map<std::string, std::string> out;
    for (const auto& p : predictions) {
        if (p.config.search_augmented) continue;
        if (!out.emplace(p.device_id, std::string(text::trim(p.vendor))).second) {
            throw Error(Errc::InvalidArgument, "two predictions for device " + p.device_id);
        }
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> pairs_for(const std::vector<DeviceSignature>& signatures,
                                                           const std::map<std::string, std::string>& vendors,
                                                           preprocess::Feature feature, std::uint64_t* devices) {
    std::vector<std::pair<std::string, std::string>> out;
    std::uint64_t n = 0;
    for (const auto& sig : signatures) {
        auto it = vendors.find(sig.device_id);
        if (it == vendors.end()) continue;
        auto values = preprocess::feature_values(sig, feature);
        if (values.empty()) continue;
        ++n;
        for (auto& v : values) out.emplace_back(std::move(v), it->second);
    }
    if (devices) *devices = n;
    return out;
}

std::string cell(const std::optional<double>& v) { return v ? text::format_fixed(*v, 4) : "NA"; }

}  // namespace

std::vector<std::pair<std::string, std::string>> feature_pairs(const std::vector<DeviceSignature>& signatures,
                                                               const std::vector<PseudoLabel>& predictions,
                                                               preprocess::Feature feature) {
    return pairs_for(signatures, usable_predictions(predictions), feature, nullptr);
}

std::vector<AttributionScore> rank_features(const std::vector<DeviceSignature>& signatures,
                                            const std::vector<PseudoLabel>& predictions, double alpha) {
    proxy_cmi(0.0, 0.0, alpha);  // validates alpha up front
    const auto vendors = usable_predictions(predictions);

    std::set<std::string> slice_labels;
    for (const auto& sig : signatures) {
        if (auto it = vendors.find(sig.device_id); it != vendors.end()) slice_labels.insert(it->second);
    }

    std::vector<AttributionScore> scores;
    for (auto feature : preprocess::kNativeFeatures) {
        AttributionScore s;
        s.feature_name = std::string(preprocess::to_string(feature));
        s.alpha = alpha;
        auto pairs = pairs_for(signatures, vendors, feature, &s.n_devices);
        s.n_samples = pairs.size();
        if (s.n_devices >= 2) {
            const auto table = ContingencyTable::from_pairs(pairs);
            const auto ami = adjusted_mi(table);
            s.ami = ami.value;
            s.ami_degenerate = ami.degenerate;
            s.stability = stability(table, slice_labels.size());
            s.proxy_cmi = proxy_cmi(*s.ami, *s.stability, alpha);
        }
        scores.push_back(std::move(s));
    }
    std::sort(scores.begin(), scores.end(), [](const AttributionScore& a, const AttributionScore& b) {
        if (a.proxy_cmi.has_value() != b.proxy_cmi.has_value()) return a.proxy_cmi.has_value();
        if (a.proxy_cmi && *a.proxy_cmi != *b.proxy_cmi) return *a.proxy_cmi > *b.proxy_cmi;
        return a.feature_name < b.feature_name;
    });
    return scores;
}

std::string render_scores_tsv(const std::vector<AttributionScore>& scores) {
    std::string out = "rank\tfeature\tproxy_cmi\tami\tstability\talpha\tn_devices\tn_samples\n";
    std::size_t rank = 0;
    for (const auto& s : scores) {
        out += std::to_string(++rank) + "\t" + s.feature_name + "\t" + cell(s.proxy_cmi) + "\t" + cell(s.ami) +
               (s.ami_degenerate ? "*" : "") + "\t" + cell(s.stability) + "\t" + text::format_fixed(s.alpha, 2) +
               "\t" + std::to_string(s.n_devices) + "\t" + std::to_string(s.n_samples) + "\n";
    }
    return out;
}

nlohmann::json to_json(const AttributionScore& s) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"feature", s.feature_name}, {"ami", opt(s.ami)},          {"stability", opt(s.stability)},
            {"proxy_cmi", opt(s.proxy_cmi)}, {"ami_degenerate", s.ami_degenerate}, {"alpha", s.alpha},
            {"n_samples", s.n_samples},      {"n_devices", s.n_devices}};
}

AttributionScore attribution_score_from_json(const nlohmann::json& j) {
    try {
        AttributionScore s;
        s.feature_name = j.at("feature").get<std::string>();
        auto opt = [&](const char* key) -> std::optional<double> {
            auto it = j.find(key);
            if (it == j.end() || it->is_null()) return std::nullopt;
            return it->get<double>();
        };
        s.ami = opt("ami");
        s.stability = opt("stability");
        s.proxy_cmi = opt("proxy_cmi");
        s.ami_degenerate = j.value("ami_degenerate", false);
        s.alpha = j.value("alpha", kDefaultAlpha);
        s.n_samples = j.value("n_samples", std::uint64_t{0});
        s.n_devices = j.value("n_devices", std::uint64_t{0});
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::DecodeError, std::string("attribution score record: ") + e.what());
    }
}

}  // namespace signet::attribution
