#include "signet/labeling/types.hpp"

#include "signet/error.hpp"
#include "signet/text.hpp"

namespace signet::labeling {

std::string PromptConfig::name() const {
    std::string out = search_augmented ? "Brave" : (granularity == Granularity::joint ? "Joint" : "Separate");
    if (cot) out += " + CoT";
    if (include_ports) out += " + Ports";
    return out;
}

PromptConfig PromptConfig::parse(std::string_view name) {
    PromptConfig c;
    c.cot = false;
    bool have_base = false;
    for (auto part : text::split(name, '+')) {
        const auto word = text::to_lower_ascii(text::trim(part));
        if (word == "joint" || word == "separate" || word == "brave") {
            if (have_base) throw Error(Errc::ConfigError, "prompt config '" + std::string(name) + "' names two bases");
            have_base = true;
            c.granularity = word == "separate" ? Granularity::separate : Granularity::joint;
            c.search_augmented = word == "brave";
        } else if (word == "cot") {
            c.cot = true;
        } else if (word == "ports") {
            c.include_ports = true;
        } else {
            throw Error(Errc::ConfigError, "unknown prompt config component '" + word + "'");
        }
    }
    if (!have_base) throw Error(Errc::ConfigError, "prompt config '" + std::string(name) + "' lacks Joint/Separate/Brave");
    return c;
}

std::vector<PromptConfig> PromptConfig::ablation_grid() {
    std::vector<PromptConfig> out;
    for (int base = 0; base < 3; ++base) {
        for (bool ports : {false, true}) {
            for (bool cot : {false, true}) {
                PromptConfig c;
                c.granularity = base == 0 ? Granularity::separate : Granularity::joint;
                c.search_augmented = base == 2;
                c.cot = cot;
                c.include_ports = ports;
                out.push_back(c);
            }
        }
    }
    return out;
}

nlohmann::json to_json(const PromptConfig& c) {
    return {{"granularity", c.granularity == Granularity::joint ? "joint" : "separate"},
            {"cot", c.cot},
            {"include_ports", c.include_ports},
            {"search_augmented", c.search_augmented}};
}

PromptConfig prompt_config_from_json(const nlohmann::json& j) {
    if (j.is_string()) return PromptConfig::parse(j.get<std::string>());
    if (!j.is_object()) throw Error(Errc::DecodeError, "prompt config must be an object or a name");
    PromptConfig c;
    const auto g = j.value("granularity", std::string("joint"));
    if (g != "joint" && g != "separate") throw Error(Errc::DecodeError, "bad granularity '" + g + "'");
    c.granularity = g == "joint" ? Granularity::joint : Granularity::separate;
    c.cot = j.value("cot", true);
    c.include_ports = j.value("include_ports", false);
    c.search_augmented = j.value("search_augmented", false);
    return c;
}

nlohmann::json to_json(const PseudoLabel& l) {
    nlohmann::json j{{"device_id", l.device_id},
                     {"explanation", l.explanation},
                     {"vendor", l.vendor},
                     {"model_name", l.model_name},
                     {"config", to_json(l.config)},
                     {"raw_response", l.raw_response}};
    j["device_type"] = l.device_type ? nlohmann::json(*l.device_type) : nlohmann::json(nullptr);
    return j;
}

PseudoLabel pseudo_label_from_json(const nlohmann::json& j) {
    try {
        PseudoLabel l;
        l.device_id = j.at("device_id").get<std::string>();
        l.vendor = j.at("vendor").get<std::string>();
        l.explanation = j.value("explanation", std::string());
        if (auto it = j.find("device_type"); it != j.end() && it->is_string()) l.device_type = it->get<std::string>();
        l.model_name = j.value("model_name", std::string());
        if (auto it = j.find("config"); it != j.end()) l.config = prompt_config_from_json(*it);
        l.raw_response = j.value("raw_response", std::string());
        if (l.device_id.empty()) throw Error(Errc::DecodeError, "pseudo-label without device_id");
        if (text::trim(l.vendor).empty()) throw Error(Errc::DecodeError, "pseudo-label for " + l.device_id + " has empty vendor");
        return l;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::DecodeError, std::string("pseudo-label record: ") + e.what());
    }
}

}  // namespace signet::labeling
