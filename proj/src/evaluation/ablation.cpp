#include "signet/evaluation/ablation.hpp"

#include "signet/error.hpp"
#include "signet/labeling/prompt.hpp"
#include "signet/text.hpp"

namespace signet::evaluation {

PredictFn make_ensemble_predictor(std::vector<labeling::Predictor*> backends, labeling::PromptConfig config,
                                  const labeling::VendorAliasStore& store) {
    return [backends = std::move(backends), config, store](const preprocess::DeviceSignature& sig,
                                                             const std::set<preprocess::Feature>& omit) {
        std::vector<labeling::PseudoLabel> labels;
        labeling::EnsembleWeights weights;
        std::string last_error;
        for (auto* b : backends) {
            weights[b->name()] = 1.0;
            try {
                labels.push_back(labeling::label_device(sig, *b, config, omit));
            } catch (const Error& e) {
                last_error = e.what();
            }
        }
        if (labels.empty()) throw Error(Errc::NoLabels, "every backend failed: " + last_error);
        return labeling::ensemble_vote(labels, weights, store);
    };
}

std::vector<AblationRow> leave_one_out(const std::vector<preprocess::DeviceSignature>& signatures,
                                       const PredictFn& predict, const std::vector<preprocess::Feature>& features,
                                       const std::map<std::string, std::string>& references, const RubricConfig& rubric,
                                       const labeling::PromptConfig& config) {
    auto run = [&](const std::string& name, const std::set<preprocess::Feature>& omit) {
        AblationRow row;
        row.name = name;
        std::uint64_t correct = 0;
        for (const auto& sig : signatures) {
            auto ref = references.find(sig.device_id);
            if (ref == references.end()) continue;
            ++row.devices;
            for (auto f : omit) {
                const auto label = std::string(labeling::field_label(f)) + ":";
                try {
                    for (const auto& p : labeling::build_prompt(sig, config, omit)) {
                        if (p.text.find(label) != std::string::npos) ++row.label_leaks;
                    }
                } catch (const Error&) {
                }
            }
            try {
                auto label = predict(sig, omit);
                correct += tier_match({sig.device_id, label.vendor, ref->second, ReferenceSource::pseudo}, rubric).manual;
            } catch (const Error&) {
                ++row.failures;
            }
        }
        row.accuracy = row.devices ? static_cast<double>(correct) / static_cast<double>(row.devices) : 0.0;
        return row;
    };

    std::vector<AblationRow> rows{run(kBaselineRow, {})};
    for (auto f : features) {
        auto row = run(std::string(preprocess::to_string(f)), {f});
        row.delta = row.accuracy - rows.front().accuracy;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string render_ablation_tsv(const std::vector<AblationRow>& rows) {
    std::string out = "configuration\taccuracy\tdelta\tdevices\tfailures\tlabel_leaks\n";
    for (const auto& r : rows) {
        out += r.name + "\t" + text::format_fixed(100.0 * r.accuracy, 2) + "%\t" +
               (r.name == kBaselineRow ? std::string("-") : text::format_fixed(100.0 * r.delta, 2)) + "\t" +
               std::to_string(r.devices) + "\t" + std::to_string(r.failures) + "\t" + std::to_string(r.label_leaks) +
               "\n";
    }
    return out;
}

nlohmann::json to_json(const AblationRow& r) {
    return {{"configuration", r.name}, {"accuracy", r.accuracy}, {"delta", r.delta},
            {"devices", r.devices},    {"failures", r.failures}, {"label_leaks", r.label_leaks}};
}

}  // namespace signet::evaluation
