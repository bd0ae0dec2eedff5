#include "signet/labeling/ensemble.hpp"

#include <algorithm>
#include <future>

#include "signet/error.hpp"
#include "signet/labeling/response.hpp"
#include "signet/text.hpp"

namespace signet::labeling {

PseudoLabel ensemble_vote(const std::vector<PseudoLabel>& labels, const EnsembleWeights& weights,
                          const VendorAliasStore& store) {
    if (labels.empty()) throw Error(Errc::NoLabels, "no labels to vote on");
    bool positive = false;
    for (const auto& [model, w] : weights) {
        if (!(w >= 0.0)) throw Error(Errc::InvalidArgument, "negative weight for model " + model);
        positive = positive || w > 0.0;
    }
    if (!positive) throw Error(Errc::InvalidArgument, "ensemble weights need at least one positive weight");

    struct Tally {
        double sum = 0.0;
        const PseudoLabel* best = nullptr;
        double best_weight = -1.0;
    };
    std::map<std::string, Tally> tallies;
    for (const auto& l : labels) {
        if (l.device_id != labels.front().device_id) {
            throw Error(Errc::InvalidArgument, "labels for different devices in one vote");
        }
        auto w = weights.find(l.model_name);
        if (w == weights.end()) throw Error(Errc::MissingWeight, "no weight for model '" + l.model_name + "'");
        auto& t = tallies[store.resolve(text::squash_whitespace(l.vendor))];
        t.sum += w->second;
        if (w->second > t.best_weight || (w->second == t.best_weight && l.model_name < t.best->model_name)) {
            t.best = &l;
            t.best_weight = w->second;
        }
    }

    const std::pair<const std::string, Tally>* winner = nullptr;
    for (const auto& entry : tallies) {
        if (!winner || entry.second.sum > winner->second.sum ||
            (entry.second.sum == winner->second.sum && entry.second.best->model_name < winner->second.best->model_name)) {
            winner = &entry;
        }
    }
    PseudoLabel out = *winner->second.best;
    out.vendor = winner->first;
    out.model_name = kEnsembleModelName;
    return out;
}

EnsembleWeights cmi_weights(const Calibration& calibration, const preprocess::DeviceSignature& sig,
                            const std::vector<std::string>& models) {
    EnsembleWeights uniform;
    for (const auto& m : models) uniform[m] = 1.0;

    EnsembleWeights out;
    bool any_positive = false;
    for (const auto& m : models) {
        auto it = calibration.find(m);
        if (it == calibration.end()) return uniform;
        double sum = 0.0;
        int n = 0;
        for (const auto& score : it->second) {
            auto f = preprocess::feature_from_string(score.feature_name);
            if (!f || !score.proxy_cmi || !preprocess::has_feature(sig, *f)) continue;
            sum += std::max(0.0, *score.proxy_cmi);
            ++n;
        }
        if (n == 0) return uniform;
        out[m] = sum / n;
        any_positive = any_positive || out[m] > 0.0;
    }
    return any_positive ? out : uniform;
}

Calibration calibrate(const std::vector<preprocess::DeviceSignature>& signatures,
                      const std::vector<PseudoLabel>& labels, double alpha) {
    std::map<std::string, std::vector<PseudoLabel>> by_model;
    for (const auto& l : labels) by_model[l.model_name].push_back(l);
    Calibration out;
    for (const auto& [model, ls] : by_model) out[model] = attribution::rank_features(signatures, ls, alpha);
    return out;
}

nlohmann::json to_json(const LabelError& e) {
    return {{"device_id", e.device_id}, {"model_name", e.model_name}, {"code", e.code}, {"message", e.message}};
}

PseudoLabel label_device(const preprocess::DeviceSignature& sig, Predictor& backend, const PromptConfig& config,
                         const std::set<preprocess::Feature>& omit, const AugmentHook& hook) {
    PseudoLabel label;
    label.device_id = sig.device_id;
    label.model_name = backend.name();
    label.config = config;
    for (const auto& prompt : build_prompt(sig, config, omit, hook)) {
        auto raw = query_predictor(backend, prompt.text);
        auto parsed = parse_response(raw, config, prompt.target);
        if (!label.raw_response.empty()) label.raw_response += "\n";
        label.raw_response += raw;
        if (prompt.target == PromptTarget::type) {
            label.device_type = parsed.device_type;
            if (label.explanation.empty()) label.explanation = parsed.explanation;
        } else {
            label.vendor = parsed.vendor;
            label.explanation = parsed.explanation;
            if (parsed.device_type) label.device_type = parsed.device_type;
        }
    }
    return label;
}

namespace {

struct DeviceOutcome {
    std::vector<PseudoLabel> labels;
    std::vector<LabelError> errors;
};

DeviceOutcome run_device(const preprocess::DeviceSignature& sig, const std::vector<Predictor*>& backends,
                         const LabelingOptions& options) {
    DeviceOutcome out;
    for (auto* backend : backends) {
        try {
            out.labels.push_back(label_device(sig, *backend, options.config, options.omit, options.hook));
        } catch (const Error& e) {
            out.errors.push_back({sig.device_id, backend->name(), std::string(to_string(e.code())), e.what()});
        }
    }
    return out;
}

}  // namespace

LabelingResult label_dataset(const std::vector<preprocess::DeviceSignature>& signatures,
                             const std::vector<Predictor*>& backends, const LabelingOptions& options,
                             const std::function<EnsembleWeights(const preprocess::DeviceSignature&)>& weights_for,
                             const VendorAliasStore& store) {
    if (backends.empty()) throw Error(Errc::ConfigError, "no predictor backends configured");
    std::vector<const preprocess::DeviceSignature*> order;
    for (const auto& s : signatures) order.push_back(&s);
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->device_id < b->device_id; });

    std::vector<DeviceOutcome> outcomes(order.size());
    const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, order.size()));
    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) outcomes[i] = run_device(*order[i], backends, options);
    };
    if (jobs <= 1) {
        run_range(0, order.size());
    } else {
        std::vector<std::future<void>> tasks;
        const std::size_t chunk = (order.size() + jobs - 1) / jobs;
        for (std::size_t b = 0; b < order.size(); b += chunk) {
            tasks.push_back(std::async(std::launch::async, run_range, b, std::min(order.size(), b + chunk)));
        }
        for (auto& t : tasks) t.get();
    }

    LabelingResult result;
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto& o = outcomes[i];
        std::sort(o.labels.begin(), o.labels.end(),
                  [](const PseudoLabel& a, const PseudoLabel& b) { return a.model_name < b.model_name; });
        result.errors.insert(result.errors.end(), o.errors.begin(), o.errors.end());
        if (o.labels.empty()) {
            result.errors.push_back({order[i]->device_id, "*", "NoLabels", "every backend failed for this device"});
            continue;
        }
        EnsembleWeights weights;
        if (weights_for) {
            weights = weights_for(*order[i]);
        } else {
            for (auto* b : backends) weights[b->name()] = 1.0;
        }
        result.voted.push_back(ensemble_vote(o.labels, weights, store));
        result.per_model.insert(result.per_model.end(), o.labels.begin(), o.labels.end());
    }
    std::sort(result.errors.begin(), result.errors.end(), [](const LabelError& a, const LabelError& b) {
        return std::tie(a.device_id, a.model_name) < std::tie(b.device_id, b.model_name);
    });
    return result;
}

std::vector<PseudoLabel> vote_all(const std::vector<PseudoLabel>& per_model, const VendorAliasStore& store,
                                  const std::function<EnsembleWeights(const std::string&, const std::vector<std::string>&)>&
                                      weights_for) {
    std::map<std::string, std::vector<PseudoLabel>> groups;
    for (const auto& l : per_model) groups[l.device_id].push_back(l);
    std::vector<PseudoLabel> out;
    for (const auto& [device, labels] : groups) {
        std::vector<std::string> models;
        for (const auto& l : labels) models.push_back(l.model_name);
        EnsembleWeights weights;
        if (weights_for) {
            weights = weights_for(device, models);
        } else {
            for (const auto& m : models) weights[m] = 1.0;
        }
        out.push_back(ensemble_vote(labels, weights, store));
    }
    return out;
}

}  // namespace signet::labeling
