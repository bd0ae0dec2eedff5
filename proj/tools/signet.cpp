#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "signet/attribution/ranking.hpp"
#include "signet/emitter/emitter.hpp"
#include "signet/error.hpp"
#include "signet/evaluation/ablation.hpp"
#include "signet/evaluation/metrics.hpp"
#include "signet/evaluation/perturb.hpp"
#include "signet/evaluation/rubric.hpp"
#include "signet/labeling/alias.hpp"
#include "signet/labeling/ensemble.hpp"
#include "signet/labeling/predictor.hpp"
#include "signet/labeling/prompt.hpp"
#include "signet/preprocess/features.hpp"
#include "signet/preprocess/pipeline.hpp"
#include "signet/records.hpp"
#include "signet/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace signet;

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kDecode = 3, kNetwork = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const std::string& flag) {
    if (path.empty()) throw UsageError(flag + " is required");
    if (!fs::is_regular_file(path)) throw UsageError(flag + ": no such file: " + path);
}

void require_dir(const std::string& path, const std::string& flag) {
    if (!fs::is_directory(path)) throw UsageError(flag + ": no such directory: " + path);
}

// Buffers every output so nothing is written unless the command succeeds.
class Outputs {
public:
    std::ostream& open(const std::string& path) {
        auto& s = streams_[path];
        if (!s) s = std::make_unique<std::ostringstream>();
        return *s;
    }

    void commit() {
        for (auto& [path, s] : streams_) {
            if (path.empty() || path == "-") {
                std::cout << s->str();
                continue;
            }
            const fs::path p(path);
            if (p.has_parent_path()) fs::create_directories(p.parent_path());
            const fs::path tmp = p.string() + ".tmp";
            {
                std::ofstream f(tmp, std::ios::binary);
                if (!f) throw Error(Errc::ConfigError, "cannot write " + path);
                f << s->str();
            }
            fs::rename(tmp, p);
        }
    }

private:
    std::map<std::string, std::unique_ptr<std::ostringstream>> streams_;
};

std::vector<fs::path> as_paths(std::initializer_list<std::string> paths) {
    std::vector<fs::path> out;
    for (const auto& p : paths) {
        if (!p.empty()) out.emplace_back(p);
    }
    return out;
}

void write_records(std::ostream& out, const json& header, const std::vector<json>& records) {
    records::write_jsonl_line(out, header);
    for (const auto& r : records) records::write_jsonl_line(out, r);
}

std::vector<labeling::PseudoLabel> load_labels(const std::string& path) {
    std::vector<labeling::PseudoLabel> out;
    for (const auto& j : records::read_jsonl(path)) out.push_back(labeling::pseudo_label_from_json(j));
    return out;
}

std::map<std::string, std::string> load_references(const std::string& path) {
    std::map<std::string, std::string> refs;
    std::size_t n = 0;
    for (const auto& line : text::read_lines(path)) {
        ++n;
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw Error(Errc::DecodeError, path + ":" + std::to_string(n) + ": expected device_id<TAB>vendor");
        }
        refs[std::string(text::trim(std::string_view(line).substr(0, tab)))] =
            std::string(text::trim(std::string_view(line).substr(tab + 1)));
    }
    return refs;
}

labeling::VendorAliasStore load_store(const std::string& path) {
    if (path.empty()) return {};
    return labeling::VendorAliasStore::load(path);
}

std::size_t default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// Backends: stub rules from a file, or HTTP endpoints from the environment.
struct Backends {
    std::vector<std::unique_ptr<labeling::Predictor>> owned;
    std::vector<labeling::Predictor*> ptrs;
    std::vector<std::string> names;
};

struct BackendFlags {
    std::string stub;
    std::vector<std::string> models;
    double rps = 0.0;
    double burst = 1.0;
    int max_attempts = 4;
};

void add_backend_flags(CLI::App* cmd, BackendFlags& f) {
    cmd->add_option("--stub", f.stub, "Offline predictor rules (JSONL); no network access");
    cmd->add_option("--model", f.models, "Backend model names (repeatable)");
    cmd->add_option("--rps", f.rps, "Requests per second per backend (0 = unlimited)");
    cmd->add_option("--burst", f.burst, "Rate limiter burst size");
    cmd->add_option("--max-attempts", f.max_attempts, "HTTP attempts per request");
}

void check_backend_flags(const BackendFlags& f) {
    if (!f.stub.empty()) require_file(f.stub, "--stub");
    else if (f.models.empty()) throw UsageError("--model is required without --stub");
}

Backends make_backends(const BackendFlags& f) {
    Backends b;
    b.names = f.models;
    if (!f.stub.empty()) {
        if (b.names.empty()) b.names = labeling::StubPredictor::models_in(f.stub);
        if (b.names.empty()) throw Error(Errc::ConfigError, "stub file names no model");
        for (const auto& m : b.names) {
            b.owned.push_back(std::make_unique<labeling::StubPredictor>(labeling::StubPredictor::load(f.stub, m)));
        }
    } else {
        for (const auto& m : b.names) {
            auto cfg = labeling::HttpPredictorConfig::from_environment(m);
            cfg.requests_per_second = f.rps;
            cfg.burst = f.burst;
            cfg.max_attempts = f.max_attempts;
            b.owned.push_back(std::make_unique<labeling::HttpPredictor>(std::move(cfg)));
        }
    }
    for (auto& p : b.owned) b.ptrs.push_back(p.get());
    return b;
}

json backend_config(const BackendFlags& f, const Backends& b) {
    json j{{"models", b.names}, {"offline", !f.stub.empty()}};
    if (f.stub.empty()) j["rps"] = f.rps;
    return j;
}

std::vector<preprocess::Feature> parse_features(const std::vector<std::string>& names) {
    std::vector<preprocess::Feature> out;
    if (names.empty()) return {preprocess::kNativeFeatures.begin(), preprocess::kNativeFeatures.end()};
    for (const auto& n : names) {
        auto f = preprocess::feature_from_string(n);
        if (!f) throw UsageError("unknown feature: " + n);
        out.push_back(*f);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Device signature preprocessing, pseudo-labeling and evaluation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "signet 0.1.0");

    std::uint64_t seed = 0;
    std::size_t jobs = default_jobs();
    app.add_option("--seed", seed, "Seed recorded in every output header")->capture_default_str();
    app.add_option("--jobs", jobs, "Worker threads");

    Outputs outputs;

    // preprocess
    auto* pre = app.add_subcommand("preprocess", "Flows to canonical device signatures");
    std::vector<std::string> pre_in;
    std::string pre_psl, pre_aliases, pre_ads, pre_out = "-", pre_stats;
    bool icann_only = false;
    pre->add_option("--in", pre_in, "Flow records (JSONL), repeatable")->required();
    pre->add_option("--psl", pre_psl, "Public suffix list");
    pre->add_option("--aliases", pre_aliases, "Domain alias map (TSV)");
    pre->add_option("--ads", pre_ads, "Ad-domain list");
    pre->add_option("--out", pre_out, "Signatures output (JSONL)");
    pre->add_option("--stats", pre_stats, "Stage statistics output (JSON)");
    pre->add_flag("--psl-icann-only", icann_only, "Ignore the PRIVATE section of the PSL");

    // label
    auto* lab = app.add_subcommand("label", "Pseudo-label signatures with an LLM ensemble");
    BackendFlags lab_b;
    std::string lab_in, lab_out = "-", lab_voted, lab_errors, lab_aliases, lab_config = "Joint + CoT", lab_weights = "uniform",
                        lab_calib;
    std::vector<std::string> lab_omit;
    double lab_alpha = attribution::kDefaultAlpha;
    lab->add_option("--in", lab_in, "Signatures (JSONL)")->required();
    lab->add_option("--out", lab_out, "Per-model labels output");
    lab->add_option("--voted", lab_voted, "Ensemble labels output");
    lab->add_option("--errors", lab_errors, "Per-device error log output");
    lab->add_option("--aliases", lab_aliases, "Vendor alias store (TSV)");
    lab->add_option("--config", lab_config, "Prompt configuration, e.g. \"Joint + CoT + Ports\"");
    lab->add_option("--omit", lab_omit, "Features withheld from prompts");
    lab->add_option("--weights", lab_weights, "uniform or cmi")->check(CLI::IsMember({"uniform", "cmi"}));
    lab->add_option("--calibration", lab_calib, "Labels used to fit cmi weights");
    lab->add_option("--alpha", lab_alpha, "Proxy CMI alpha for cmi weights");
    add_backend_flags(lab, lab_b);

    // vote
    auto* vot = app.add_subcommand("vote", "Combine per-model labels");
    std::string vot_in, vot_out = "-", vot_aliases, vot_weights_file;
    vot->add_option("--in", vot_in, "Per-model labels (JSONL)")->required();
    vot->add_option("--out", vot_out, "Ensemble labels output");
    vot->add_option("--aliases", vot_aliases, "Vendor alias store (TSV)");
    vot->add_option("--weights", vot_weights_file, "model<TAB>weight file; uniform when absent");

    // attribute
    auto* att = app.add_subcommand("attribute", "Rank features by Proxy CMI");
    std::string att_sigs, att_labels, att_out, att_model;
    double att_alpha = attribution::kDefaultAlpha;
    att->add_option("--sigs", att_sigs, "Signatures (JSONL)")->required();
    att->add_option("--labels", att_labels, "Predictions (JSONL)")->required();
    att->add_option("--alpha", att_alpha, "Weight of stability")->capture_default_str();
    att->add_option("--model", att_model, "Only use labels from this model");
    att->add_option("--out", att_out, "Score records output (JSONL)");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Tiered accuracy, kappa and support buckets");
    std::string ev_labels, ev_refs, ev_rubric, ev_manual, ev_out, ev_model;
    ev->add_option("--labels", ev_labels, "Predictions (JSONL)")->required();
    ev->add_option("--references", ev_refs, "device_id<TAB>vendor")->required();
    ev->add_option("--rubric", ev_rubric, "Rubric directory")->required();
    ev->add_option("--manual", ev_manual, "Adjudications (TSV)");
    ev->add_option("--model", ev_model, "Only score labels from this model");
    ev->add_option("--out", ev_out, "Report records output (JSONL)");

    // ablate
    auto* abl = app.add_subcommand("ablate", "Leave-one-feature-out accuracy");
    BackendFlags abl_b;
    std::string abl_sigs, abl_refs, abl_rubric, abl_aliases, abl_out, abl_config = "Joint + CoT";
    std::vector<std::string> abl_features;
    abl->add_option("--sigs", abl_sigs, "Signatures (JSONL)")->required();
    abl->add_option("--references", abl_refs, "device_id<TAB>vendor")->required();
    abl->add_option("--rubric", abl_rubric, "Rubric directory")->required();
    abl->add_option("--aliases", abl_aliases, "Vendor alias store (TSV)");
    abl->add_option("--feature", abl_features, "Features to ablate (default: all native)");
    abl->add_option("--config", abl_config, "Prompt configuration");
    abl->add_option("--out", abl_out, "Ablation records output (JSONL)");
    add_backend_flags(abl, abl_b);

    // perturb
    auto* per = app.add_subcommand("perturb", "Adversarial perturbations and robustness");
    BackendFlags per_b;
    std::string per_sigs, per_out, per_report, per_decoys, per_refs, per_rubric, per_aliases, per_lexicon,
        per_config = "Joint + CoT";
    std::vector<std::string> per_kinds;
    per->add_option("--sigs", per_sigs, "Signatures (JSONL)")->required();
    per->add_option("--kind", per_kinds, "kind[:payload], repeatable")->required();
    per->add_option("--decoys", per_decoys, "Decoy domains for inject_token");
    per->add_option("--out", per_out, "Perturbed signatures output (JSONL)");
    per->add_option("--report", per_report, "Robustness records output (JSONL); needs a backend");
    per->add_option("--references", per_refs, "device_id<TAB>vendor");
    per->add_option("--rubric", per_rubric, "Rubric directory");
    per->add_option("--aliases", per_aliases, "Vendor alias store (TSV)");
    per->add_option("--lexicon", per_lexicon, "Known vendor names, one per line");
    per->add_option("--config", per_config, "Prompt configuration");
    add_backend_flags(per, per_b);

    // emit
    auto* emi = app.add_subcommand("emit", "Instruction-tuning pairs");
    std::string emi_sigs, emi_labels, emi_out = "-";
    double holdout = emitter::kDefaultHoldoutFraction;
    emi->add_option("--sigs", emi_sigs, "Signatures (JSONL)")->required();
    emi->add_option("--labels", emi_labels, "Ensemble labels (JSONL)")->required();
    emi->add_option("--holdout", holdout, "Holdout fraction")->capture_default_str();
    emi->add_option("--out", emi_out, "Instruction pairs output (JSONL)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*pre) {
            for (const auto& p : pre_in) require_file(p, "--in");
            require_file(pre_psl, "--psl");
            if (!pre_aliases.empty()) require_file(pre_aliases, "--aliases");
            if (!pre_ads.empty()) require_file(pre_ads, "--ads");

            preprocess::Resources res;
            res.psl = preprocess::PublicSuffixRules::load(pre_psl, {.include_private = !icann_only});
            if (!pre_aliases.empty()) res.domain_aliases = preprocess::DomainAliasMap::load(pre_aliases);
            if (!pre_ads.empty()) res.ad_domains = preprocess::AdDomainList::load(pre_ads);

            std::vector<fs::path> inputs(pre_in.begin(), pre_in.end());
            auto result = preprocess::run_pipeline(inputs, res, {.jobs = jobs});

            auto digests = inputs;
            for (const auto& p : {pre_psl, pre_aliases, pre_ads}) {
                if (!p.empty()) digests.emplace_back(p);
            }
            const json cfg{{"psl_icann_only", icann_only}};
            auto& out = outputs.open(pre_out);
            records::write_jsonl_line(out, records::make_header("preprocess", cfg, seed, digests));
            for (const auto& s : result.signatures) out << preprocess::serialize_signature(s) << '\n';

            const auto& st = result.stats;
            json stats{{"input_flows", st.input_flows},
                       {"decoded_flows", st.decoded_flows},
                       {"flows_after_hostname_filter", st.flows_after_hostname_filter},
                       {"canonical_rows", st.canonical_rows},
                       {"unique_devices", st.unique_devices},
                       {"per_stage_drop_counts", st.per_stage_drop_counts}};
            if (!pre_stats.empty()) outputs.open(pre_stats) << stats.dump(2) << '\n';
            outputs.commit();
            std::cerr << stats.dump() << '\n';
            return kOk;
        }

        if (*lab) {
            require_file(lab_in, "--in");
            check_backend_flags(lab_b);
            if (!lab_aliases.empty()) require_file(lab_aliases, "--aliases");
            if (lab_weights == "cmi") require_file(lab_calib, "--calibration");

            const auto sigs = preprocess::load_signatures(lab_in);
            const auto store = load_store(lab_aliases);
            auto backends = make_backends(lab_b);

            labeling::LabelingOptions opts;
            opts.config = labeling::PromptConfig::parse(lab_config);
            if (opts.config.search_augmented) throw UsageError("search-augmented prompts need a search hook");
            if (!lab_omit.empty()) {
                for (auto f : parse_features(lab_omit)) opts.omit.insert(f);
            }
            opts.jobs = jobs;

            std::function<labeling::EnsembleWeights(const preprocess::DeviceSignature&)> weights_for;
            labeling::Calibration calib;
            if (lab_weights == "cmi") {
                calib = labeling::calibrate(preprocess::load_signatures(lab_in), load_labels(lab_calib), lab_alpha);
                weights_for = [&](const preprocess::DeviceSignature& s) {
                    return labeling::cmi_weights(calib, s, backends.names);
                };
            } else {
                weights_for = [&](const preprocess::DeviceSignature&) {
                    labeling::EnsembleWeights w;
                    for (const auto& m : backends.names) w[m] = 1.0;
                    return w;
                };
            }

            auto result = labeling::label_dataset(sigs, backends.ptrs, opts, weights_for, store);

            json cfg = backend_config(lab_b, backends);
            cfg["prompt"] = labeling::to_json(opts.config);
            cfg["weights"] = lab_weights;
            std::vector<std::string> omit_names;
            for (auto f : opts.omit) omit_names.emplace_back(preprocess::to_string(f));
            cfg["omit"] = omit_names;
            const auto header = records::make_header("label", cfg, seed, as_paths({lab_in, lab_aliases, lab_calib}));

            std::vector<json> rows;
            for (const auto& l : result.per_model) rows.push_back(labeling::to_json(l));
            write_records(outputs.open(lab_out), header, rows);
            if (!lab_voted.empty()) {
                rows.clear();
                for (const auto& l : result.voted) rows.push_back(labeling::to_json(l));
                write_records(outputs.open(lab_voted), header, rows);
            }
            if (!lab_errors.empty()) {
                rows.clear();
                for (const auto& e : result.errors) rows.push_back(labeling::to_json(e));
                write_records(outputs.open(lab_errors), header, rows);
            }
            outputs.commit();
            for (const auto& e : result.errors) {
                std::cerr << "label error: " << e.device_id << " [" << e.model_name << "] " << e.message << '\n';
            }
            std::cerr << "labeled " << result.voted.size() << "/" << sigs.size() << " devices, "
                      << result.errors.size() << " errors\n";

            const bool network_exhausted =
                lab_b.stub.empty() && !sigs.empty() && result.voted.empty() &&
                std::any_of(result.errors.begin(), result.errors.end(), [](const labeling::LabelError& e) {
                    return e.code == to_string(Errc::TransportError) || e.code == to_string(Errc::RateLimited) ||
                           e.code == to_string(Errc::AuthError);
                });
            return network_exhausted ? kNetwork : kOk;
        }

        if (*vot) {
            require_file(vot_in, "--in");
            if (!vot_aliases.empty()) require_file(vot_aliases, "--aliases");
            if (!vot_weights_file.empty()) require_file(vot_weights_file, "--weights");
            const auto labels = load_labels(vot_in);
            const auto store = load_store(vot_aliases);
            std::map<std::string, double> fixed;
            if (!vot_weights_file.empty()) {
                for (const auto& [m, w] : load_references(vot_weights_file)) fixed[m] = std::stod(w);
            }
            auto voted = labeling::vote_all(labels, store, [&](const std::string&, const std::vector<std::string>& models) {
                labeling::EnsembleWeights w;
                for (const auto& m : models) {
                    if (fixed.empty()) w[m] = 1.0;
                    else if (auto it = fixed.find(m); it != fixed.end()) w[m] = it->second;
                }
                return w;
            });
            std::vector<json> rows;
            for (const auto& l : voted) rows.push_back(labeling::to_json(l));
            write_records(outputs.open(vot_out),
                          records::make_header("vote", json{{"weights", vot_weights_file.empty() ? "uniform" : "file"}},
                                               seed, as_paths({vot_in, vot_aliases, vot_weights_file})),
                          rows);
            outputs.commit();
            return kOk;
        }

        if (*att) {
            require_file(att_sigs, "--sigs");
            require_file(att_labels, "--labels");
            const auto sigs = preprocess::load_signatures(att_sigs);
            std::map<std::string, std::vector<labeling::PseudoLabel>> by_model;
            for (auto& l : load_labels(att_labels)) {
                if (att_model.empty() || l.model_name == att_model) by_model[l.model_name].push_back(std::move(l));
            }
            std::vector<json> rows;
            auto& tsv = outputs.open("-");
            for (const auto& [model, labels] : by_model) {
                const auto scores = attribution::rank_features(sigs, labels, att_alpha);
                for (const auto& s : scores) {
                    auto j = attribution::to_json(s);
                    j["model_name"] = model;
                    rows.push_back(std::move(j));
                }
                if (by_model.size() > 1) tsv << "# " << model << '\n';
                tsv << attribution::render_scores_tsv(scores);
                if (by_model.size() > 1) tsv << '\n';
            }
            if (!att_out.empty()) {
                write_records(outputs.open(att_out),
                              records::make_header("attribute", json{{"alpha", att_alpha}, {"model", att_model}}, seed,
                                                   as_paths({att_sigs, att_labels})),
                              rows);
            }
            outputs.commit();
            return kOk;
        }

        if (*ev) {
            require_file(ev_labels, "--labels");
            require_file(ev_refs, "--references");
            require_dir(ev_rubric, "--rubric");
            if (!ev_manual.empty()) require_file(ev_manual, "--manual");

            const auto rubric = evaluation::RubricConfig::load(
                ev_rubric, ev_manual.empty() ? std::nullopt : std::optional<fs::path>(ev_manual));
            const auto refs = load_references(ev_refs);
            std::vector<evaluation::LabeledPair> pairs;
            std::set<std::string> seen;
            for (const auto& l : load_labels(ev_labels)) {
                if (!ev_model.empty() && l.model_name != ev_model) continue;
                auto it = refs.find(l.device_id);
                if (it == refs.end()) continue;
                if (!seen.insert(l.device_id).second) {
                    throw Error(Errc::InvalidArgument, "several labels for " + l.device_id + "; pass --model");
                }
                pairs.push_back({l.device_id, l.vendor, it->second,
                                 ev_manual.empty() ? evaluation::ReferenceSource::pseudo
                                                   : evaluation::ReferenceSource::manual});
            }
            const auto acc = evaluation::tiered_accuracy(pairs, rubric);
            const auto kappa = evaluation::cohens_kappa(pairs);
            const auto buckets = evaluation::tier_partition(pairs, rubric);

            auto& tsv = outputs.open("-");
            tsv << evaluation::render_tiers_tsv(acc) << '\n'
                << "kappa\t" << text::format_fixed(kappa, 4) << "\n\n"
                << evaluation::render_breakdown_tsv(buckets);
            if (!ev_out.empty()) {
                std::vector<json> rows{
                    json{{"report", "tiers"}, {"value", evaluation::to_json(acc)}},
                    json{{"report", "kappa"}, {"value", kappa}},
                    json{{"report", "support_buckets"}, {"value", evaluation::to_json(buckets)}},
                };
                write_records(outputs.open(ev_out),
                              records::make_header("evaluate", json{{"model", ev_model}}, seed,
                                                   as_paths({ev_labels, ev_refs, ev_manual})),
                              rows);
            }
            outputs.commit();
            return kOk;
        }

        if (*abl) {
            require_file(abl_sigs, "--sigs");
            require_file(abl_refs, "--references");
            require_dir(abl_rubric, "--rubric");
            check_backend_flags(abl_b);
            if (!abl_aliases.empty()) require_file(abl_aliases, "--aliases");

            const auto sigs = preprocess::load_signatures(abl_sigs);
            const auto rubric = evaluation::RubricConfig::load(abl_rubric);
            const auto store = load_store(abl_aliases);
            const auto config = labeling::PromptConfig::parse(abl_config);
            auto backends = make_backends(abl_b);
            auto predict = evaluation::make_ensemble_predictor(backends.ptrs, config, store);
            const auto rows = evaluation::leave_one_out(sigs, predict, parse_features(abl_features),
                                                        load_references(abl_refs), rubric, config);
            if (!abl_out.empty()) {
                std::vector<json> recs;
                for (const auto& r : rows) recs.push_back(evaluation::to_json(r));
                json cfg = backend_config(abl_b, backends);
                cfg["prompt"] = labeling::to_json(config);
                write_records(outputs.open(abl_out),
                              records::make_header("ablate", cfg, seed, as_paths({abl_sigs, abl_refs, abl_aliases})),
                              recs);
            }
            outputs.open("-") << evaluation::render_ablation_tsv(rows);
            outputs.commit();
            return kOk;
        }

        if (*per) {
            require_file(per_sigs, "--sigs");
            if (!per_decoys.empty()) require_file(per_decoys, "--decoys");
            const bool robustness = !per_report.empty();
            if (robustness) {
                check_backend_flags(per_b);
                require_dir(per_rubric, "--rubric");
                if (!per_refs.empty()) require_file(per_refs, "--references");
                if (!per_aliases.empty()) require_file(per_aliases, "--aliases");
                if (!per_lexicon.empty()) require_file(per_lexicon, "--lexicon");
            }

            std::vector<evaluation::Perturbation> ps;
            for (const auto& k : per_kinds) ps.push_back(evaluation::parse_perturbation(k));
            std::vector<std::string> decoys;
            if (!per_decoys.empty()) {
                for (const auto& l : text::read_lines(per_decoys)) {
                    const auto t = text::trim(l);
                    if (!t.empty() && t.front() != '#') decoys.emplace_back(t);
                }
            }
            const auto sigs = preprocess::load_signatures(per_sigs);

            json cfg{{"kinds", per_kinds}};
            const auto header =
                records::make_header("perturb", cfg, seed, as_paths({per_sigs, per_decoys, per_refs, per_lexicon}));
            if (!per_out.empty()) {
                auto& out = outputs.open(per_out);
                records::write_jsonl_line(out, header);
                std::uint64_t skipped = 0;
                for (const auto& p : ps) {
                    for (std::size_t i = 0; i < sigs.size(); ++i) {
                        try {
                            auto s = evaluation::perturb(sigs[i], p, seed + i, decoys);
                            auto j = preprocess::signature_to_json(s);
                            j["perturbation"] = {{"kind", evaluation::to_string(p.kind)}, {"payload", p.payload}};
                            records::write_jsonl_line(out, j);
                        } catch (const Error& e) {
                            if (e.code() != Errc::NotApplicable) throw;
                            ++skipped;
                        }
                    }
                }
                std::cerr << "perturbations not applicable: " << skipped << '\n';
            }
            if (robustness) {
                const auto rubric = evaluation::RubricConfig::load(per_rubric);
                const auto store = load_store(per_aliases);
                const auto config = labeling::PromptConfig::parse(per_config);
                std::vector<std::string> lexicon;
                if (!per_lexicon.empty()) {
                    for (const auto& l : text::read_lines(per_lexicon)) {
                        const auto t = text::trim(l);
                        if (!t.empty() && t.front() != '#') lexicon.emplace_back(t);
                    }
                }
                auto backends = make_backends(per_b);
                auto predict = evaluation::make_ensemble_predictor(backends.ptrs, config, store);
                const auto refs = per_refs.empty() ? std::map<std::string, std::string>{} : load_references(per_refs);
                const auto rows =
                    evaluation::robustness_suite(sigs, ps, predict, rubric, refs, decoys, lexicon, seed);
                std::vector<json> recs;
                for (const auto& r : rows) recs.push_back(evaluation::to_json(r));
                write_records(outputs.open(per_report), header, recs);
                outputs.open("-") << evaluation::render_robustness_tsv(rows);
            }
            outputs.commit();
            return kOk;
        }

        if (*emi) {
            require_file(emi_sigs, "--sigs");
            require_file(emi_labels, "--labels");
            const auto pairs = emitter::emit_dataset(preprocess::load_signatures(emi_sigs), load_labels(emi_labels),
                                                     holdout, seed);
            std::vector<json> rows;
            for (const auto& p : pairs) rows.push_back(emitter::to_json(p));
            write_records(outputs.open(emi_out),
                          records::make_header("emit", json{{"holdout_fraction", holdout}}, seed,
                                               as_paths({emi_sigs, emi_labels})),
                          rows);
            outputs.commit();
            std::cerr << "emitted " << pairs.size() << " pairs\n";
            return kOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.code()) {
            case Errc::ConfigError:
            case Errc::MissingRubricComponent:
            case Errc::AlphaOutOfRange:
            case Errc::FractionOutOfRange:
                return kUsage;
            case Errc::DecodeError:
                return kDecode;
            case Errc::TransportError:
            case Errc::RateLimited:
            case Errc::AuthError:
                return kNetwork;
            default:
                return kFailure;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}
