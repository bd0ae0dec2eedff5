#include "signet/evaluation/perturb.hpp"

#include <algorithm>
#include <cctype>
#include <random>

#include "signet/error.hpp"
#include "signet/labeling/prompt.hpp"
#include "signet/text.hpp"

namespace signet::evaluation {

using preprocess::DeviceSignature;
using preprocess::DomainPort;

namespace {

constexpr std::array<PerturbationKind, 6> kKinds{PerturbationKind::identity,        PerturbationKind::inject_token,
                                                 PerturbationKind::scramble_domain, PerturbationKind::swap_hostname,
                                                 PerturbationKind::spoof_user_label, PerturbationKind::spoof_dhcp_hostname};

[[noreturn]] void not_applicable(const DeviceSignature& sig, const std::string& why) {
    throw Error(Errc::NotApplicable, sig.device_id + ": " + why);
}

std::vector<std::string> base_domains(const DeviceSignature& sig) {
    std::vector<std::string> out;
    for (const auto& d : sig.remote_hostnames) {
        if (out.empty() || out.back() != d.base_domain) out.push_back(d.base_domain);
    }
    return out;
}

bool has_domain(const DeviceSignature& sig, const std::string& domain) {
    return std::any_of(sig.remote_hostnames.begin(), sig.remote_hostnames.end(),
                       [&](const DomainPort& d) { return d.base_domain == domain; });
}

std::vector<std::string> usable_decoys(const DeviceSignature& sig, const std::vector<std::string>& decoys) {
    std::vector<std::string> out;
    for (const auto& d : decoys) {
        auto t = text::to_lower_ascii(text::trim(d));
        if (!t.empty() && !has_domain(sig, t)) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void replace_domain(DeviceSignature& sig, const std::string& from, const std::string& to) {
    std::set<DomainPort> next;
    for (const auto& d : sig.remote_hostnames) next.insert(DomainPort{d.base_domain == from ? to : d.base_domain, d.port});
    sig.remote_hostnames = std::move(next);
}

bool word_match(const std::string& hay_lower, const std::string& needle_lower) {
    if (needle_lower.empty()) return false;
    for (auto p = hay_lower.find(needle_lower); p != std::string::npos; p = hay_lower.find(needle_lower, p + 1)) {
        const bool left = p == 0 || !std::isalnum(static_cast<unsigned char>(hay_lower[p - 1]));
        const auto e = p + needle_lower.size();
        const bool right = e >= hay_lower.size() || !std::isalnum(static_cast<unsigned char>(hay_lower[e]));
        if (left && right) return true;
    }
    return false;
}

}  // namespace

std::string_view to_string(PerturbationKind k) noexcept {
    switch (k) {
        case PerturbationKind::identity: return "identity";
        case PerturbationKind::inject_token: return "inject_token";
        case PerturbationKind::scramble_domain: return "scramble_domain";
        case PerturbationKind::swap_hostname: return "swap_hostname";
        case PerturbationKind::spoof_user_label: return "spoof_user_label";
        case PerturbationKind::spoof_dhcp_hostname: return "spoof_dhcp_hostname";
    }
    return "identity";
}

std::optional<PerturbationKind> perturbation_kind_from_string(std::string_view s) noexcept {
    for (auto k : kKinds) {
        if (text::trim(s) == to_string(k)) return k;
    }
    return std::nullopt;
}

Perturbation parse_perturbation(std::string_view spec) {
    auto colon = spec.find(':');
    auto kind = perturbation_kind_from_string(spec.substr(0, colon));
    if (!kind) throw Error(Errc::InvalidArgument, "unknown perturbation kind in '" + std::string(spec) + "'");
    return Perturbation{*kind, colon == std::string_view::npos ? std::string() : std::string(spec.substr(colon + 1))};
}

std::string scramble_domain(std::string_view domain, std::size_t i) {
    std::string out(domain);
    const auto label_end = out.find('.');
    const auto len = label_end == std::string::npos ? out.size() : label_end;
    if (i < 1 || i + 2 >= len) {
        throw Error(Errc::NotApplicable, "no interior position " + std::to_string(i) + " in '" + out + "'");
    }
    std::swap(out[i], out[i + 1]);
    return out;
}

DeviceSignature perturb(const DeviceSignature& sig, const Perturbation& p, std::uint64_t seed,
                        const std::vector<std::string>& decoys) {
    std::mt19937_64 rng(seed);
    auto pick = [&rng](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    DeviceSignature out = sig;
    const auto payload = std::string(text::trim(p.payload));

    switch (p.kind) {
        case PerturbationKind::identity:
            break;
        case PerturbationKind::inject_token: {
            DomainPort token;
            if (!payload.empty()) {
                token = DomainPort::parse(text::to_lower_ascii(payload));
            } else {
                auto pool = usable_decoys(sig, decoys);
                if (pool.empty()) not_applicable(sig, "no decoy domain to inject");
                token.base_domain = pool[pick(pool.size())];
            }
            if (has_domain(sig, token.base_domain)) not_applicable(sig, token.base_domain + " already present");
            out.remote_hostnames.insert(token);
            break;
        }
        case PerturbationKind::scramble_domain: {
            auto hash = payload.find('#');
            std::string domain = payload.substr(0, hash);
            auto domains = base_domains(sig);
            if (domains.empty()) not_applicable(sig, "no hostnames to scramble");
            if (domain.empty()) domain = domains[pick(domains.size())];
            if (!has_domain(sig, domain)) not_applicable(sig, domain + " not among hostnames");
            std::size_t index = 0;
            if (hash != std::string::npos) {
                const auto digits = payload.substr(hash + 1);
                if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
                    throw Error(Errc::InvalidArgument, "scramble index must be a number: '" + payload + "'");
                }
                index = static_cast<std::size_t>(std::stoul(digits));
            } else {
                const auto label_len = std::min(domain.find('.'), domain.size());
                std::vector<std::size_t> positions;
                for (std::size_t i = 1; i + 2 < label_len; ++i) {
                    if (domain[i] != domain[i + 1]) positions.push_back(i);
                }
                if (positions.empty()) not_applicable(sig, domain + " has no interior pair to transpose");
                index = positions[pick(positions.size())];
            }
            auto scrambled = scramble_domain(domain, index);
            if (scrambled == domain || has_domain(sig, scrambled)) not_applicable(sig, "scramble leaves " + domain + " unchanged");
            replace_domain(out, domain, scrambled);
            break;
        }
        case PerturbationKind::swap_hostname: {
            auto eq = payload.find('=');
            std::string target = eq == std::string::npos ? payload : payload.substr(0, eq);
            std::string decoy = eq == std::string::npos ? std::string() : payload.substr(eq + 1);
            auto domains = base_domains(sig);
            if (domains.empty()) not_applicable(sig, "no hostnames to swap");
            if (target.empty()) target = domains[pick(domains.size())];
            if (!has_domain(sig, target)) not_applicable(sig, target + " not among hostnames");
            if (decoy.empty()) {
                auto pool = usable_decoys(sig, decoys);
                if (pool.empty()) not_applicable(sig, "no decoy hostname available");
                decoy = pool[pick(pool.size())];
            }
            decoy = text::to_lower_ascii(decoy);
            if (has_domain(sig, decoy)) not_applicable(sig, decoy + " already present");
            replace_domain(out, target, decoy);
            break;
        }
        case PerturbationKind::spoof_user_label:
            out.user_labels = {payload.empty() ? std::string(kDefaultUserLabelDirective) : payload};
            break;
        case PerturbationKind::spoof_dhcp_hostname:
            out.dhcp_hostname = payload.empty() ? std::string(kDefaultDhcpSpoof) : payload;
            break;
    }
    return out;
}

bool hallucination_flag(const std::string& explanation, const std::string& rendered_input,
                        const std::string& predicted_vendor, const std::vector<std::string>& lexicon) {
    const auto ex = text::to_lower_ascii(explanation);
    const auto in = text::to_lower_ascii(rendered_input);
    const auto pred = text::to_lower_ascii(predicted_vendor);
    for (const auto& v : lexicon) {
        const auto name = text::to_lower_ascii(text::squash_whitespace(v));
        if (name.size() < 3 || !word_match(ex, name)) continue;
        if (word_match(in, name) || in.find(name) != std::string::npos || word_match(pred, name)) continue;
        return true;
    }
    return false;
}

std::vector<RobustnessRow> robustness_suite(const std::vector<DeviceSignature>& signatures,
                                            const std::vector<Perturbation>& perturbations, const PredictFn& predict,
                                            const RubricConfig& rubric,
                                            const std::map<std::string, std::string>& references,
                                            const std::vector<std::string>& decoys,
                                            const std::vector<std::string>& lexicon, std::uint64_t seed) {
    std::map<std::string, labeling::PseudoLabel> clean;
    for (const auto& sig : signatures) {
        try {
            clean.emplace(sig.device_id, predict(sig, {}));
        } catch (const Error&) {
        }
    }

    std::vector<RobustnessRow> rows;
    for (std::size_t k = 0; k < perturbations.size(); ++k) {
        const auto& p = perturbations[k];
        RobustnessRow row;
        row.kind = p.kind;
        for (std::size_t i = 0; i < signatures.size(); ++i) {
            const auto& sig = signatures[i];
            auto base = clean.find(sig.device_id);
            if (base == clean.end()) continue;
            DeviceSignature changed;
            try {
                changed = perturb(sig, p, seed + 1000003ULL * k + i, decoys);
            } catch (const Error& e) {
                if (e.code() == Errc::NotApplicable) continue;
                throw;
            }
            ++row.applicable;
            labeling::PseudoLabel label;
            try {
                label = predict(changed, {});
            } catch (const Error&) {
                ++row.failures;
                continue;
            }
            row.unchanged += tier_match({sig.device_id, label.vendor, base->second.vendor, ReferenceSource::pseudo}, rubric).brand;
            if (auto ref = references.find(sig.device_id); ref != references.end()) {
                ++row.with_reference;
                row.correct += tier_match({sig.device_id, label.vendor, ref->second, ReferenceSource::pseudo}, rubric).manual;
            }
            const auto rendered = labeling::render_fields(changed, true);
            row.hallucination_flags += hallucination_flag(label.explanation, rendered, label.vendor, lexicon);
        }
        rows.push_back(row);
    }
    return rows;
}

std::string render_robustness_tsv(const std::vector<RobustnessRow>& rows) {
    std::string out = "perturbation\tapplicable\tunchanged\tunchanged_fraction\tcorrect\twith_reference\tfailures\thallucination_flags\n";
    for (const auto& r : rows) {
        out += std::string(to_string(r.kind)) + "\t" + std::to_string(r.applicable) + "\t" + std::to_string(r.unchanged) +
               "\t" + text::format_fixed(r.unchanged_fraction(), 4) + "\t" + std::to_string(r.correct) + "\t" +
               std::to_string(r.with_reference) + "\t" + std::to_string(r.failures) + "\t" +
               std::to_string(r.hallucination_flags) + "\n";
    }
    return out;
}

nlohmann::json to_json(const RobustnessRow& r) {
    return {{"perturbation", std::string(to_string(r.kind))},
            {"applicable", r.applicable},
            {"unchanged", r.unchanged},
            {"unchanged_fraction", r.unchanged_fraction()},
            {"correct", r.correct},
            {"with_reference", r.with_reference},
            {"failures", r.failures},
            {"hallucination_flags", r.hallucination_flags}};
}

}  // namespace signet::evaluation
