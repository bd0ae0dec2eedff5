#include "signet/emitter/emitter.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "signet/error.hpp"
#include "signet/labeling/prompt.hpp"
#include "signet/labeling/response.hpp"
#include "signet/text.hpp"

namespace signet::emitter {

namespace {

void shuffle(std::vector<std::string>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[static_cast<std::size_t>(rng() % i)]);
    }
}

std::size_t holdout_size(double fraction, std::size_t n) {
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

// Byte offset of the code point at index `cp`.
std::size_t byte_offset(std::string_view s, std::size_t cp) {
    std::size_t seen = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
            if (seen == cp) return i;
            ++seen;
        }
    }
    return s.size();
}

}  // namespace

std::string_view to_string(Phase p) noexcept { return p == Phase::I ? "I" : "II"; }
std::string_view to_string(Split s) noexcept { return s == Split::train ? "train" : "holdout"; }

std::vector<preprocess::DeviceSignature> select_high_signal(const std::vector<preprocess::DeviceSignature>& signatures) {
    std::vector<preprocess::DeviceSignature> out;
    std::copy_if(signatures.begin(), signatures.end(), std::back_inserter(out),
                 [](const auto& s) { return !s.remote_hostnames.empty(); });
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.device_id < b.device_id; });
    return out;
}

SplitAssignment make_splits(const std::vector<preprocess::DeviceSignature>& signatures, double fraction,
                            std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw Error(Errc::FractionOutOfRange, "holdout fraction must lie strictly between 0 and 1");
    }
    std::set<std::string> all_ids, high_ids;
    for (const auto& s : signatures) {
        all_ids.insert(s.device_id);
        if (!s.remote_hostnames.empty()) high_ids.insert(s.device_id);
    }
    std::mt19937_64 rng(seed);

    SplitAssignment out;
    std::vector<std::string> high(high_ids.begin(), high_ids.end());
    shuffle(high, rng);
    const auto h1 = holdout_size(fraction, high.size());
    std::set<std::string> holdout1(high.begin(), high.begin() + static_cast<std::ptrdiff_t>(h1));
    for (const auto& id : high) out.phase1[id] = holdout1.count(id) ? Split::holdout : Split::train;

    std::vector<std::string> rest;
    for (const auto& id : all_ids) {
        if (!holdout1.count(id)) rest.push_back(id);
    }
    shuffle(rest, rng);
    const auto h2 = std::max(h1, holdout_size(fraction, all_ids.size()));
    std::set<std::string> holdout2 = holdout1;
    for (std::size_t i = 0; holdout2.size() < h2 && i < rest.size(); ++i) holdout2.insert(rest[i]);
    for (const auto& id : all_ids) out.phase2[id] = holdout2.count(id) ? Split::holdout : Split::train;
    return out;
}

InstructionPair emit_instruction_pair(const preprocess::DeviceSignature& sig, const labeling::PseudoLabel& label,
                                      Phase phase, Split split) {
    labeling::PseudoLabel clean = label;
    clean.vendor = text::squash_whitespace(label.vendor);
    if (clean.vendor.empty()) throw Error(Errc::InvalidArgument, "empty vendor for " + sig.device_id);
    clean.explanation = std::string(text::trim(label.explanation));
    if (clean.device_type) {
        clean.device_type = text::squash_whitespace(*clean.device_type);
        if (clean.device_type->empty()) clean.device_type.reset();
    }

    labeling::PromptConfig config;
    config.granularity = labeling::Granularity::joint;
    config.cot = true;
    config.include_ports = false;

    InstructionPair pair;
    pair.device_id = sig.device_id;
    pair.instruction = labeling::build_prompt(sig, config).front().text;
    pair.response = labeling::render_response(clean);
    pair.phase = phase;
    pair.split = split;

    const auto begin = pair.response.size() - std::min(pair.response.size(), clean.vendor.size());
    if (pair.response.compare(begin, std::string::npos, clean.vendor) != 0) {
        throw Error(Errc::SpanNotFound, "vendor not at the end of the rendered response for " + sig.device_id);
    }
    pair.vendor_span_bytes = {begin, pair.response.size()};
    const auto cp_begin = text::utf8_length(std::string_view(pair.response).substr(0, begin));
    pair.vendor_span = {cp_begin, cp_begin + text::utf8_length(clean.vendor)};
    if (span_text(pair) != clean.vendor) {
        throw Error(Errc::SpanNotFound, "vendor span does not round-trip for " + sig.device_id);
    }
    return pair;
}

std::vector<InstructionPair> emit_dataset(const std::vector<preprocess::DeviceSignature>& signatures,
                                          const std::vector<labeling::PseudoLabel>& labels, double fraction,
                                          std::uint64_t seed) {
    std::map<std::string, const labeling::PseudoLabel*> by_device;
    for (const auto& l : labels) {
        if (!by_device.emplace(l.device_id, &l).second) {
            throw Error(Errc::InvalidArgument, "two labels for device " + l.device_id);
        }
    }
    auto splits = make_splits(signatures, fraction, seed);
    std::vector<const preprocess::DeviceSignature*> sorted;
    for (const auto& s : signatures) sorted.push_back(&s);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->device_id < b->device_id; });

    std::vector<InstructionPair> out;
    for (auto phase : {Phase::I, Phase::II}) {
        const auto& assignment = phase == Phase::I ? splits.phase1 : splits.phase2;
        for (const auto* sig : sorted) {
            auto a = assignment.find(sig->device_id);
            auto l = by_device.find(sig->device_id);
            if (a == assignment.end() || l == by_device.end()) continue;
            out.push_back(emit_instruction_pair(*sig, *l->second, phase, a->second));
        }
    }
    return out;
}

std::string span_text(const InstructionPair& pair) {
    const auto b = byte_offset(pair.response, pair.vendor_span.first);
    const auto e = byte_offset(pair.response, pair.vendor_span.second);
    return pair.response.substr(b, e - b);
}

nlohmann::json to_json(const InstructionPair& p) {
    return {{"device_id", p.device_id},
            {"instruction", p.instruction},
            {"response", p.response},
            {"vendor_span", {p.vendor_span.first, p.vendor_span.second}},
            {"vendor_span_bytes", {p.vendor_span_bytes.first, p.vendor_span_bytes.second}},
            {"phase", std::string(to_string(p.phase))},
            {"split", std::string(to_string(p.split))}};
}

InstructionPair instruction_pair_from_json(const nlohmann::json& j) {
    try {
        InstructionPair p;
        p.device_id = j.at("device_id").get<std::string>();
        p.instruction = j.at("instruction").get<std::string>();
        p.response = j.at("response").get<std::string>();
        p.vendor_span = {j.at("vendor_span").at(0).get<std::size_t>(), j.at("vendor_span").at(1).get<std::size_t>()};
        if (auto it = j.find("vendor_span_bytes"); it != j.end()) {
            p.vendor_span_bytes = {it->at(0).get<std::size_t>(), it->at(1).get<std::size_t>()};
        }
        const auto phase = j.at("phase").get<std::string>();
        const auto split = j.at("split").get<std::string>();
        if ((phase != "I" && phase != "II") || (split != "train" && split != "holdout")) {
            throw Error(Errc::DecodeError, "bad phase or split in instruction pair");
        }
        p.phase = phase == "I" ? Phase::I : Phase::II;
        p.split = split == "train" ? Split::train : Split::holdout;
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::DecodeError, std::string("instruction pair record: ") + e.what());
    }
}

}  // namespace signet::emitter
