#include "signet/evaluation/rubric.hpp"

#include <array>

#include "signet/error.hpp"
#include "signet/text.hpp"

namespace signet::evaluation {

namespace {

constexpr std::array<std::string_view, 4> kSuffixes{"inc", "corp", "co", "ltd"};

std::string percent(double v) { return text::format_fixed(100.0 * v, 2) + "%"; }

std::string require_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw Error(Errc::MissingRubricComponent, "rubric component missing: " + path.string());
    }
    return text::read_file(path);
}

}  // namespace

std::string normalize_label(std::string_view s) {
    auto out = text::to_lower_ascii(text::squash_whitespace(s));
    while (true) {
        while (!out.empty() && (out.back() == ',' || out.back() == ' ')) out.pop_back();
        auto space = out.find_last_of(' ');
        if (space == std::string::npos) break;
        std::string_view last(out);
        last.remove_prefix(space + 1);
        if (last.ends_with('.')) last.remove_suffix(1);
        bool suffix = false;
        for (auto s : kSuffixes) suffix = suffix || last == s;
        if (!suffix) break;
        out.resize(space);
    }
    while (!out.empty() && (out.back() == ',' || out.back() == ' ')) out.pop_back();
    return out;
}

std::map<std::string, std::string> RubricConfig::parse_semantic_map(std::string_view tsv) {
    std::map<std::string, std::string> out;
    std::size_t lineno = 0;
    for (auto line : text::split(tsv, '\n')) {
        ++lineno;
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto cols = text::split(t, '\t');
        if (cols.size() != 2) {
            throw Error(Errc::ConfigError, "semantic map line " + std::to_string(lineno) + ": expected 2 columns");
        }
        out[normalize_label(cols[0])] = normalize_label(cols[1]);
    }
    // follow chains so lookups are single-step
    for (auto& [from, to] : out) {
        std::set<std::string> seen{from};
        while (true) {
            auto it = out.find(to);
            if (it == out.end() || it->second == to) break;
            if (!seen.insert(to).second) throw Error(Errc::ConfigError, "cycle in semantic map at '" + from + "'");
            to = it->second;
        }
    }
    return out;
}

std::set<std::string> RubricConfig::parse_ambiguous(std::string_view contents) {
    std::set<std::string> out;
    for (auto line : text::split(contents, '\n')) {
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        out.insert(normalize_label(t));
    }
    return out;
}

std::map<std::string, Adjudication> RubricConfig::parse_adjudications(std::string_view tsv) {
    std::map<std::string, Adjudication> out;
    std::size_t lineno = 0;
    for (auto line : text::split(tsv, '\n')) {
        ++lineno;
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto cols = text::split(t, '\t');
        const auto where = "adjudication line " + std::to_string(lineno);
        if (cols.size() < 2 || cols.size() > 3) throw Error(Errc::ConfigError, where + ": expected 2 or 3 columns");
        auto verdict = text::to_lower_ascii(text::trim(cols[1]));
        if (verdict != "accept" && verdict != "reject") {
            throw Error(Errc::ConfigError, where + ": verdict must be accept or reject");
        }
        out[std::string(text::trim(cols[0]))] =
            Adjudication{verdict == "accept", cols.size() == 3 ? std::string(text::trim(cols[2])) : std::string()};
    }
    return out;
}

RubricConfig RubricConfig::load(const std::filesystem::path& dir, const std::optional<std::filesystem::path>& manual_path) {
    RubricConfig r;
    r.semantic_map = parse_semantic_map(require_file(dir / "semantic_map.tsv"));
    r.brand_aliases = labeling::VendorAliasStore::parse(require_file(dir / "brand_aliases.tsv"));
    r.ambiguous = parse_ambiguous(require_file(dir / "ambiguous.txt"));
    if (manual_path) r.manual = parse_adjudications(require_file(*manual_path));
    return r;
}

TierVerdict tier_match(const LabeledPair& pair, const RubricConfig& rubric) {
    const auto p = normalize_label(pair.predicted_vendor);
    const auto r = normalize_label(pair.reference_vendor);
    if (p.empty() || r.empty()) throw Error(Errc::InvalidArgument, "empty vendor in pair for " + pair.device_id);

    auto semantic = [&](const std::string& x) {
        auto it = rubric.semantic_map.find(x);
        return it == rubric.semantic_map.end() ? x : it->second;
    };
    auto brand = [&](const std::string& raw, const std::string& norm) {
        if (rubric.brand_aliases.contains(raw)) return normalize_label(rubric.brand_aliases.resolve(raw));
        return normalize_label(rubric.brand_aliases.resolve(norm));
    };

    TierVerdict v;
    v.strict = p == r;
    v.semantic = semantic(p) == semantic(r);
    v.brand = brand(pair.predicted_vendor, p) == brand(pair.reference_vendor, r);
    v.ambiguous_excluded = rubric.ambiguous.count(r) > 0;
    v.unified = v.strict || v.semantic || v.brand || v.ambiguous_excluded;
    v.manual = v.unified;
    if (rubric.manual) {
        if (auto it = rubric.manual->find(pair.device_id); it != rubric.manual->end() && it->second.accept) v.manual = true;
    }
    return v;
}

TierAccuracy tiered_accuracy(const std::vector<LabeledPair>& pairs, const RubricConfig& rubric) {
    if (pairs.empty()) throw Error(Errc::EmptyInput, "no labeled pairs to evaluate");
    std::size_t strict = 0, semantic = 0, brand = 0, unified = 0, manual = 0, amb = 0, strict_non_amb = 0;
    for (const auto& pair : pairs) {
        const auto v = tier_match(pair, rubric);
        strict += v.strict;
        semantic += v.semantic;
        brand += v.brand;
        unified += v.unified;
        manual += v.manual;
        if (v.ambiguous_excluded) ++amb;
        else strict_non_amb += v.strict;
    }
    const double n = static_cast<double>(pairs.size());
    TierAccuracy acc;
    acc.n_pairs = pairs.size();
    acc.n_ambiguous = amb;
    acc.strict = strict / n;
    acc.semantic = semantic / n;
    acc.brand = brand / n;
    acc.unified = unified / n;
    acc.manual = manual / n;
    if (amb < pairs.size()) acc.ambiguous_exclusion = static_cast<double>(strict_non_amb) / static_cast<double>(pairs.size() - amb);
    return acc;
}

std::string render_tiers_tsv(const TierAccuracy& a) {
    std::string out = "tier\taccuracy\n";
    out += "Strict Match\t" + percent(a.strict) + "\n";
    out += "Semantic Alignment\t" + percent(a.semantic) + "\n";
    out += "Brand Consolidation\t" + percent(a.brand) + "\n";
    out += "Ambiguous Label Exclusion\t" + (a.ambiguous_exclusion ? percent(*a.ambiguous_exclusion) : std::string("NA")) + "\n";
    out += "Unified Label Tier\t" + percent(a.unified) + "\n";
    out += "Manual Validation Tier\t" + percent(a.manual) + "\n";
    return out;
}

nlohmann::json to_json(const TierAccuracy& a) {
    return {{"strict", a.strict},
            {"semantic", a.semantic},
            {"brand", a.brand},
            {"ambiguous_exclusion", a.ambiguous_exclusion ? nlohmann::json(*a.ambiguous_exclusion) : nlohmann::json(nullptr)},
            {"unified", a.unified},
            {"manual", a.manual},
            {"n_pairs", a.n_pairs},
            {"n_ambiguous", a.n_ambiguous}};
}

}  // namespace signet::evaluation
