#include "signet/evaluation/metrics.hpp"

#include <map>

#include "signet/error.hpp"
#include "signet/text.hpp"

namespace signet::evaluation {

namespace {

double kappa_from(double p_o, double p_e) {
    if (p_e >= 1.0 - 1e-15) return p_o >= 1.0 - 1e-15 ? 1.0 : 0.0;
    return (p_o - p_e) / (1.0 - p_e);
}

}  // namespace

double cohens_kappa(const std::vector<LabeledPair>& pairs) {
    if (pairs.empty()) throw Error(Errc::EmptyInput, "no pairs for kappa");
    std::map<std::string, std::uint64_t> a, b;
    std::uint64_t agree = 0;
    for (const auto& p : pairs) {
        auto x = normalize_label(p.predicted_vendor);
        auto y = normalize_label(p.reference_vendor);
        agree += x == y;
        ++a[x];
        ++b[y];
    }
    const double n = static_cast<double>(pairs.size());
    double p_e = 0.0;
    for (const auto& [label, count] : a) {
        if (auto it = b.find(label); it != b.end()) p_e += (count / n) * (it->second / n);
    }
    return kappa_from(agree / n, p_e);
}

double cohens_kappa(const std::vector<std::vector<std::uint64_t>>& m) {
    const std::size_t k = m.size();
    std::vector<double> rows(k, 0.0), cols(k, 0.0);
    double n = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (m[i].size() != k) throw Error(Errc::InvalidArgument, "confusion matrix is not square");
        for (std::size_t j = 0; j < k; ++j) {
            const double c = static_cast<double>(m[i][j]);
            rows[i] += c;
            cols[j] += c;
            n += c;
            if (i == j) diag += c;
        }
    }
    if (n <= 0.0) throw Error(Errc::EmptyInput, "empty confusion matrix");
    double p_e = 0.0;
    for (std::size_t i = 0; i < k; ++i) p_e += (rows[i] / n) * (cols[i] / n);
    return kappa_from(diag / n, p_e);
}

std::string_view to_string(SupportBucket b) noexcept {
    switch (b) {
        case SupportBucket::head: return "head";
        case SupportBucket::mid: return "mid";
        case SupportBucket::tail: return "tail";
    }
    return "tail";
}

SupportBucket bucket_for_support(std::uint64_t samples) noexcept {
    if (samples > 100) return SupportBucket::head;
    if (samples > 10) return SupportBucket::mid;
    return SupportBucket::tail;
}

TierBreakdown tier_partition(const std::vector<LabeledPair>& pairs, const RubricConfig& rubric) {
    if (pairs.empty()) throw Error(Errc::EmptyInput, "no pairs for tier partition");
    struct ClassTally {
        std::uint64_t samples = 0;
        std::uint64_t correct = 0;
    };
    std::map<std::string, ClassTally> classes;
    for (const auto& p : pairs) {
        auto& t = classes[normalize_label(p.reference_vendor)];
        ++t.samples;
        t.correct += tier_match(p, rubric).manual;
    }
    TierBreakdown out{};
    std::array<std::uint64_t, 3> correct{};
    for (const auto& [label, t] : classes) {
        const auto b = static_cast<std::size_t>(bucket_for_support(t.samples));
        ++out[b].classes;
        out[b].samples += t.samples;
        correct[b] += t.correct;
    }
    for (std::size_t b = 0; b < 3; ++b) {
        if (out[b].samples > 0) out[b].accuracy = static_cast<double>(correct[b]) / static_cast<double>(out[b].samples);
    }
    return out;
}

std::string render_breakdown_tsv(const TierBreakdown& breakdown) {
    static constexpr std::array<const char*, 3> kNames{"Head (>100)", "Mid (11-100)", "Tail (<=10)"};
    std::string out = "vendor_tier\taccuracy\tclasses\tsamples\n";
    for (std::size_t b = 0; b < 3; ++b) {
        const auto& s = breakdown[b];
        out += std::string(kNames[b]) + "\t" +
               (s.accuracy ? text::format_fixed(100.0 * *s.accuracy, 2) + "%" : std::string("NA")) + "\t" +
               std::to_string(s.classes) + "\t" + std::to_string(s.samples) + "\n";
    }
    return out;
}

nlohmann::json to_json(const TierBreakdown& breakdown) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t b = 0; b < 3; ++b) {
        const auto& s = breakdown[b];
        j[std::string(to_string(static_cast<SupportBucket>(b)))] = {
            {"accuracy", s.accuracy ? nlohmann::json(*s.accuracy) : nlohmann::json(nullptr)},
            {"classes", s.classes},
            {"samples", s.samples}};
    }
    return j;
}

}  // namespace signet::evaluation
