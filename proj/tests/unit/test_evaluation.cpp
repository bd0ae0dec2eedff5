#include <random>

#include "doctest.h"
#include "signet/error.hpp"
#include "signet/evaluation/ablation.hpp"
#include "signet/evaluation/metrics.hpp"
#include "signet/evaluation/rubric.hpp"
#include "signet/labeling/predictor.hpp"
#include "signet/labeling/response.hpp"
#include "support.hpp"

using namespace signet;
using namespace signet::evaluation;
using doctest::Approx;

namespace {

const RubricConfig& rubric() {
    static const auto r = RubricConfig::load(support::kDataDir / "rubric");
    return r;
}

LabeledPair pair(const std::string& id, const std::string& pred, const std::string& ref) {
    return {id, pred, ref, ReferenceSource::pseudo};
}

// 7 strict matches (one with an ambiguous reference), 2 alias-only, 1 wrong.
std::vector<LabeledPair> hand_fixture() {
    return {
        pair("1", "Amazon", "Amazon"),   pair("2", "Google", "Google"),   pair("3", "Wyze", "Wyze"),
        pair("4", "Roku", "Roku"),       pair("5", "iRobot", "iRobot"),   pair("6", "Samsung", "Samsung"),
        pair("7", "Espressif", "Espressif"), pair("8", "Google", "Nest"), pair("9", "Amazon", "Ring"),
        pair("10", "TP-Link", "Sonos"),
    };
}

std::string random_word(std::mt19937_64& rng) {
    static const std::vector<std::string> parts{"Amazon", "Google", "Nest", "Ring", "inc.", "Corp", "co", "Ltd.",
                                                "  ", "LLC", "Philips Lighting", "Signify", "x", ","};
    std::string s;
    const auto n = 1 + rng() % 4;
    for (std::size_t i = 0; i < n; ++i) s += parts[rng() % parts.size()] + (rng() % 2 ? " " : "");
    return s;
}

}  // namespace

TEST_CASE("normalize_label") {
    CHECK(normalize_label("  Amazon  Inc.") == "amazon");
    CHECK(normalize_label("iRobot") == "irobot");
    CHECK(normalize_label("Google, Inc.") == "google");
    CHECK(normalize_label("Acme Co Ltd") == "acme");
    CHECK(normalize_label("Inc.") == "inc.");
    std::mt19937_64 rng(1);
    for (int i = 0; i < 2000; ++i) {
        const auto s = random_word(rng);
        CHECK(normalize_label(normalize_label(s)) == normalize_label(s));
    }
}

TEST_CASE("rubric loading") {
    CHECK_THROWS_AS(RubricConfig::load(support::kFixtureDir / "psl"), Error);
    try {
        RubricConfig::load(support::kFixtureDir / "psl");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::MissingRubricComponent);
    }
    const auto adj = RubricConfig::parse_adjudications("# c\nd1\taccept\tok\nd2\treject\n");
    CHECK(adj.at("d1").accept);
    CHECK(adj.at("d1").note == "ok");
    CHECK_FALSE(adj.at("d2").accept);
    CHECK_THROWS_AS(RubricConfig::parse_adjudications("d1\tmaybe\n"), Error);
}

TEST_CASE("tier_match examples") {
    const auto nest = tier_match(pair("a", "Google", "Nest"), rubric());
    CHECK_FALSE(nest.strict);
    CHECK(nest.brand);
    CHECK(nest.unified);

    const auto echo = tier_match(pair("a", "Amazon Echo Dot", "Amazon Echo, Dot"), rubric());
    CHECK(echo.semantic);

    const auto same = tier_match(pair("a", "X", "X"), rubric());
    CHECK(same.strict);
    CHECK(same.semantic);
    CHECK(same.brand);
    CHECK(same.unified);
    CHECK(same.manual);

    CHECK(tier_match(pair("a", "Acme", "unknown"), rubric()).ambiguous_excluded);
    CHECK_FALSE(tier_match(pair("a", "Acme", "Wyze"), rubric()).unified);
}

TEST_CASE("tiered accuracy on the hand fixture") {
    const auto acc = tiered_accuracy(hand_fixture(), rubric());
    CHECK(acc.strict == Approx(0.7));
    CHECK(acc.brand == Approx(0.9));
    CHECK(acc.unified == Approx(0.9));
    CHECK(acc.n_pairs == 10);
    CHECK(acc.n_ambiguous == 1);
    REQUIRE(acc.ambiguous_exclusion);
    CHECK(*acc.ambiguous_exclusion == Approx(6.0 / 9.0));

    const auto tsv = render_tiers_tsv(acc);
    const std::vector<std::string> rows{"Strict Match", "Semantic Alignment", "Brand Consolidation",
                                        "Ambiguous Label Exclusion", "Unified Label Tier", "Manual Validation Tier"};
    std::size_t last = 0;
    for (const auto& r : rows) {
        const auto pos = tsv.find(r);
        REQUIRE(pos != std::string::npos);
        CHECK(pos >= last);
        last = pos;
    }
    CHECK(tsv.find("70.00%") != std::string::npos);
    CHECK_THROWS_AS(tiered_accuracy({}, rubric()), Error);
}

TEST_CASE("manual tier adds credit only") {
    auto r = rubric();
    r.manual = RubricConfig::parse_adjudications("10\taccept\tcontract manufacturer\n1\treject\n");
    const auto acc = tiered_accuracy(hand_fixture(), r);
    CHECK(acc.manual == Approx(1.0));
    CHECK(acc.unified == Approx(0.9));
}

TEST_CASE("every tier is 1 on an all-correct fixture") {
    std::vector<LabeledPair> ok{pair("1", "Wyze", "Wyze"), pair("2", "Roku", "Roku")};
    const auto acc = tiered_accuracy(ok, rubric());
    CHECK(acc.strict == 1.0);
    CHECK(acc.semantic == 1.0);
    CHECK(acc.brand == 1.0);
    CHECK(acc.unified == 1.0);
    CHECK(acc.manual == 1.0);
}

TEST_CASE("unified dominates its constituents on random fixtures") {
    std::mt19937_64 rng(5);
    const std::vector<std::string> vocab{"Amazon", "Ring", "Google", "Nest", "Philips Lighting", "Signify",
                                         "unknown", "Wyze", "Amazon Echo Dot", "Amazon Echo, Dot", "Espressif"};
    for (int t = 0; t < 100; ++t) {
        std::vector<LabeledPair> ps;
        const auto n = 1 + rng() % 30;
        for (std::size_t i = 0; i < n; ++i) {
            ps.push_back(pair(std::to_string(i), vocab[rng() % vocab.size()], vocab[rng() % vocab.size()]));
        }
        const auto acc = tiered_accuracy(ps, rubric());
        CHECK(acc.unified >= acc.strict);
        CHECK(acc.unified >= acc.semantic);
        CHECK(acc.unified >= acc.brand);
        CHECK(acc.manual >= acc.unified);
    }
}

TEST_CASE("cohens kappa") {
    CHECK(std::abs(cohens_kappa({{20, 5}, {10, 15}}) - 0.4) < 1e-9);
    CHECK(cohens_kappa({{25, 25}, {25, 25}}) == 0.0);
    CHECK(cohens_kappa({{10, 0}, {0, 7}}) == 1.0);
    CHECK(cohens_kappa({{10, 0}, {0, 0}}) == 1.0);

    std::vector<LabeledPair> pairs;
    auto add = [&](const std::string& a, const std::string& b, int n) {
        for (int i = 0; i < n; ++i) pairs.push_back(pair(std::to_string(pairs.size()), a, b));
    };
    add("A", "A", 20);
    add("A", "B", 5);
    add("B", "A", 10);
    add("B", "B", 15);
    CHECK(std::abs(cohens_kappa(pairs) - 0.4) < 1e-9);

    // invariant under consistent relabeling
    for (auto& p : pairs) {
        p.predicted_vendor = p.predicted_vendor == "A" ? "Q" : "Z";
        p.reference_vendor = p.reference_vendor == "A" ? "Q" : "Z";
    }
    CHECK(std::abs(cohens_kappa(pairs) - 0.4) < 1e-9);
}

TEST_CASE("support buckets") {
    CHECK(bucket_for_support(10) == SupportBucket::tail);
    CHECK(bucket_for_support(11) == SupportBucket::mid);
    CHECK(bucket_for_support(100) == SupportBucket::mid);
    CHECK(bucket_for_support(101) == SupportBucket::head);
    CHECK(bucket_for_support(1) == SupportBucket::tail);

    std::vector<LabeledPair> small{pair("1", "A", "A"), pair("2", "B", "B"), pair("3", "A", "B")};
    const auto b = tier_partition(small, rubric());
    CHECK(b[2].samples == 3);
    CHECK(b[2].classes == 2);
    CHECK_FALSE(b[0].accuracy);
}

TEST_CASE("zipfian fixture buckets sum to total") {
    std::vector<LabeledPair> ps;
    std::size_t total = 0;
    for (int k = 1; k <= 40; ++k) {
        const int n = 400 / k;
        for (int i = 0; i < n; ++i) {
            ps.push_back(pair(std::to_string(total), i % 5 ? "V" + std::to_string(k) : "other", "V" + std::to_string(k)));
            ++total;
        }
    }
    const auto b = tier_partition(ps, rubric());
    CHECK(b[0].samples + b[1].samples + b[2].samples == total);
    CHECK(b[0].classes + b[1].classes + b[2].classes == 40);
    CHECK(b[0].classes == 3);  // 400, 200, 133
    CHECK(render_breakdown_tsv(b).find("Head (>100)") != std::string::npos);
}

TEST_CASE("leave-one-out with a stub keyed on the OUI") {
    std::vector<preprocess::DeviceSignature> sigs;
    std::map<std::string, std::string> refs;
    const std::vector<std::string> vendors{"Wyze", "Roku", "Sonos", "Ecobee"};
    for (int i = 0; i < 20; ++i) {
        preprocess::DeviceSignature s;
        s.device_id = "d" + std::to_string(i);
        const auto& v = vendors[static_cast<std::size_t>(i) % vendors.size()];
        s.oui_friendly = v + " Inc.";
        s.dhcp_hostname = "host-" + std::to_string(i);
        s.remote_hostnames = {{"example.com", 443}};
        s.user_labels = {"Label " + std::to_string(i)};
        sigs.push_back(s);
        refs[s.device_id] = v;
    }
    labeling::StubPredictor stub("oui-only", [&](const std::string& prompt) {
        for (const auto& v : vendors) {
            if (prompt.find("OUI: " + v + " Inc.") != std::string::npos) return "Explanation: OUI.\nVendor: " + v;
        }
        return std::string("Explanation: nothing to go on.\nVendor: Generic");
    });
    std::vector<labeling::Predictor*> backends{&stub};
    const auto predict = make_ensemble_predictor(backends, {}, labeling::VendorAliasStore{});

    const std::vector<preprocess::Feature> features(preprocess::kNativeFeatures.begin(), preprocess::kNativeFeatures.end());
    const auto rows = leave_one_out(sigs, predict, features, refs, rubric());
    REQUIRE(rows.size() == 7);
    CHECK(rows[0].name == kBaselineRow);
    CHECK(rows[0].accuracy == 1.0);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].label_leaks == 0);
        if (rows[i].name == "oui_friendly") {
            CHECK(rows[i].accuracy == 0.0);
            CHECK(rows[i].delta == -1.0);
        } else {
            CHECK(rows[i].accuracy == 1.0);
            CHECK(rows[i].delta == 0.0);
        }
    }
    // netdisco is absent everywhere
    for (const auto& r : rows) {
        if (r.name == "netdisco_info") CHECK(r.delta == 0.0);
    }
    CHECK(render_ablation_tsv(rows).rfind("configuration\taccuracy", 0) == 0);
}
