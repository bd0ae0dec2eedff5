#include <random>

#include "doctest.h"
#include "signet/emitter/emitter.hpp"
#include "signet/error.hpp"
#include "signet/text.hpp"
#include "support.hpp"

using namespace signet;
using namespace signet::emitter;
using preprocess::DeviceSignature;

namespace {

labeling::PseudoLabel label(const std::string& device, const std::string& vendor, std::string explanation = "Reasoned.",
                            std::optional<std::string> type = "Camera") {
    labeling::PseudoLabel l;
    l.device_id = device;
    l.vendor = vendor;
    l.explanation = std::move(explanation);
    l.device_type = std::move(type);
    l.model_name = "ensemble";
    return l;
}

std::vector<DeviceSignature> random_signatures(std::mt19937_64& rng, std::size_t n) {
    std::vector<DeviceSignature> out;
    for (std::size_t i = 0; i < n; ++i) {
        DeviceSignature s;
        s.device_id = "dev-" + std::to_string(i);
        s.oui_friendly = "OUI " + std::to_string(rng() % 7);
        if (rng() % 3) s.remote_hostnames = {{"host" + std::to_string(rng() % 9) + ".com", 443}};
        out.push_back(s);
    }
    return out;
}

}  // namespace

TEST_CASE("hue bridge pair") {
    const auto sigs = support::fixture_signatures();
    const auto p = emit_instruction_pair(sigs.at("hue-bridge"), label("hue-bridge", "Philips", "Hue bridge.", "Smart Hub"));
    CHECK(p.response.ends_with("\nDevice Type: Smart Hub, Vendor: Philips"));
    CHECK(span_text(p) == "Philips");
    CHECK(p.instruction.find("DHCP Hostname: hue-bridge-ecb5fa.local") != std::string::npos);
    CHECK(p.instruction.find("Talks to Ads: False") != std::string::npos);
}

TEST_CASE("multi-word and non-ascii vendors") {
    const auto sigs = support::fixture_signatures();
    const auto dt = emit_instruction_pair(sigs.at("speedport"), label("speedport", "Deutsche  Telekom"));
    CHECK(span_text(dt) == "Deutsche Telekom");

    const auto uni = emit_instruction_pair(sigs.at("speedport"), label("speedport", "Bosch Sicherheitssysteme GmbH \xC3\x9C"));
    CHECK(span_text(uni) == "Bosch Sicherheitssysteme GmbH \xC3\x9C");
    CHECK(uni.vendor_span.second - uni.vendor_span.first == 31);
    CHECK(uni.vendor_span_bytes.second - uni.vendor_span_bytes.first == 32);

    const auto bare = emit_instruction_pair(sigs.at("roomba"), label("roomba", "iRobot", "", std::nullopt));
    CHECK(bare.response == "Vendor: iRobot");
    CHECK(span_text(bare) == "iRobot");
}

TEST_CASE("explanation mentioning the vendor does not confuse the span") {
    const auto sigs = support::fixture_signatures();
    const auto p = emit_instruction_pair(sigs.at("wyze-cam"), label("wyze-cam", "Wyze", "Vendor: Wyze is named twice. Wyze."));
    CHECK(p.vendor_span_bytes.first > p.response.find('\n'));
    CHECK(span_text(p) == "Wyze");
}

TEST_CASE("span round-trip over random pairs") {
    std::mt19937_64 rng(17);
    const std::vector<std::string> vendors{"Philips", "Deutsche Telekom", "TP-Link", "Google", "AT&T", "Espressif",
                                           "Hon Hai Precision", "Ubiquiti Networks", "N\xC3\xBCki", "LG Electronics"};
    const auto sigs = random_signatures(rng, 1000);
    for (const auto& s : sigs) {
        const auto& v = vendors[rng() % vendors.size()];
        const auto p = emit_instruction_pair(s, label(s.device_id, v, "Because " + v + " appears."));
        CHECK(span_text(p) == v);
        const auto back = instruction_pair_from_json(to_json(p));
        CHECK(back == p);
    }
}

TEST_CASE("select_high_signal") {
    std::mt19937_64 rng(3);
    const auto sigs = random_signatures(rng, 100);
    const auto hs = select_high_signal(sigs);
    const auto want = std::count_if(sigs.begin(), sigs.end(), [](const auto& s) { return !s.remote_hostnames.empty(); });
    CHECK(static_cast<long>(hs.size()) == want);
    for (const auto& s : hs) CHECK_FALSE(s.remote_hostnames.empty());
}

TEST_CASE("make_splits") {
    std::mt19937_64 rng(4);
    auto sigs = random_signatures(rng, 100);
    for (auto& s : sigs) s.remote_hostnames = {{"a.com", 443}};
    const auto a = make_splits(sigs, 0.10, 1);
    std::size_t holdout = 0;
    for (const auto& [id, s] : a.phase2) holdout += s == Split::holdout;
    CHECK(holdout == 10);
    CHECK(make_splits(sigs, 0.10, 1).phase2 == a.phase2);
    CHECK_THROWS_AS(make_splits(sigs, 0.0, 1), Error);
    CHECK_THROWS_AS(make_splits(sigs, 1.0, 1), Error);
}

TEST_CASE("leakage guard over seeded shuffles") {
    std::mt19937_64 rng(5);
    const auto sigs = random_signatures(rng, 200);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto sp = make_splits(sigs, 0.10, seed);
        for (const auto& [id, s] : sp.phase1) {
            if (s == Split::holdout) CHECK(sp.phase2.at(id) == Split::holdout);
        }
    }
}

TEST_CASE("emit_dataset") {
    std::mt19937_64 rng(6);
    const auto sigs = random_signatures(rng, 50);
    std::vector<labeling::PseudoLabel> labels;
    for (const auto& s : sigs) {
        if (s.device_id != "dev-7") labels.push_back(label(s.device_id, "Vendor" + std::to_string(rng() % 5)));
    }
    const auto pairs = emit_dataset(sigs, labels, 0.1, 9);
    CHECK(pairs == emit_dataset(sigs, labels, 0.1, 9));
    std::set<std::string> p1, p2;
    for (const auto& p : pairs) (p.phase == Phase::I ? p1 : p2).insert(p.device_id);
    for (const auto& id : p1) CHECK(p2.count(id));
    CHECK(p2.size() == 49);
    CHECK_FALSE(p2.count("dev-7"));
}
