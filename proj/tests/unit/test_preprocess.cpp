#include <algorithm>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "doctest.h"
#include "signet/error.hpp"
#include "signet/preprocess/hostname.hpp"
#include "signet/preprocess/netdisco.hpp"
#include "signet/preprocess/pipeline.hpp"
#include "signet/preprocess/user_agent.hpp"
#include "signet/text.hpp"
#include "support.hpp"

using namespace signet;
using namespace signet::preprocess;

namespace {

const PublicSuffixRules& psl() {
    static const auto rules = PublicSuffixRules::load(support::kDataDir / "psl" / "public_suffix_list.dat");
    return rules;
}

std::optional<std::string> registrable(const std::string& host) {
    try {
        return psl().match(host).registrable;
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::set<UAToken> tokens(std::initializer_list<std::pair<UAKind, std::string>> items) {
    std::set<UAToken> out;
    for (const auto& [k, v] : items) out.insert({k, v});
    return out;
}

}  // namespace

TEST_CASE("psl reference vectors") {
    const std::regex line(R"(^checkPublicSuffix\((null|'([^']*)'),\s*(null|'([^']*)')\);)");
    std::size_t checked = 0;
    for (const auto& l : text::read_lines(support::kFixtureDir / "psl" / "test_psl.txt")) {
        std::smatch m;
        if (!std::regex_search(l, m, line)) continue;
        const std::optional<std::string> expected = m[3] == "null" ? std::nullopt : std::optional(m[4].str());
        std::optional<std::string> got;
        if (m[1] != "null") got = registrable(m[2].str());
        CAPTURE(l);
        CHECK(got == expected);
        ++checked;
    }
    CHECK(checked > 70);
}

TEST_CASE("psl rule kinds") {
    const auto rules = PublicSuffixRules::parse("// c\ncom\n*.ck\n!www.ck\nco.uk\n// ===BEGIN PRIVATE DOMAINS===\nblogspot.com\n");
    CHECK(rules.match("a.b.ck").registrable == "a.b.ck");
    CHECK(rules.match("www.ck").registrable == "www.ck");
    CHECK(rules.match("x.www.ck").registrable == "www.ck");
    CHECK(rules.match("foo.blogspot.com").registrable == "foo.blogspot.com");
    CHECK_FALSE(rules.match("co.uk").registrable.has_value());

    const auto icann = PublicSuffixRules::parse("com\n// ===BEGIN PRIVATE DOMAINS===\nblogspot.com\n",
                                                {.include_private = false});
    CHECK(icann.match("foo.blogspot.com").registrable == "blogspot.com");
}

TEST_CASE("filter_hostname") {
    CHECK_FALSE(filter_hostname("192.168.1.5"));
    CHECK_FALSE(filter_hostname("devices._tcp.local"));
    CHECK(filter_hostname("cdn02.api.ring.com") == "cdn02.api.ring.com");
    CHECK_FALSE(filter_hostname("   "));
    CHECK_FALSE(filter_hostname("8.8.8.8"));
    CHECK_FALSE(filter_hostname("fe80::1"));
    CHECK_FALSE(filter_hostname("1.0.168.192.in-addr.arpa"));
    CHECK(classify_hostname("169.254.3.1") == HostnameDrop::private_ip);
    CHECK(classify_hostname("127.0.0.1") == HostnameDrop::private_ip);
    CHECK(classify_hostname("172.20.0.1") == HostnameDrop::private_ip);
    CHECK(classify_hostname("172.32.0.1") == HostnameDrop::ip_literal);
    CHECK(classify_hostname("host.LOCAL") == HostnameDrop::local_suffix);
}

TEST_CASE("extract_base_domain") {
    CHECK(extract_base_domain("cdn02.api.ring.com", 443, psl()) == DomainPort{"ring.com", 443});
    CHECK(extract_base_domain("example.co.uk", std::nullopt, psl()) == DomainPort{"example.co.uk", std::nullopt});
    CHECK(extract_base_domain("a.b.example.com", 49152, psl()) == DomainPort{"example.com", 49152});
    CHECK(extract_base_domain("CDN.Ring.COM.", std::nullopt, psl()).base_domain == "ring.com");
    CHECK_THROWS_AS(extract_base_domain("co.uk", std::nullopt, psl()), Error);
    try {
        extract_base_domain("com", std::nullopt, psl());
    } catch (const Error& e) {
        CHECK(e.code() == Errc::HostnameIsPublicSuffix);
    }
    CHECK(DomainPort{"ring.com", 443}.to_string() == "ring.com:443");
    CHECK(DomainPort::parse("ring.com:49152") == DomainPort{"ring.com", 49152});
}

TEST_CASE("merge_equivalent_domains") {
    const DomainAliasMap map(std::map<std::string, std::string>{{"amazonaws.com", "amazon.com"}});
    CHECK(merge_equivalent_domains({"amazonaws.com", 443}, map) == DomainPort{"amazon.com", 443});
    CHECK(merge_equivalent_domains({"ring.com", 443}, DomainAliasMap{}) == DomainPort{"ring.com", 443});
}

TEST_CASE("merge_equivalent_domains is idempotent on closed maps") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::map<std::string, std::string> raw;
        for (int k = 0; k < 8; ++k) {
            const auto a = "d" + std::to_string(rng() % 12) + ".com";
            const auto b = "d" + std::to_string(rng() % 12) + ".com";
            if (a != b && !raw.count(b)) raw[a] = b;
        }
        DomainAliasMap map;
        try {
            map = DomainAliasMap(raw);
        } catch (const Error&) {
            continue;  // cyclic draw
        }
        for (int d = 0; d < 12; ++d) {
            const DomainPort x{"d" + std::to_string(d) + ".com", 443};
            const auto once = merge_equivalent_domains(x, map);
            CHECK(merge_equivalent_domains(once, map) == once);
        }
    }
}

TEST_CASE("parse_netdisco") {
    CHECK(parse_netdisco({{"manufacturer", "Ring"}, {"serial", "X9"}}) == NetdiscoMap{{"manufacturer", "Ring"}});
    CHECK(parse_netdisco({{"device_type", "urn:dial"}, {"ip", "10.0.0.2"}}) == NetdiscoMap{{"device_type", "urn:dial"}});
    CHECK(parse_netdisco({{"model", "Ring Doorbell Pro"}}) == NetdiscoMap{{"model", "Ring Doorbell Pro"}});
    CHECK(parse_netdisco({{"serialNumber", "1"}, {"uuid", "u"}, {"mac_addr", "aa"}, {"host", "h"}}).empty());
    CHECK(parse_netdisco({{"friendlyName", "Living Room"}, {"name", "10.0.0.9"}}) ==
          NetdiscoMap{{"friendly_name", "Living Room"}});
    CHECK(decode_netdisco_blob("not json").empty());
    CHECK(decode_netdisco_blob(R"("{\"model\":\"X\"}")") == NetdiscoMap{{"model", "X"}});
}

TEST_CASE("parse_user_agent") {
    CHECK(parse_user_agent("Linux ; SM-G900A; AppleWebKit/537.36") ==
          tokens({{UAKind::os, "Linux"}, {UAKind::model, "SM-G900A"}, {UAKind::browser, "AppleWebKit/537.36"}}));
    CHECK(parse_user_agent("okhttp/4.9.3 Android/12") ==
          tokens({{UAKind::sdk, "okhttp/4.9.3"}, {UAKind::os, "Android/12"}}));
    CHECK(parse_user_agent("Foo/1.0 Build/ABC123") == tokens({{UAKind::other, "Foo/1.0"}}));
    CHECK(parse_user_agent("Build/XYZ").empty());
    CHECK(is_build_tag("3f9a2c1d"));
    CHECK_FALSE(is_build_tag("deadbeef"));
}

TEST_CASE("derive_talks_to_ads") {
    const AdDomainList ads(std::set<std::string>{"doubleclick.net"});
    CHECK(derive_talks_to_ads({{"doubleclick.net", 443}}, ads));
    CHECK_FALSE(derive_talks_to_ads({{"ring.com", 443}}, ads));

    const auto sigs = support::fixture_signatures();
    CHECK(sigs.at("roku-tv").talks_to_ads);
    CHECK_FALSE(sigs.at("ring-doorbell").talks_to_ads);
}

TEST_CASE("canonicalize_device examples") {
    const auto res = support::resources();
    auto a = support::flow("d", 1, "cdn02.api.ring.com", 443);
    CHECK(canonicalize_device(std::vector{a, a}, res) == canonicalize_device(std::vector{a}, res));

    auto b = support::flow("d", 2, "192.168.1.1");
    const auto sig = canonicalize_device(std::vector{b, a}, res);
    CHECK(sig.remote_hostnames == std::set<DomainPort>{{"ring.com", 443}});
    CHECK_FALSE(sig.oui_friendly);
    CHECK_FALSE(sig.dhcp_hostname);
    CHECK(sig.user_labels.empty());

    auto c = a;
    c.device_id = "other";
    CHECK_THROWS_AS(canonicalize_device(std::vector{a, c}, res), Error);
    CHECK_THROWS_AS(canonicalize_device(std::vector<FlowRecord>{}, res), Error);
}

TEST_CASE("canonicalize_device is permutation invariant and idempotent") {
    const auto res = support::resources();
    std::istringstream in(support::synthetic_flows(2000, 5));
    std::map<std::string, std::vector<FlowRecord>> by_device;
    std::string line;
    while (std::getline(in, line)) {
        try {
            auto f = flow_from_json(nlohmann::json::parse(line));
            by_device[f.device_id].push_back(f);
        } catch (const std::exception&) {
        }
    }
    std::mt19937_64 rng(3);
    std::size_t checked = 0;
    for (auto& [id, flows] : by_device) {
        if (flows.size() < 20) continue;
        const auto base = canonicalize_device(flows, res);
        const auto ser = serialize_signature(base);
        for (int k = 0; k < 5; ++k) {
            std::shuffle(flows.begin(), flows.end(), rng);
            CHECK(serialize_signature(canonicalize_device(flows, res)) == ser);
        }
        CHECK(canonicalize_device(signature_as_flows(base), res) == base);

        std::set<std::string> raw, domains;
        std::set<std::pair<std::string, std::optional<std::uint16_t>>> raw_pairs;
        for (const auto& f : flows) {
            if (!f.remote_hostname) continue;
            raw.insert(*f.remote_hostname);
            raw_pairs.insert({*f.remote_hostname, f.remote_port});
        }
        for (const auto& d : base.remote_hostnames) domains.insert(d.base_domain);
        CHECK(domains.size() <= raw.size());
        CHECK(base.remote_hostnames.size() <= raw_pairs.size());
        ++checked;
    }
    CHECK(checked > 10);
}

TEST_CASE("user labels ordered by timestamp then label") {
    const auto res = support::resources();
    FlowRecord a, b, c;
    a.device_id = b.device_id = c.device_id = "d";
    a.timestamp = 5, a.user_label = "zeta";
    b.timestamp = 5, b.user_label = "alpha";
    c.timestamp = 1, c.user_label = "zeta";
    CHECK(canonicalize_device(std::vector{a, b, c}, res).user_labels == std::vector<std::string>{"zeta", "alpha"});
    CHECK(canonicalize_device(std::vector{c, b, a}, res).user_labels == std::vector<std::string>{"zeta", "alpha"});
}

TEST_CASE("run_pipeline") {
    const auto res = support::resources();
    std::istringstream empty("");
    const auto none = run_pipeline(empty, res);
    CHECK(none.signatures.empty());
    CHECK(none.stats == PipelineStats{});

    const auto corpus = support::synthetic_flows(3000, 9);
    std::istringstream in1(corpus), in2(corpus);
    const auto r1 = run_pipeline(in1, res);
    const auto r2 = run_pipeline(in2, res, {.jobs = 4});
    CHECK(r1.stats.monotone());
    CHECK(r1.stats == r2.stats);
    REQUIRE(r1.signatures.size() == r2.signatures.size());
    for (std::size_t i = 0; i < r1.signatures.size(); ++i) {
        CHECK(serialize_signature(r1.signatures[i]) == serialize_signature(r2.signatures[i]));
    }
    CHECK(r1.stats.per_stage_drop_counts.at("decode") > 0);
    CHECK(std::is_sorted(r1.signatures.begin(), r1.signatures.end(),
                         [](const auto& x, const auto& y) { return x.device_id < y.device_id; }));
}

TEST_CASE("signature json round-trip") {
    for (const auto& [id, sig] : support::fixture_signatures()) {
        CHECK(signature_from_json(signature_to_json(sig)) == sig);
    }
}
