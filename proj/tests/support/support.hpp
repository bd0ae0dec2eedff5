#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "signet/preprocess/pipeline.hpp"
#include "signet/preprocess/signature.hpp"

namespace support {

inline const std::filesystem::path kDataDir = SIGNET_DATA_DIR;
inline const std::filesystem::path kFixtureDir = SIGNET_FIXTURE_DIR;

using Matrix = std::vector<std::vector<std::uint64_t>>;

// Independent oracles. They work on raw matrices and share no code with the
// library.

inline double naive_entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double x : p) {
        if (x > 0) h += -x * std::log(x) / std::log(2.0);
    }
    return h;
}

inline double naive_mi(const Matrix& m) {
    double n = 0;
    for (const auto& r : m)
        for (auto c : r) n += static_cast<double>(c);
    double mi = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m[i].size(); ++j) {
            if (m[i][j] == 0) continue;
            double a = 0, b = 0;
            for (auto c : m[i]) a += static_cast<double>(c);
            for (const auto& r : m) b += static_cast<double>(r[j]);
            const double pij = static_cast<double>(m[i][j]) / n;
            mi += pij * std::log(pij / ((a / n) * (b / n))) / std::log(2.0);
        }
    }
    return mi;
}

inline std::pair<std::vector<double>, std::vector<double>> naive_marginals(const Matrix& m) {
    double n = 0;
    std::vector<double> a(m.size(), 0.0), b(m.front().size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) {
            a[i] += static_cast<double>(m[i][j]);
            b[j] += static_cast<double>(m[i][j]);
            n += static_cast<double>(m[i][j]);
        }
    for (auto& x : a) x /= n;
    for (auto& x : b) x /= n;
    return {a, b};
}

struct MonteCarlo {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// E[MI] under the permutation null: shuffle the column labels of the
// expanded sample and recount.
inline MonteCarlo monte_carlo_emi(const Matrix& m, std::size_t shuffles, std::uint64_t seed) {
    std::vector<std::size_t> xs, ys;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j)
            for (std::uint64_t k = 0; k < m[i][j]; ++k) {
                xs.push_back(i);
                ys.push_back(j);
            }
    std::mt19937_64 rng(seed);
    double sum = 0, sum2 = 0;
    Matrix t(m.size(), std::vector<std::uint64_t>(m.front().size()));
    for (std::size_t s = 0; s < shuffles; ++s) {
        std::shuffle(ys.begin(), ys.end(), rng);
        for (auto& r : t) std::fill(r.begin(), r.end(), 0);
        for (std::size_t k = 0; k < xs.size(); ++k) ++t[xs[k]][ys[k]];
        const double v = naive_mi(t);
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(shuffles);
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    return {mean, std::sqrt(var / n)};
}

// Random table with at least two non-empty rows and columns.
inline Matrix random_table(std::mt19937_64& rng, std::size_t max_dim, std::uint64_t max_n) {
    std::uniform_int_distribution<std::size_t> dim(2, max_dim);
    for (;;) {
        const auto r = dim(rng), c = dim(rng);
        const auto n = std::uniform_int_distribution<std::uint64_t>(4, max_n)(rng);
        Matrix m(r, std::vector<std::uint64_t>(c, 0));
        std::uniform_int_distribution<std::size_t> ri(0, r - 1), ci(0, c - 1);
        for (std::uint64_t k = 0; k < n; ++k) ++m[ri(rng)][ci(rng)];
        std::size_t nz_rows = 0, nz_cols = 0;
        for (const auto& row : m) nz_rows += std::accumulate(row.begin(), row.end(), std::uint64_t{0}) > 0;
        for (std::size_t j = 0; j < c; ++j) {
            std::uint64_t s = 0;
            for (const auto& row : m) s += row[j];
            nz_cols += s > 0;
        }
        if (nz_rows >= 2 && nz_cols >= 2) return m;
    }
}

// Bundled device fixtures.

inline signet::preprocess::Resources resources(bool icann_only = true) {
    signet::preprocess::Resources res;
    res.psl = signet::preprocess::PublicSuffixRules::load(kDataDir / "psl" / "public_suffix_list.dat",
                                                          {.include_private = !icann_only});
    res.domain_aliases = signet::preprocess::DomainAliasMap::load(kDataDir / "aliases" / "domain_aliases.tsv");
    res.ad_domains = signet::preprocess::AdDomainList::load(kDataDir / "ads" / "ad_domains.txt");
    return res;
}

inline std::map<std::string, signet::preprocess::DeviceSignature> fixture_signatures(bool icann_only = true) {
    auto result = signet::preprocess::run_pipeline(
        std::vector<std::filesystem::path>{kFixtureDir / "e2e" / "flows.jsonl"}, resources(icann_only));
    std::map<std::string, signet::preprocess::DeviceSignature> out;
    for (auto& s : result.signatures) out[s.device_id] = s;
    return out;
}

inline signet::preprocess::FlowRecord flow(std::string device, std::int64_t ts, std::string host,
                                           std::optional<std::uint16_t> port = std::nullopt) {
    signet::preprocess::FlowRecord f;
    f.device_id = std::move(device);
    f.timestamp = ts;
    f.remote_hostname = std::move(host);
    f.remote_port = port;
    return f;
}

// Synthetic corpus with a known duplicate structure: every device repeats
// flows, a share of hostnames are private or .local, and some lines are junk.
inline std::string synthetic_flows(std::size_t n, std::uint64_t seed) {
    static const std::vector<std::string> hosts = {
        "cdn02.api.ring.com", "a.b.example.com", "oem.googleapis.com", "api.roku.com", "ads.doubleclick.net",
        "us-west-2.amazonaws.com", "liveview.wyze.com", "192.168.1.1", "devices._tcp.local", "10.0.0.7",
        "discovery.meethue.com", "www.example.co.uk", "fe80::1", "1.in-addr.arpa", ""};
    static const std::vector<std::string> ouis = {"Amazon Technologies Inc.", "Wyze Labs Inc.", "Google, Inc.",
                                                  "Roku, Inc.", "Espressif Inc."};
    static const std::vector<std::string> uas = {"okhttp/4.9.3 Android/12", "Linux ; SM-G900A; AppleWebKit/537.36",
                                                 "Foo/1.0 Build/ABC123", "WyzeCam/2.14.35"};
    std::mt19937_64 rng(seed);
    auto pick = [&](std::size_t k) { return static_cast<std::size_t>(rng() % k); };
    std::string out;
    const std::size_t devices = std::max<std::size_t>(1, n / 25);
    for (std::size_t i = 0; i < n; ++i) {
        if (i % 997 == 13) {
            out += "{\"device_id\": truncated\n";
            continue;
        }
        nlohmann::json j;
        j["device_id"] = "dev-" + std::to_string(pick(devices));
        j["ts"] = 1700000000 + static_cast<std::int64_t>(i);
        const auto h = hosts[pick(hosts.size())];
        if (!h.empty()) {
            j["remote_hostname"] = h;
            static const std::uint16_t ports[] = {443, 80, 49152, 8883};
            j["remote_port"] = ports[pick(4)];
        }
        if (pick(3) == 0) j["oui_friendly"] = ouis[pick(ouis.size())];
        if (pick(5) == 0) j["user_agent_info"] = uas[pick(uas.size())];
        if (pick(7) == 0) j["dhcp_hostname"] = "host-" + std::to_string(pick(4));
        if (pick(11) == 0) j["netdisco_info"] = {{"model", "M" + std::to_string(pick(3))}, {"serial", std::to_string(i)}};
        if (pick(13) == 0) j["user_label"] = "label " + std::to_string(pick(3));
        out += j.dump() + "\n";
    }
    return out;
}

}  // namespace support
