#include "signet/preprocess/types.hpp"

#include <charconv>

#include "signet/error.hpp"

namespace signet::preprocess {

std::string DomainPort::to_string() const {
    return port ? base_domain + ":" + std::to_string(*port) : base_domain;
}

DomainPort DomainPort::parse(std::string_view rendered) {
    auto colon = rendered.rfind(':');
    if (colon == std::string_view::npos) return DomainPort{std::string(rendered), std::nullopt};
    auto port_text = rendered.substr(colon + 1);
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), value);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || value > 65535 || port_text.empty()) {
        throw Error(Errc::DecodeError, "bad port in '" + std::string(rendered) + "'");
    }
    return DomainPort{std::string(rendered.substr(0, colon)), static_cast<std::uint16_t>(value)};
}

std::string_view to_string(UAKind kind) noexcept {
    switch (kind) {
        case UAKind::browser: return "browser";
        case UAKind::os: return "os";
        case UAKind::model: return "model";
        case UAKind::sdk: return "sdk";
        case UAKind::other: return "other";
    }
    return "other";
}

std::optional<UAKind> ua_kind_from_string(std::string_view s) noexcept {
    for (auto k : {UAKind::browser, UAKind::os, UAKind::model, UAKind::sdk, UAKind::other}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

PipelineStats& PipelineStats::operator+=(const PipelineStats& other) {
    input_flows += other.input_flows;
    decoded_flows += other.decoded_flows;
    flows_after_hostname_filter += other.flows_after_hostname_filter;
    canonical_rows += other.canonical_rows;
    unique_devices += other.unique_devices;
    for (const auto& [stage, count] : other.per_stage_drop_counts) per_stage_drop_counts[stage] += count;
    return *this;
}

bool PipelineStats::monotone() const noexcept {
    return input_flows >= decoded_flows && decoded_flows >= flows_after_hostname_filter &&
           flows_after_hostname_filter >= canonical_rows && canonical_rows >= unique_devices;
}

}  // namespace signet::preprocess
