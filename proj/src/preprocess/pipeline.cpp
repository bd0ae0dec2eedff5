#include "signet/preprocess/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <istream>
#include <map>

#include "signet/error.hpp"
#include "signet/text.hpp"

namespace signet::preprocess {

namespace {

struct DeviceOutput {
    std::optional<DeviceSignature> signature;
    PipelineStats stats;
};

DeviceOutput process_device(std::span<const FlowRecord> flows, const Resources& res) {
    DeviceOutput out;
    out.stats = device_stats(flows, res);
    if (out.stats.canonical_rows > 0) {
        out.signature = canonicalize_device(flows, res);
        out.stats.unique_devices = 1;
    }
    return out;
}

void read_stream(std::istream& input, std::map<std::string, std::vector<FlowRecord>>& groups, PipelineStats& stats) {
    std::string line;
    while (std::getline(input, line)) {
        if (text::trim(line).empty()) continue;
        ++stats.input_flows;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            ++stats.per_stage_drop_counts["decode"];
            continue;
        }
        try {
            auto flow = flow_from_json(j);
            ++stats.decoded_flows;
            groups[flow.device_id].push_back(std::move(flow));
        } catch (const Error&) {
            ++stats.per_stage_drop_counts["decode"];
        }
    }
}

PipelineResult process_groups(const std::map<std::string, std::vector<FlowRecord>>& groups, PipelineStats stats,
                              const Resources& res, const PipelineConfig& config) {
    std::vector<const std::vector<FlowRecord>*> work;
    work.reserve(groups.size());
    for (const auto& [id, flows] : groups) work.push_back(&flows);

    std::vector<DeviceOutput> outputs(work.size());
    const std::size_t jobs = std::max<std::size_t>(1, std::min(config.jobs, work.size()));
    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) outputs[i] = process_device(*work[i], res);
    };
    if (jobs == 1) {
        run_range(0, work.size());
    } else {
        std::vector<std::future<void>> tasks;
        const std::size_t chunk = (work.size() + jobs - 1) / jobs;
        for (std::size_t b = 0; b < work.size(); b += chunk) {
            tasks.push_back(std::async(std::launch::async, run_range, b, std::min(work.size(), b + chunk)));
        }
        for (auto& t : tasks) t.get();
    }

    PipelineResult result;
    for (auto& o : outputs) {
        stats += o.stats;
        if (o.signature) result.signatures.push_back(std::move(*o.signature));
    }
    result.stats = std::move(stats);
    return result;
}

}  // namespace

PipelineStats device_stats(std::span<const FlowRecord> flows, const Resources& res) {
    PipelineStats s;
    std::set<CanonicalRow> rows;
    std::uint64_t nonempty = 0;
    for (const auto& flow : flows) {
        auto outcome = canonicalize_flow(flow, res);
        if (outcome.hostname_drop != HostnameDrop::none) {
            ++s.per_stage_drop_counts["hostname:" + std::string(to_string(outcome.hostname_drop))];
        }
        if (outcome.hostname_rejected_by_psl) ++s.per_stage_drop_counts["hostname:public_suffix"];

        if (!outcome.had_fields) {
            ++s.per_stage_drop_counts["empty_flow"];
            continue;
        }
        if (outcome.hostname_drop != HostnameDrop::none && outcome.row.empty()) {
            ++s.per_stage_drop_counts["hostname_filter"];
            continue;
        }
        ++s.flows_after_hostname_filter;
        if (outcome.row.empty()) {
            ++s.per_stage_drop_counts["empty_row"];
            continue;
        }
        ++nonempty;
        rows.insert(std::move(outcome.row));
    }
    s.canonical_rows = rows.size();
    if (nonempty > rows.size()) s.per_stage_drop_counts["dedup"] += nonempty - rows.size();
    return s;
}

PipelineResult run_pipeline(std::istream& input, const Resources& res, const PipelineConfig& config) {
    std::map<std::string, std::vector<FlowRecord>> groups;
    PipelineStats stats;
    read_stream(input, groups, stats);
    return process_groups(groups, std::move(stats), res, config);
}

PipelineResult run_pipeline(const std::vector<std::filesystem::path>& inputs, const Resources& res,
                            const PipelineConfig& config) {
    std::map<std::string, std::vector<FlowRecord>> groups;
    PipelineStats stats;
    for (const auto& path : inputs) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(Errc::ConfigError, "cannot open " + path.string());
        read_stream(in, groups, stats);
    }
    return process_groups(groups, std::move(stats), res, config);
}

}  // namespace signet::preprocess
