#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "signet/preprocess/signature.hpp"

namespace signet::preprocess {

struct PipelineConfig {
    std::size_t jobs = 1;
};

struct PipelineResult {
    std::vector<DeviceSignature> signatures;  // sorted by device_id
    PipelineStats stats;
};

/// Groups newline-delimited flow records by device_id and canonicalizes each
/// group. Undecodable records are counted under the "decode" stage and
/// skipped. Stage drop counters:
///   decode           record failed to decode
///   empty_flow       decoded record carried no feature at all
///   hostname_filter  record became empty once its hostname was filtered
///   empty_row        record became empty after base-domain extraction
///   dedup            duplicate canonical row within a device
/// plus hostname-level counters prefixed "hostname:".
PipelineResult run_pipeline(std::istream& input, const Resources& res, const PipelineConfig& config = {});
PipelineResult run_pipeline(const std::vector<std::filesystem::path>& inputs, const Resources& res,
                            const PipelineConfig& config = {});

/// Per-device accounting used by run_pipeline; exposed for tests.
PipelineStats device_stats(std::span<const FlowRecord> flows, const Resources& res);

}  // namespace signet::preprocess
