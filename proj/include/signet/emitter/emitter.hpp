#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "signet/labeling/types.hpp"
#include "signet/preprocess/types.hpp"

namespace signet::emitter {

enum class Phase { I, II };
enum class Split { train, holdout };

std::string_view to_string(Phase p) noexcept;
std::string_view to_string(Split s) noexcept;

inline constexpr double kDefaultHoldoutFraction = 0.10;

struct InstructionPair {
    std::string device_id;
    std::string instruction;
    std::string response;
    std::pair<std::size_t, std::size_t> vendor_span;        // code points, [start, end)
    std::pair<std::size_t, std::size_t> vendor_span_bytes;  // UTF-8 bytes, [start, end)
    Phase phase = Phase::I;
    Split split = Split::train;

    bool operator==(const InstructionPair&) const = default;
};

/// Signatures with at least one remote hostname, sorted by device_id.
std::vector<preprocess::DeviceSignature> select_high_signal(const std::vector<preprocess::DeviceSignature>& signatures);

struct SplitAssignment {
    std::map<std::string, Split> phase1;  // high-signal devices only
    std::map<std::string, Split> phase2;  // every device
};

/// Holdout size is floor(fraction * n) per phase. Phase I is drawn on the
/// high-signal subset; the Phase II holdout contains the whole Phase I holdout
/// and is topped up from the remaining devices, so no Phase I holdout device
/// trains in Phase II. Deterministic in `seed`. Throws
/// Error(FractionOutOfRange) unless 0 < fraction < 1.
SplitAssignment make_splits(const std::vector<preprocess::DeviceSignature>& signatures, double holdout_fraction,
                            std::uint64_t seed);

/// Instruction is the joint chain-of-thought prompt; the response is the
/// explanation (when present) followed by the prediction line, vendor last.
/// Throws Error(InvalidArgument) on an empty vendor and Error(SpanNotFound)
/// if the rendered response does not end in the vendor.
InstructionPair emit_instruction_pair(const preprocess::DeviceSignature& sig, const labeling::PseudoLabel& label,
                                      Phase phase = Phase::I, Split split = Split::train);

/// Phase I pairs for labelled high-signal devices, then Phase II pairs for all
/// labelled devices, each sorted by device_id. Unlabelled devices are skipped.
std::vector<InstructionPair> emit_dataset(const std::vector<preprocess::DeviceSignature>& signatures,
                                          const std::vector<labeling::PseudoLabel>& labels, double holdout_fraction,
                                          std::uint64_t seed);

/// The span substring in code points.
std::string span_text(const InstructionPair& pair);

nlohmann::json to_json(const InstructionPair& pair);
InstructionPair instruction_pair_from_json(const nlohmann::json& j);

}  // namespace signet::emitter
