#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace signet::records {

/// Key marking the provenance record at the top of every output stream.
inline constexpr const char* kHeaderKey = "_header";

bool is_header(const nlohmann::json& record);

/// Parses newline-delimited JSON, skipping blank lines and header records.
/// Decode failures go to `on_error(line_number, message)` when provided,
/// otherwise throw Error(DecodeError).
std::vector<nlohmann::json> read_jsonl(
    const std::filesystem::path& path,
    const std::function<void(std::size_t, const std::string&)>& on_error = {});

/// Compact, key-sorted, one record per line.
void write_jsonl_line(std::ostream& out, const nlohmann::json& record);

/// Builds the provenance header: tool, subcommand, config, seed and the
/// SHA-256 of every input file. Contains nothing time-dependent.
nlohmann::json make_header(const std::string& subcommand, const nlohmann::json& config,
                           std::uint64_t seed, const std::vector<std::filesystem::path>& inputs);

}  // namespace signet::records
