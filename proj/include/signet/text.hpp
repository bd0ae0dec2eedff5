#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace signet::text {

std::string_view trim(std::string_view s) noexcept;
std::string to_lower_ascii(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;
bool ends_with_ci(std::string_view s, std::string_view suffix) noexcept;
bool contains_ci(std::string_view haystack, std::string_view needle) noexcept;

/// Trim and collapse runs of ASCII whitespace into one space.
std::string squash_whitespace(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// True for dotted-quad IPv4 and any inet_pton-parsable IPv6 (brackets and
/// zone ids tolerated).
bool is_ip_literal(std::string_view s);

/// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view s);

std::string sha256_hex(std::string_view data);
std::string file_sha256_hex(const std::filesystem::path& path);

/// Reads a text file; throws Error(ConfigError) when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Lines of a text file with trailing '\r' removed.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Fixed-point rendering without locale dependence ("%.<digits>f").
std::string format_fixed(double value, int digits);

}  // namespace signet::text
