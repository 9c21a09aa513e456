#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace glossrank::text {

std::string_view trim(std::string_view s) noexcept;

/// ASCII lowercase; bytes >= 0x80 pass through untouched so UTF-8 survives.
std::string to_lower(std::string_view s);

/// Lowercase, trim, and collapse internal whitespace runs to one space.
std::string normalize_lemma(std::string_view s);

/// Trims and collapses every whitespace run (tabs and newlines included) to
/// one space, so free text fits in a single TSV field.
std::string single_line(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);

/// Strips a trailing '\r' so CRLF files read the same as LF files.
std::string_view chomp(std::string_view line) noexcept;

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Parses a full decimal token; returns false if anything is left over.
bool parse_double(std::string_view token, double& out) noexcept;

}  // namespace glossrank::text
