#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sleepmon {

/// Ordered `key=value` lines. Blank lines and lines starting with '#' are
/// skipped; surrounding whitespace is trimmed. Keys may repeat (timeline
/// items do); callers enforce uniqueness where it matters.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Throws Error(malformed_input) on a line without '='.
KeyValues parse_key_values(std::string_view text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

double parse_double(std::string_view key, std::string_view value);
long long parse_integer(std::string_view key, std::string_view value);

/// Fixed-point rendering used by every text export ("%.Nf").
std::string fixed(double value, int decimals);

}  // namespace sleepmon
