#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hintlab {

// ASCII lowercase; multi-byte UTF-8 sequences pass through untouched.
std::string ascii_lower(std::string_view s);

// Trim ASCII whitespace from both ends.
std::string trim(std::string_view s);

// Collapse every run of whitespace to a single space and trim the ends.
std::string collapse_ws(std::string_view s);

// ascii_lower + collapse_ws: the normal form used for label and leak matching.
std::string normalize_text(std::string_view s);

bool contains(std::string_view haystack, std::string_view needle);

// Split on any of the delimiter characters; keeps empty pieces out.
std::vector<std::string> split_any(std::string_view s, std::string_view delims);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Canonical short form for a temperature: "0", "0.2", "1".
std::string format_temperature(double t);

// Fixed two-decimal rendering used by the table reports.
std::string format_rate(double v);

}  // namespace hintlab
