#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace enscal {

// Shortest round-trip decimal form (to_chars); deterministic across runs.
std::string format_double(double v);
// Strict full-token parse; throws a data error naming `what` on failure.
double parse_double(std::string_view token, const std::string& what);
long parse_long(std::string_view token, const std::string& what);

std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace enscal
