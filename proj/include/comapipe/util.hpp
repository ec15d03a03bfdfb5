#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace comapipe {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// True for the markers that mean "value absent": empty, nan, none (any case).
bool is_missing_marker(std::string_view value);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// Shortest decimal text that round-trips the exact double (to_chars).
std::string format_double(double v);

// Runs fn(i) for i in [0, n) across at most `jobs` threads. Work is
// assigned by index so results written to slot i never race; the caller
// sees the same outcome regardless of jobs.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

// Writes content to path via a temp file in the same directory plus rename,
// so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

} // namespace comapipe
