#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace bugrepro {

std::string read_file(const std::filesystem::path& path);

// Plain write; creates parent directories.
void write_file(const std::filesystem::path& path, std::string_view bytes);

// Write via temp file + rename so readers never observe partial content.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

// Write-once discipline: writing identical bytes again is a no-op, writing
// different bytes over an existing file throws.
void write_file_once(const std::filesystem::path& path, std::string_view bytes);

// Calls fn(line_number, line) for every line (1-based, '\n'-separated,
// trailing '\r' stripped). A final line without a newline still counts.
void for_each_line(std::string_view text, const std::function<void(int, std::string_view)>& fn);

std::string trim(std::string_view s);

// Last `max_bytes` of a string, for log excerpts.
std::string tail_excerpt(const std::string& text, std::size_t max_bytes = 2000);

// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

} // namespace bugrepro
