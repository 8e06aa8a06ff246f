#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace weft::util {

using ojson = nlohmann::ordered_json;

std::vector<std::string> split(std::string_view text, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string_view trim(std::string_view text) noexcept;
std::string to_lower(std::string_view text);
bool starts_with_ci(std::string_view text, std::string_view prefix) noexcept;

bool is_valid_utf8(std::string_view text) noexcept;

/// Compact, deterministic dump. Invalid UTF-8 is replaced rather than thrown.
std::string dump_compact(const ojson& value);
std::string dump_pretty(const ojson& value);

std::string read_file(const std::filesystem::path& path);  // throws IoError
/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::uint64_t fnv1a64(std::string_view data) noexcept;
std::string hex64(std::uint64_t value);

/// Runs fn(0..count-1) on up to `jobs` threads. Exceptions propagate
/// (the first one thrown, after all workers join).
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace weft::util
