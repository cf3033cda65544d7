#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aetas {

inline constexpr const char* kVersion = "0.1.0";

// Error taxonomy mirrors the process exit codes: config 2, data 3, numeric 4.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

std::string read_file(const std::filesystem::path& path);

// Writes to <path>.tmp then renames, so readers never see partial files.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::vector<std::string> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);

// Formats a double with enough digits to round-trip bit-exactly.
std::string format_double(double v);
// Compact form for CSV cells.
std::string format_csv_double(double v);

// Runs fn(0..n-1); results land in index order. Worker count is capped by
// hardware_concurrency so single-core hosts just run sequentially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace aetas
