#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace aetas::ini {

// INI/TOML-subset: [section] headers, key = value lines, # and ; comments,
// optional double quotes around values, comma-separated lists. Every parse
// problem is a ConfigError carrying the line number.
struct File {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const;
  // Typed getters fall back to def when the key is absent and throw
  // ConfigError when the value does not parse.
  std::string get(const std::string& section, const std::string& key,
                  const std::string& def) const;
  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t def) const;
  std::uint64_t get_uint(const std::string& section, const std::string& key,
                         std::uint64_t def) const;
  double get_double(const std::string& section, const std::string& key,
                    double def) const;
  bool get_bool(const std::string& section, const std::string& key, bool def) const;
  std::vector<std::string> get_list(const std::string& section,
                                    const std::string& key) const;
};

File parse(std::string_view text);
File parse_file(const std::filesystem::path& path);

}  // namespace aetas::ini
