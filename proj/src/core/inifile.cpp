#include "inifile.hpp"

#include <cerrno>
#include <cstdlib>

#include "util.hpp"

namespace aetas::ini {

namespace {

std::string strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '"') quoted = !quoted;
    if (!quoted && (c == '#' || c == ';')) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

std::string unquote(std::string_view v, int line_no) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
    return std::string(v.substr(1, v.size() - 2));
  if (!v.empty() && (v.front() == '"' || v.back() == '"'))
    throw ConfigError("config line " + std::to_string(line_no) +
                      ": unbalanced quotes");
  return std::string(v);
}

const std::string* find(const File& f, const std::string& section,
                        const std::string& key) {
  auto s = f.sections.find(section);
  if (s == f.sections.end()) return nullptr;
  auto k = s->second.find(key);
  if (k == s->second.end()) return nullptr;
  return &k->second;
}

[[noreturn]] void bad_value(const std::string& section, const std::string& key,
                            const std::string& value, const char* wanted) {
  throw ConfigError("config [" + section + "] " + key + ": expected " + wanted +
                    ", got \"" + value + "\"");
}

}  // namespace

bool File::has(const std::string& section, const std::string& key) const {
  return find(*this, section, key) != nullptr;
}

std::string File::get(const std::string& section, const std::string& key,
                      const std::string& def) const {
  const std::string* v = find(*this, section, key);
  return v ? *v : def;
}

std::int64_t File::get_int(const std::string& section, const std::string& key,
                           std::int64_t def) const {
  const std::string* v = find(*this, section, key);
  if (!v) return def;
  errno = 0;
  char* end = nullptr;
  long long n = std::strtoll(v->c_str(), &end, 10);
  if (errno != 0 || end == v->c_str() || *end != '\0')
    bad_value(section, key, *v, "an integer");
  return n;
}

std::uint64_t File::get_uint(const std::string& section, const std::string& key,
                             std::uint64_t def) const {
  const std::string* v = find(*this, section, key);
  if (!v) return def;
  if (!v->empty() && (*v)[0] == '-') bad_value(section, key, *v, "a non-negative integer");
  errno = 0;
  char* end = nullptr;
  unsigned long long n = std::strtoull(v->c_str(), &end, 10);
  if (errno != 0 || end == v->c_str() || *end != '\0')
    bad_value(section, key, *v, "a non-negative integer");
  return n;
}

double File::get_double(const std::string& section, const std::string& key,
                        double def) const {
  const std::string* v = find(*this, section, key);
  if (!v) return def;
  errno = 0;
  char* end = nullptr;
  double d = std::strtod(v->c_str(), &end);
  if (errno != 0 || end == v->c_str() || *end != '\0')
    bad_value(section, key, *v, "a number");
  return d;
}

bool File::get_bool(const std::string& section, const std::string& key,
                    bool def) const {
  const std::string* v = find(*this, section, key);
  if (!v) return def;
  if (*v == "true") return true;
  if (*v == "false") return false;
  bad_value(section, key, *v, "true or false");
}

std::vector<std::string> File::get_list(const std::string& section,
                                        const std::string& key) const {
  const std::string* v = find(*this, section, key);
  std::vector<std::string> out;
  if (!v || v->empty()) return out;
  for (const auto& part : split(*v, ',')) {
    auto t = trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

File parse(std::string_view text) {
  File f;
  std::string section;
  int line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = strip_comment(raw);
    auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3)
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": malformed section header");
      section = std::string(trim(t.substr(1, t.size() - 2)));
      f.sections[section];  // empty sections are legal
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    std::string key(trim(t.substr(0, eq)));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    std::string value = unquote(trim(t.substr(eq + 1)), line_no);
    auto [it, inserted] = f.sections[section].emplace(key, value);
    if (!inserted)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": duplicate key \"" + key + "\"");
  }
  return f;
}

File parse_file(const std::filesystem::path& path) {
  // An unreadable config file is a configuration problem, not bad data.
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse(text);
}

}  // namespace aetas::ini
