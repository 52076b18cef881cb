#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// INI-style run configuration.
//
//   [section]
//   # comment (also ';'); no inline comments
//   key_with_unit_suffix = 1.5e-9
//
// Keys carry their unit in the name (pulse_width_s, temperature_K, ...);
// values are plain numbers, booleans, or strings. Parsing is strict: unknown
// keys, duplicate keys, and malformed values are errors that cite file and
// line, so a typo cannot silently fall back to a default.

namespace spinsnn {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  static Config parse_string(const std::string& text, const std::string& source_name) {
    Config cfg;
    cfg.source_ = source_name;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[') {
        if (t.back() != ']' || t.size() < 2)
          throw ConfigError(cfg.at(lineno) + "malformed section header: " + t);
        section = trim(t.substr(1, t.size() - 2));
        if (section.empty()) throw ConfigError(cfg.at(lineno) + "empty section name");
        cfg.sections_[section];  // a section may legitimately stay empty
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError(cfg.at(lineno) + "expected 'key = value', got: " + t);
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      if (key.empty()) throw ConfigError(cfg.at(lineno) + "empty key");
      if (section.empty())
        throw ConfigError(cfg.at(lineno) + "key '" + key + "' outside any [section]");
      auto& sec = cfg.sections_[section];
      if (sec.count(key))
        throw ConfigError(cfg.at(lineno) + "duplicate key '" + key + "' in [" + section +
                          "] (first set at line " + std::to_string(sec[key].line) + ")");
      sec[key] = Entry{value, lineno};
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
  }

  bool has_section(const std::string& section) const { return sections_.count(section) > 0; }

  bool has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
  }

  std::string get_string(const std::string& section, const std::string& key) const {
    return entry(section, key).value;
  }
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
  }

  double get_double(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    const char* begin = e.value.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *skip_ws(end) != '\0')
      throw ConfigError(at(e.line) + "value of '" + key + "' is not a number: " + e.value);
    return v;
  }
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
  }

  long long get_int(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    const char* begin = e.value.c_str();
    char* end = nullptr;
    const long long v = std::strtoll(begin, &end, 10);
    if (end == begin || *skip_ws(end) != '\0')
      throw ConfigError(at(e.line) + "value of '" + key + "' is not an integer: " + e.value);
    return v;
  }
  long long get_int(const std::string& section, const std::string& key,
                    long long fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
  }

  bool get_bool(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    const std::string v = lower(e.value);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError(at(e.line) + "value of '" + key + "' is not a boolean: " + e.value);
  }
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
    return has(section, key) ? get_bool(section, key) : fallback;
  }

  // Strict schema check: every present section/key must be declared. Unknown
  // entries fail with their file:line (catches typos like "pulse_widht_s").
  void require_known(
      const std::map<std::string, std::set<std::string>>& allowed) const {
    for (const auto& [section, entries] : sections_) {
      const auto a = allowed.find(section);
      if (a == allowed.end()) {
        int line = entries.empty() ? 0 : entries.begin()->second.line;
        throw ConfigError(at(line) + "unknown section [" + section + "]");
      }
      for (const auto& [key, e] : entries)
        if (!a->second.count(key))
          throw ConfigError(at(e.line) + "unknown key '" + key + "' in [" + section + "]");
    }
  }

  // Sections present in the file (sorted by name).
  std::vector<std::string> section_names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : sections_) out.push_back(name);
    return out;
  }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }
  static const char* skip_ws(const char* p) {
    while (*p != '\0' && std::isspace(static_cast<unsigned char>(*p))) ++p;
    return p;
  }
  static std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }

  std::string at(int line) const {
    return source_ + ":" + std::to_string(line) + ": ";
  }

  const Entry& entry(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end())
      throw ConfigError(source_ + ": missing section [" + section + "]");
    const auto e = s->second.find(key);
    if (e == s->second.end())
      throw ConfigError(source_ + ": missing key '" + key + "' in [" + section + "]");
    return e->second;
  }

  std::string source_ = "<config>";
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

}  // namespace spinsnn
