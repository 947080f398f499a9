#include "hwave/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hwave {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

IniConfig IniConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

IniConfig IniConfig::parse_text(const std::string& text, const std::string& origin) {
  IniConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;

    if (line[0] == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ": malformed section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(origin + ": empty section name", line_no);
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ": expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ": empty key", line_no);
    if (value.empty())
      throw ConfigError(origin + ": empty value for key '" + key + "'", line_no, key);
    if (section.empty())
      throw ConfigError(origin + ": key '" + key + "' appears before any [section]", line_no,
                        key);
    if (cfg.find(section, key))
      throw ConfigError(origin + ": duplicate key '" + key + "' in [" + section + "]", line_no,
                        key);
    cfg.entries_.push_back({section, key, value, line_no});
  }
  return cfg;
}

bool IniConfig::has_section(const std::string& section) const {
  for (const Entry& e : entries_)
    if (e.section == section) return true;
  return false;
}

bool IniConfig::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

const IniConfig::Entry* IniConfig::find(const std::string& section,
                                        const std::string& key) const {
  for (const Entry& e : entries_)
    if (e.section == section && e.key == key) return &e;
  return nullptr;
}

std::string IniConfig::get_string(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError("missing required key '" + key + "' in [" + section + "]", 0, key);
  return e->value;
}

double IniConfig::get_double(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError("missing required key '" + key + "' in [" + section + "]", 0, key);
  const char* start = e->value.c_str();
  char* end = nullptr;
  const double v = std::strtod(start, &end);
  if (end == start || *end != '\0')
    throw ConfigError("key '" + key + "' in [" + section + "] is not a real number: '" +
                          e->value + "'",
                      e->line, key);
  return v;
}

long IniConfig::get_long(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError("missing required key '" + key + "' in [" + section + "]", 0, key);
  const char* start = e->value.c_str();
  char* end = nullptr;
  const long v = std::strtol(start, &end, 10);
  if (end == start || *end != '\0')
    throw ConfigError("key '" + key + "' in [" + section + "] is not an integer: '" + e->value +
                          "'",
                      e->line, key);
  return v;
}

bool IniConfig::get_bool(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError("missing required key '" + key + "' in [" + section + "]", 0, key);
  if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
  if (e->value == "false" || e->value == "0" || e->value == "no") return false;
  throw ConfigError("key '" + key + "' in [" + section + "] is not a boolean: '" + e->value +
                        "'",
                    e->line, key);
}

std::vector<double> IniConfig::get_double_list(const std::string& section,
                                               const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError("missing required key '" + key + "' in [" + section + "]", 0, key);
  std::vector<double> out;
  std::string token;
  std::istringstream in(e->value);
  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (token.empty())
      throw ConfigError("empty element in list '" + key + "'", e->line, key);
    const char* start = token.c_str();
    char* end = nullptr;
    const double v = std::strtod(start, &end);
    if (end == start || *end != '\0')
      throw ConfigError("list element '" + token + "' in key '" + key + "' is not a number",
                        e->line, key);
    out.push_back(v);
  }
  if (out.empty())
    throw ConfigError("list '" + key + "' in [" + section + "] is empty", e->line, key);
  return out;
}

}  // namespace hwave
