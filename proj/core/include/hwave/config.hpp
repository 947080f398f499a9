#pragma once

#include <string>
#include <vector>

#include "hwave/errors.hpp"

namespace hwave {

/// Strict INI-style configuration.
///
/// Accepted lines: blank, full-line comments starting with '#' or ';',
/// [section] headers, and key = value pairs.  Inline comments are not
/// stripped (a '#' in a value is part of the value).  Duplicate keys within
/// a section are rejected; so is content outside any section.  All errors
/// are ConfigError carrying the line number and key.
class IniConfig {
 public:
  struct Entry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
  };

  static IniConfig parse_file(const std::string& path);
  static IniConfig parse_text(const std::string& text, const std::string& origin = "<text>");

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;
  const Entry* find(const std::string& section, const std::string& key) const;

  /// Typed getters; missing key or malformed value -> ConfigError with
  /// line/key context.
  std::string get_string(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  long get_long(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key) const;
  /// Comma-separated list of reals ("1, 2.5, 3").
  std::vector<double> get_double_list(const std::string& section, const std::string& key) const;

  /// Entries in file order (for schema validation and canonicalization).
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

}  // namespace hwave
