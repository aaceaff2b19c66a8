#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fpp {

// INI-style configuration: [section] headers, key = value lines, '#' or ';'
// comments. Values are plain trimmed strings; duplicate keys within a
// section are rejected.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, std::string value);
  // "section.key=value" override (CLI -D flags)
  void set_dotted(const std::string& assignment);

  // canonical text: sections and keys sorted, one "key = value" per line
  std::string serialize() const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const { return sections_; }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

// Typed reads over a Config that record every key they touch together with
// the value actually used (supplied or default). The materialized view is
// what runs embed in their summaries, so a run can be reproduced from its
// own output.
class ConfigView {
 public:
  explicit ConfigView(const Config& cfg) : cfg_(&cfg) {}

  std::string get_string(const std::string& section, const std::string& key, const std::string& def);
  std::string require_string(const std::string& section, const std::string& key);
  double get_double(const std::string& section, const std::string& key, double def);
  std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t def);
  bool get_bool(const std::string& section, const std::string& key, bool def);
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  const std::string& def);
  std::vector<std::int64_t> get_ints(const std::string& section, const std::string& key,
                                     const std::string& def);
  bool has(const std::string& section, const std::string& key) const;

  const std::map<std::string, std::string>& materialized() const { return mat_; }
  // fingerprint of the materialized view (order-independent)
  std::uint64_t fingerprint() const;

 private:
  std::string raw_or(const std::string& section, const std::string& key, const std::string& def);
  const Config* cfg_;
  std::map<std::string, std::string> mat_;
};

}  // namespace fpp
