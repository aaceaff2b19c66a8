#include "fpp/config.hpp"

#include <fstream>
#include <sstream>

#include "fpp/errors.hpp"
#include "fpp/util.hpp"

namespace fpp {

Config Config::parse(std::string_view text) {
  Config cfg;
  std::string section;
  std::size_t lineno = 0, pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++lineno;
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
      cfg.sections_[section];  // a section may legitimately stay empty
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key{trim(line.substr(0, eq))};
    const std::string value{trim(line.substr(eq + 1))};
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": key outside any [section]");
    auto [it, fresh] = cfg.sections_[section].emplace(key, value);
    if (!fresh)
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + section + "." + key +
                        "'");
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.contains(key);
}

std::optional<std::string> Config::get(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

void Config::set(const std::string& section, const std::string& key, std::string value) {
  if (section.empty() || key.empty()) throw ConfigError("config set: empty section or key");
  sections_[section][key] = std::move(value);
}

void Config::set_dotted(const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override needs section.key=value: " + assignment);
  const std::string dotted{trim(assignment.substr(0, eq))};
  const std::string value{trim(assignment.substr(eq + 1))};
  const std::size_t dot = dotted.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == dotted.size())
    throw ConfigError("override needs section.key=value: " + assignment);
  set(dotted.substr(0, dot), dotted.substr(dot + 1), value);
}

std::string Config::serialize() const {
  std::string out;
  for (const auto& [sec, kv] : sections_) {
    out += "[" + sec + "]\n";
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  }
  return out;
}

std::string ConfigView::raw_or(const std::string& section, const std::string& key, const std::string& def) {
  const auto got = cfg_->get(section, key);
  const std::string val = got.value_or(def);
  mat_[section + "." + key] = val;
  return val;
}

std::string ConfigView::get_string(const std::string& section, const std::string& key,
                                   const std::string& def) {
  return raw_or(section, key, def);
}

std::string ConfigView::require_string(const std::string& section, const std::string& key) {
  const auto got = cfg_->get(section, key);
  if (!got) throw ConfigError("config: missing required key '" + section + "." + key + "'");
  mat_[section + "." + key] = *got;
  return *got;
}

double ConfigView::get_double(const std::string& section, const std::string& key, double def) {
  const std::string raw = raw_or(section, key, fmt_double(def));
  const auto v = parse_double(raw);
  if (!v) throw ConfigError("config: '" + section + "." + key + "' is not a number: " + raw);
  return *v;
}

std::int64_t ConfigView::get_int(const std::string& section, const std::string& key, std::int64_t def) {
  const std::string raw = raw_or(section, key, std::to_string(def));
  const auto v = parse_int(raw);
  if (!v) throw ConfigError("config: '" + section + "." + key + "' is not an integer: " + raw);
  return *v;
}

bool ConfigView::get_bool(const std::string& section, const std::string& key, bool def) {
  const std::string raw = raw_or(section, key, def ? "true" : "false");
  if (raw == "true" || raw == "1") return true;
  if (raw == "false" || raw == "0") return false;
  throw ConfigError("config: '" + section + "." + key + "' must be true/false: " + raw);
}

std::vector<double> ConfigView::get_doubles(const std::string& section, const std::string& key,
                                            const std::string& def) {
  const std::string raw = raw_or(section, key, def);
  std::vector<double> out;
  for (const std::string& tok : split(raw, ',')) {
    const auto v = parse_double(tok);
    if (!v) throw ConfigError("config: '" + section + "." + key + "' has a bad number: " + tok);
    out.push_back(*v);
  }
  return out;
}

std::vector<std::int64_t> ConfigView::get_ints(const std::string& section, const std::string& key,
                                               const std::string& def) {
  const std::string raw = raw_or(section, key, def);
  std::vector<std::int64_t> out;
  for (const std::string& tok : split(raw, ',')) {
    const auto v = parse_int(tok);
    if (!v) throw ConfigError("config: '" + section + "." + key + "' has a bad integer: " + tok);
    out.push_back(*v);
  }
  return out;
}

bool ConfigView::has(const std::string& section, const std::string& key) const {
  return cfg_->has(section, key);
}

std::uint64_t ConfigView::fingerprint() const {
  std::string canon;
  for (const auto& [k, v] : mat_) canon += k + "=" + v + "\n";
  return fnv1a64(canon);
}

}  // namespace fpp
