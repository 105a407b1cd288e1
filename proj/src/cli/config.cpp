#include "hf/cli/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "hf/common/error.hpp"

namespace hf::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool valid_key(const std::string& k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-'))
      return false;
  return k.find('.') != std::string::npos;
}

bool parse_f64(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

bool parse_i64(const std::string& s, std::int64_t& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  if (ec == std::errc() && p == e) return true;
  // accept integral values written in float notation (1e5, 2.0)
  double d;
  if (!parse_f64(s, d)) return false;
  auto rounded = static_cast<std::int64_t>(d);
  if (static_cast<double>(rounded) != d) return false;
  out = rounded;
  return true;
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& name) {
  ConfigFile cfg;
  cfg.name_ = name;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string stripped = trim(line);
    if (stripped.empty()) continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError(name + ":" + std::to_string(lineno) + ": expected 'section.key = value'");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (!valid_key(key))
      throw ConfigError(name + ":" + std::to_string(lineno) + ": malformed key '" + key +
                        "' (expected section.key)");
    if (value.empty())
      throw ConfigError(name + ":" + std::to_string(lineno) + ": empty value for '" + key + "'");
    auto [it, inserted] = cfg.entries_.emplace(key, Entry{value, lineno});
    if (!inserted)
      throw ConfigError(name + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                        "' (first set on line " + std::to_string(it->second.line) + ")");
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

bool ConfigFile::has(const std::string& key) const { return entries_.count(key) != 0; }

const ConfigFile::Entry& ConfigFile::require(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(name_ + ": missing required key '" + key + "'");
  return it->second;
}

void ConfigFile::fail(const std::string& key, const std::string& why) const {
  auto it = entries_.find(key);
  int line = it == entries_.end() ? 0 : it->second.line;
  throw ConfigError(name_ + ":" + std::to_string(line) + ": key '" + key + "' " + why);
}

std::string ConfigFile::get_str(const std::string& key) const {
  std::string v = require(key).value;
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

std::string ConfigFile::get_str(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_str(key) : fallback;
}

std::int64_t ConfigFile::get_i64(const std::string& key) const {
  std::int64_t out;
  if (!parse_i64(require(key).value, out)) fail(key, "is not an integer");
  return out;
}

std::int64_t ConfigFile::get_i64(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_i64(key) : fallback;
}

std::uint64_t ConfigFile::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  std::uint64_t out;
  const std::string& v = require(key).value;
  const char* b = v.data();
  const char* e = b + v.size();
  auto [p, ec] = std::from_chars(b, e, out);
  if (ec != std::errc() || p != e) fail(key, "is not an unsigned integer");
  return out;
}

double ConfigFile::get_f64(const std::string& key) const {
  double out;
  if (!parse_f64(require(key).value, out)) fail(key, "is not a number");
  return out;
}

double ConfigFile::get_f64(const std::string& key, double fallback) const {
  return has(key) ? get_f64(key) : fallback;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = require(key).value;
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  fail(key, "is not a boolean (use true/false)");
}

std::vector<double> ConfigFile::get_f64_list(const std::string& key) const {
  std::string v = require(key).value;
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') fail(key, "has an unterminated '['");
    v = v.substr(1, v.size() - 2);
  }
  std::vector<double> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(key, "has an empty array element");
    double d;
    if (!parse_f64(item, d)) fail(key, "has a non-numeric array element '" + item + "'");
    out.push_back(d);
  }
  return out;
}

std::vector<double> ConfigFile::get_f64_list(const std::string& key,
                                             const std::vector<double>& fallback) const {
  return has(key) ? get_f64_list(key) : fallback;
}

std::vector<int> ConfigFile::get_int_list(const std::string& key,
                                          const std::vector<int>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<int> out;
  for (double d : get_f64_list(key)) {
    int i = static_cast<int>(d);
    if (static_cast<double>(i) != d) fail(key, "has a non-integer array element");
    out.push_back(i);
  }
  return out;
}

const std::map<std::string, std::string>& ConfigFile::entries() const {
  if (raw_view_.size() != entries_.size()) {
    raw_view_.clear();
    for (const auto& [k, e] : entries_) raw_view_.emplace(k, e.value);
  }
  return raw_view_;
}

}  // namespace hf::cli
