#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hf::cli {

// Flat key-value experiment configuration.
//
// Grammar, one entry per line:
//   section.key = value      # trailing comments allowed
// Values are numbers, booleans (true/false/yes/no/1/0), bare or
// double-quoted strings, or arrays of numbers ([1, 2.5, 3] — brackets
// optional). '#' starts a comment, blank lines are skipped, duplicate keys
// are rejected. Parse and type errors carry the line number.
class ConfigFile {
 public:
  ConfigFile() = default;

  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text, const std::string& name = "<string>");

  bool has(const std::string& key) const;

  std::string get_str(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& fallback) const;
  std::int64_t get_i64(const std::string& key) const;
  std::int64_t get_i64(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  double get_f64(const std::string& key) const;
  double get_f64(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_f64_list(const std::string& key) const;
  std::vector<double> get_f64_list(const std::string& key,
                                   const std::vector<double>& fallback) const;
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;

  const std::map<std::string, std::string>& entries() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };

  const Entry& require(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const std::string& why) const;

  std::string name_ = "<empty>";
  std::map<std::string, Entry> entries_;
  mutable std::map<std::string, std::string> raw_view_;  // built lazily for entries()
};

}  // namespace hf::cli
