#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "hf/common/error.hpp"

namespace hf {

// Shortest round-trip decimal form; bit-identical output for bit-identical doubles.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw ConfigError("cannot open for writing: " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

}  // namespace hf
