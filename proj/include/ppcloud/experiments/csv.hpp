// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace ppcloud {

/// Deterministic CSV text builder: reals at fixed precision (%.12g), "nan"
/// for non-finite values, integers verbatim.
class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      if (!first) text_ += ',';
      text_ += h;
      first = false;
    }
    text_ += '\n';
    columns_ = header.size();
  }

  CsvWriter& real(double v) {
    sep();
    if (!std::isfinite(v)) {
      text_ += "nan";
      return *this;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
    text_ += buf;
    return *this;
  }
  CsvWriter& integer(std::int64_t v) {
    sep();
    text_ += std::to_string(v);
    return *this;
  }
  CsvWriter& text(const std::string& v) {
    sep();
    text_ += v;
    return *this;
  }
  CsvWriter& flag(bool v) { return integer(v ? 1 : 0); }
  void end_row() {
    text_ += '\n';
    in_row_ = 0;
    ++rows_;
  }

  const std::string& str() const { return text_; }
  std::size_t rows() const { return rows_; }
  std::size_t columns() const { return columns_; }

 private:
  void sep() {
    if (in_row_++) text_ += ',';
  }
  std::string text_;
  std::size_t columns_ = 0;
  std::size_t in_row_ = 0;
  std::size_t rows_ = 0;
};

/// 17-significant-digit rendering used for point and field files.
inline std::string format_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace ppcloud
