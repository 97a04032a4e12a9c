// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ppcloud {

/// Real values on a subset (the domain) of a partition's boxes, addressed by
/// the partition's linear box index.
class LatticeField {
 public:
  LatticeField() = default;
  explicit LatticeField(std::size_t n) : values_(n, 0.0), defined_(n, 0) {}

  /// Field defined everywhere with the given values.
  static LatticeField full(std::vector<double> values) {
    LatticeField f(values.size());
    f.values_ = std::move(values);
    f.defined_.assign(f.values_.size(), 1);
    f.check_finite();
    return f;
  }

  std::size_t size() const { return values_.size(); }
  bool defined(std::size_t j) const { return defined_[j] != 0; }
  double operator[](std::size_t j) const {
    if (!defined(j)) throw std::out_of_range("LatticeField: value undefined on this box");
    return values_[j];
  }

  void set(std::size_t j, double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("LatticeField: non-finite value");
    values_[j] = v;
    defined_[j] = 1;
  }
  void unset(std::size_t j) {
    values_[j] = 0.0;
    defined_[j] = 0;
  }

  std::size_t domain_size() const {
    std::size_t n = 0;
    for (char c : defined_) n += c != 0;
    return n;
  }
  bool is_full() const { return domain_size() == size(); }

  std::vector<std::size_t> domain() const {
    std::vector<std::size_t> d;
    for (std::size_t j = 0; j < size(); ++j)
      if (defined(j)) d.push_back(j);
    return d;
  }

  /// Raw storage; undefined entries read as 0.
  const std::vector<double>& raw() const { return values_; }

 private:
  void check_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("LatticeField: non-finite value");
  }

  std::vector<double> values_;
  std::vector<char> defined_;
};

}  // namespace ppcloud
