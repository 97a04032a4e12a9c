// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ppcloud {

/// A realization fell outside the regime an operation needs (e.g. an empty
/// good box or a bad component with no boundary). Carries a stable reason
/// code that experiment records report for aborted trials.
class RegimeError : public std::domain_error {
 public:
  RegimeError(std::string code, const std::string& what)
      : std::domain_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace ppcloud
