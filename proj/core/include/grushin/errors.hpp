#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace grushin {

// Key/value pairs attached to a failure so front ends can print them.
using Diagnostics = std::vector<std::pair<std::string, double>>;

// Bad user input: malformed profile, inconsistent covector, violated precondition.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Solver failure: step underflow, drift abort, bracket not found.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, Diagnostics diag = {})
      : std::runtime_error(what), diag_(std::move(diag)) {}
  const Diagnostics& diagnostics() const { return diag_; }

 private:
  Diagnostics diag_;
};

}  // namespace grushin
