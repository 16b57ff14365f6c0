#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mvqmc {

/// Invalid configuration or violated precondition. Maps to CLI exit code 2.
class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure during a run. Maps to CLI exit code 3. Carries the
/// time-step index at which the failure occurred, or -1 when not applicable.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what, std::ptrdiff_t step = -1)
      : std::runtime_error(what), step_(step) {}

  std::ptrdiff_t step() const noexcept { return step_; }

 private:
  std::ptrdiff_t step_;
};

}  // namespace mvqmc
