#pragma once

#include <stdexcept>
#include <string>

namespace boxanneal {

/// Input outside the documented domain of an operation.
using DomainError = std::domain_error;

/// An iterative numerical routine failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time propagation aborted; carries the simulation time of the failure.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time)
      : std::runtime_error(what + " (t = " + std::to_string(time) + ")"), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace boxanneal
