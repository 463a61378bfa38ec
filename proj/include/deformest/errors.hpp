#pragma once

#include <stdexcept>
#include <string>

namespace deformest {

// A candidate parameter or observation left the region where a map is defined.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// sinh/exp would overflow for the requested arguments.
class OverflowError : public std::overflow_error {
 public:
  explicit OverflowError(const std::string& what) : std::overflow_error(what) {}
};

// Invalid user configuration (intervals, exponents, mismatched states).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A theoretical precondition does not hold (e.g. M''(theta) <= 1/2).
class AssumptionError : public std::runtime_error {
 public:
  explicit AssumptionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace deformest
