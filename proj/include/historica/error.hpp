#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace historica {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or inconsistent configuration (unknown key, bad table, unknown letter).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A driving table or system that violates a precondition of an experiment,
// e.g. a frozen (zero-variance) walk.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ladder index beyond the represented range.
class RangeError : public std::out_of_range {
 public:
  RangeError(const std::string& what, std::int64_t index)
      : std::out_of_range(what), index_(index) {}

  std::int64_t index() const noexcept { return index_; }

 private:
  std::int64_t index_;
};

class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class EmptySampleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace historica
