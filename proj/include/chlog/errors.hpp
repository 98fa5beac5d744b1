#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace chlog {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid grid size or operands attached to different grids.
class GridError : public Error {
 public:
  using Error::Error;
};

/// A numerical precondition does not hold (nonzero mean, cutoff out of range,
/// non-finite symbol, invalid parameters).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A sample reached the singular endpoints u = +-1 under the abort policy.
class GuardViolation : public Error {
 public:
  GuardViolation(const std::string& what, std::int64_t index, double value,
                 std::int64_t step = -1)
      : Error(what), index_(index), value_(value), step_(step) {}

  std::int64_t index() const noexcept { return index_; }
  double value() const noexcept { return value_; }
  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t index_;
  double value_;
  std::int64_t step_;
};

/// The time step makes the implicit operator singular or violates the
/// solvability bound of the chosen scheme.
class InadmissibleStep : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SnapshotError : public Error {
 public:
  using Error::Error;
};

}  // namespace chlog
