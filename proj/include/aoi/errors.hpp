#pragma once

#include <stdexcept>
#include <string>

namespace aoi {

/// Caller passed an argument outside the operation's domain (bad index, wrong length, replayed slot).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A cost schedule, channel spec or experiment config fails validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The exact offline solver refused an instance above its size caps.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aoi
