#pragma once

#include <cstdint>
#include <stdexcept>

namespace tvrec {

using Timestamp = std::int64_t;  // UTC seconds
using Duration = std::int64_t;   // seconds

inline constexpr Duration kSecondsPerDay = 86400;
inline constexpr Duration kSecondsPerWeek = 7 * kSecondsPerDay;

/// Malformed, missing or inconsistent input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or command-line usage.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant was violated.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace tvrec
