// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace icvi {

/// Invalid configuration or incompatible option combination.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or degenerate input data (CSV cells, ranges, labels).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sample dimension does not match the stream dimension.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation not valid in the object's current state (unknown ids, empty network, ...).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace icvi
