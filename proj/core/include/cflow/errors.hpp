#pragma once

#include <stdexcept>
#include <string>

namespace cflow {

/// Bad argument to a library call (shape mismatch, out-of-range axis, ...).
class InvalidArgument : public std::invalid_argument {
public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

/// Config file failed to parse or validate; message names the offending key.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// The discrete flow left the target chart (ball boundary guard) or produced
/// non-finite values. Carries no state; run_flow reports the last valid state.
class FlowDiverged : public std::runtime_error {
public:
  explicit FlowDiverged(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cflow
