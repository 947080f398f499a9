#pragma once

#include <stdexcept>
#include <string>

namespace hwave {

/// Error vocabulary shared by all modules. The split matters at the CLI
/// boundary: configuration-class errors map to exit code 2, numeric-class
/// errors to exit code 3.

/// A value outside an operation's documented domain (bad exponent, grid
/// mismatch, window with no rows, ...).
struct InvalidParameter : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Grid cannot serve the requested discrete operator (n != 1, axis too short).
struct UnsupportedGrid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A pointwise sampler produced a non-finite value; message carries the node.
struct SamplingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Loud failure of a numeric evaluation (weight overflow, non-finite norm).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Decay-fit window contains too few rows or nonpositive values.
struct InvalidWindow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bump construction failed its derivative-domination audit.
struct ProfileViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Configuration file problem; keeps line/key for CLI diagnostics.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, int line_number = 0, std::string key_name = {})
      : std::runtime_error(msg), line(line_number), key(std::move(key_name)) {}
  int line;
  std::string key;
};

}  // namespace hwave
