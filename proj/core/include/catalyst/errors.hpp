// Exception types shared across the library: configuration errors, malformed
// input data with line provenance, and non-finite numerics detected at run
// checkpoints.  The command line tool maps ConfigError/DataFormatError to
// exit code 2 and NumericError to exit code 3.
#pragma once

#include <stdexcept>
#include <string>

namespace catalyst {

// Invalid configuration: out-of-range parameter, unsupported flag
// combination, or a stop rule a solver cannot honor.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data.  `line()` is the 1-based line number in the source
// stream, or 0 when the error is not tied to a particular line.
class DataFormatError : public std::runtime_error {
 public:
  explicit DataFormatError(const std::string& what, long line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  long line() const { return line_; }

 private:
  long line_ = 0;
};

// NaN or Inf encountered in inputs or produced during a run.  Raised at
// validation boundaries and trace checkpoints so it never propagates
// silently into results.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace catalyst
