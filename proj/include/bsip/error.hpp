#pragma once

#include <stdexcept>
#include <string>

namespace bsip {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input (empty window, duplicate abscissae, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// A value or index falls outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Geometry or data that makes a quantity undefined (coincident landmarks,
// motionless trunk, both norms zero in the error metric).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Least-squares design matrix without full column rank.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

// CSV / config parse failure. line() is 1-based, 0 when not line-specific.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Generator scenario violating geometry or parameter ranges.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

// Wraps a failure with the pipeline stage it came from ("sync", "smoothing", ...).
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace bsip
