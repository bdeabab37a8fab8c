#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace omr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Image bytes could not be decoded.
class InputFormatError : public Error {
 public:
  using Error::Error;
};

/// Malformed record in a detection file. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a domain constraint (unknown label,
/// confidence out of range, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Measure boxes could not be organized into rows.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// External detector failed (nonzero exit, unreadable output).
class DetectorError : public Error {
 public:
  using Error::Error;
};

/// Non-fatal finding attached to a stage or a measure.
struct Diagnostic {
  std::string code;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using Diagnostics = std::vector<Diagnostic>;

inline void report(Diagnostics* sink, std::string code, std::string message) {
  if (sink != nullptr) sink->push_back({std::move(code), std::move(message)});
}

}  // namespace omr
