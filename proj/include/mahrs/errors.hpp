#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mahrs {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of an operation (non-unit axis, chart point
// outside its image, non-finite input, bad dt).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Two direction vectors are too close to parallel to span a frame.
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

// Filter arithmetic broke down (singular innovation covariance, NaN).
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual_norm, double p_trace)
      : Error(what), residual_norm_(residual_norm), p_trace_(p_trace) {}

  double residual_norm() const { return residual_norm_; }
  double p_trace() const { return p_trace_; }

 private:
  double residual_norm_;
  double p_trace_;
};

// Invalid scenario configuration; `key_path` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key_path, const std::string& what)
      : Error(key_path.empty() ? what : key_path + ": " + what), key_path_(key_path) {}

  const std::string& key_path() const { return key_path_; }

 private:
  std::string key_path_;
};

// Malformed input file; `line` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace mahrs
