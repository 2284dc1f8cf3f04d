#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fibrank {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Error tied to a specific input record; line numbers are 1-based and
/// 0 when the source location is unknown.
class RecordError : public Error {
public:
  RecordError(const std::string& what, std::size_t line_no = 0)
      : Error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + what : what),
        line_no_(line_no) {}

  std::size_t line_no() const noexcept { return line_no_; }

private:
  std::size_t line_no_;
};

class ParseError : public RecordError {
public:
  using RecordError::RecordError;
};

class ValidationError : public RecordError {
public:
  using RecordError::RecordError;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class StatsError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

} // namespace fibrank
