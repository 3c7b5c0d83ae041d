#pragma once

#include <stdexcept>
#include <string>

namespace cceg {

// Malformed map text; carries the 1-based line/column when known.
class MapError : public std::runtime_error {
 public:
  MapError(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " +
                                          std::to_string(column) + ": " + what
                                    : what),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// A routing query with no valid answer (unknown exit, nothing reachable).
class RoutingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid simulation, controller or sweep parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File system failures (unreadable input, unwritable output).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cceg
