#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ctxclass {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unreadable input. `line()` is 1-based, 0 when not tied to a line.
class LoadError : public Error {
 public:
  explicit LoadError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An operation was called with inputs outside its contract.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctxclass
