#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lapmap {

/// Base of every error raised by the library. `code()` is the short token
/// the CLI prints in `ERROR <code>: <message>`.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Argument outside the operation's domain (x outside [a,b], beta <= 0, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error("domain", message) {}
};

/// A map violates one of the piecewise-linear invariants.
class InvariantError : public Error {
 public:
  InvariantError(std::string invariant, const std::string& message)
      : Error("invariant", invariant + ": " + message), invariant_(std::move(invariant)) {}
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

/// Malformed map file or scalar literal.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message) : Error("parse", message) {}
};

/// The iterate breakpoint cap would be exceeded at iterate `n`.
class ResourceError : public Error {
 public:
  ResourceError(std::size_t n, const std::string& message)
      : Error("resource", message), iterate_(n) {}
  std::size_t iterate() const noexcept { return iterate_; }

 private:
  std::size_t iterate_;
};

/// Map outside the class an algorithm supports (e.g. zero entropy for linearization).
class UnsupportedMapError : public Error {
 public:
  explicit UnsupportedMapError(const std::string& message) : Error("unsupported", message) {}
};

/// Rejected numeric configuration (schedule, truncation, tolerances).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error("config", message) {}
};

}  // namespace lapmap
