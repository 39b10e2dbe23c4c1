#pragma once

#include <stdexcept>
#include <string>

namespace vit {

/// Input outside an operation's domain (negative cooperativity, zero width, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure did not reach its stated tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or input file.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {
inline void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}
}  // namespace detail

}  // namespace vit
