#pragma once

#include <stdexcept>
#include <string>

namespace spectree {

/// Raised when an input violates a structural or numerical precondition
/// (malformed documents, non-positive weights, maps leaving the vertex set).
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
  ValidationError(const std::string& location, const std::string& what)
      : std::runtime_error(location + ": " + what), location_(location) {}

  const std::string& location() const noexcept { return location_; }

private:
  std::string location_;
};

/// Raised when an operation is invoked outside the regime it is defined for
/// (p != 2 for spectral quantities, n <= N for tail defects).
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

} // namespace spectree
