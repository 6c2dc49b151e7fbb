#pragma once

#include <stdexcept>
#include <string>

namespace moilab {

/// Input outside the mathematical domain of an operation (p < 1, a derivative
/// order the function does not have, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A documented precondition of an identity check or decomposition does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical kernel failed (eigensolver did not converge, singular system).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {
[[noreturn]] void throw_precondition(const std::string& where, const std::string& msg);
[[noreturn]] void throw_domain(const std::string& where, const std::string& msg);
}  // namespace detail

}  // namespace moilab
