#include "moilab/errors.hpp"

namespace moilab::detail {

void throw_precondition(const std::string& where, const std::string& msg) {
  throw PreconditionError(where + ": " + msg);
}

void throw_domain(const std::string& where, const std::string& msg) {
  throw DomainError(where + ": " + msg);
}

}  // namespace moilab::detail
