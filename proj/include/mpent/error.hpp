#pragma once

#include <stdexcept>
#include <string>

namespace mpent {

// Raised when a computation violates a domain invariant (non-normalized
// state, non-isometric step, average entropy increase, ...). Malformed
// inputs use std::invalid_argument instead.
class DomainError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace mpent
