#pragma once

#include <stdexcept>
#include <string>

namespace hftkin {

// Invalid parameters or configuration documents.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A quantity that is mathematically undefined for the given inputs.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// No transaction within the configured step budget.
struct StarvationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Explicit PDE step refused because it would violate the stability bound.
struct StabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hftkin
