#pragma once

#include <stdexcept>
#include <string>

namespace qkdforge {

// Dimension/length mismatches and out-of-range indices.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inputs that are well-formed but violate a mathematical contract
// (dependent generator rows, C2 not nested in C1, syndrome collisions, ...).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qkdforge
