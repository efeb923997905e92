#pragma once

#include <stdexcept>

namespace oqsim {

// Invalid build-time configuration: grid sizes, preset names, config files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Array or matrix dimensions that do not match the grids involved.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Value-level precondition violations: unnormalized states, non-Hermitian
// observables, out-of-range indices.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical contract breaches detected at run time: norm drift, residues
// above tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Hard size caps (dense-oracle and phase-space table limits).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace oqsim
