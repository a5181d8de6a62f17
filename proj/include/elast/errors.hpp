#pragma once

#include <stdexcept>
#include <string>

namespace elast {

// Thrown when a matrix/vector argument has the wrong shape or violates a
// structural precondition (non-square, asymmetric, dimension mismatch).
class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a matrix required to be positive definite is not.
class SingularityError : public std::runtime_error {
 public:
  explicit SingularityError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on invalid scalar/config parameters (nonpositive variance, empty
// seed list, out-of-range initial conditions, ...).
class ParameterError : public std::runtime_error {
 public:
  explicit ParameterError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a callable handed to an API breaks its stated contract
// (e.g. a "softmax" predictor that does not output a probability vector).
class ContractError : public std::runtime_error {
 public:
  explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on malformed config files; carries a file:line location.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace elast
