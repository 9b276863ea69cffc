#pragma once

#include <stdexcept>
#include <string>

namespace erm {

// Violated precondition at an operation boundary (bad dimensions, non-finite
// input, empty batch, out-of-range constant).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a special function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Request exceeds what an exact or grid-based evaluator can handle.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoFeasibleCheckpoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ReproducibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed experiment configuration or report; the message names the field.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace erm
