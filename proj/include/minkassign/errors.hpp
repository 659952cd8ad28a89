#pragma once

#include <stdexcept>
#include <string>

namespace minkassign {

// Bad arguments, precondition violations, unusable inputs. CLI maps these to exit 3.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// The requested enumeration exceeds the configured work cap.
class EnumerationCapError : public DomainError {
 public:
  explicit EnumerationCapError(const std::string& msg) : DomainError(msg) {}
};

// A stated precondition on an operation input failed (e.g. matrix not k-reduced).
class ContractError : public DomainError {
 public:
  explicit ContractError(const std::string& msg) : DomainError(msg) {}
};

// A modular evaluation hit a non-invertible element. Retryable: callers
// resample the evaluation point rather than failing the run.
class UnluckyPrimeError : public std::runtime_error {
 public:
  explicit UnluckyPrimeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Input JSON is malformed or violates a documented schema. CLI maps these to exit 2.
class JsonSchemaError : public std::runtime_error {
 public:
  explicit JsonSchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace minkassign
