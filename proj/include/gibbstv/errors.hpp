#pragma once

#include <stdexcept>
#include <string>

namespace gibbstv {

// Process exit codes used by the CLI; every library error maps onto one.
enum class ErrorCode : int {
  invalid_input = 2,
  gate_failure = 3,
  oracle_failure = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Malformed model, mismatched pair, bad pinning, schema violation.
class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what)
      : Error(ErrorCode::invalid_input, what) {}
};

// An estimator precondition (threshold, regime) does not hold.
class GateError : public Error {
 public:
  explicit GateError(const std::string& what)
      : Error(ErrorCode::gate_failure, what) {}
};

// An oracle could not answer: enumeration caps, non-soft input, etc.
class OracleError : public Error {
 public:
  explicit OracleError(const std::string& what)
      : Error(ErrorCode::oracle_failure, what) {}
};

}  // namespace gibbstv
