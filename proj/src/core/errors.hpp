#pragma once

#include <stdexcept>
#include <string>

namespace memsdde {

// Error taxonomy shared by the C++ core, the C API status codes and the CLI
// exit codes. Keep the grouping in sync with mdde_status in memsdde.h.
enum class ErrorCode {
  Config,                  // malformed configuration or violated user-facing precondition
  PullInExceeded,
  NotAnEquilibrium,
  VoltageRangeInvalid,
  SignAssumptionViolated,
  NotHurwitz,
  SingularMatrix,
  NoLstarRoot,
  Inapplicable,            // check structurally inapplicable to the configuration
  NonPositiveGap,
  HistoryTooShort,
  NoConvergence,
  NotConverged,
  NegativeGapOrbit,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace memsdde
