#pragma once

#include <stdexcept>
#include <string>

namespace qham {

enum class ErrorCode {
  kBadConfig = 1,
  kDimensionMismatch = 2,
  kBranchCut = 3,
  kInfeasible = 4,
  kNonPeriodic = 5,
  kNotTangent = 6,
  kInternal = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace qham
