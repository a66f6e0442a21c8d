#pragma once

#include <stdexcept>
#include <string>

namespace numrange {

/// Base of every error raised by the library. `code()` names the failure
/// kind so callers (the CLI in particular) can map it to exit codes.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define NUMRANGE_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(#Name, what) {}    \
  };

NUMRANGE_DEFINE_ERROR(NotHermitian)
NUMRANGE_DEFINE_ERROR(RankDeficient)
NUMRANGE_DEFINE_ERROR(DimensionMismatch)
NUMRANGE_DEFINE_ERROR(OutsideRange)
NUMRANGE_DEFINE_ERROR(NumericalBreakdown)
NUMRANGE_DEFINE_ERROR(ExhaustedTail)
NUMRANGE_DEFINE_ERROR(BadSignConfiguration)
NUMRANGE_DEFINE_ERROR(DegeneratePair)
NUMRANGE_DEFINE_ERROR(EndpointNotAttained)
NUMRANGE_DEFINE_ERROR(OutOfRangeEntry)
NUMRANGE_DEFINE_ERROR(IncompatibleStreams)
NUMRANGE_DEFINE_ERROR(NotADiagonal)
NUMRANGE_DEFINE_ERROR(InvalidInput)

#undef NUMRANGE_DEFINE_ERROR

}  // namespace numrange
