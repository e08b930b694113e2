#pragma once

#include <stdexcept>
#include <string>

namespace hrbr {

// Base for every error raised by the library. Callers that only care about
// "something went wrong" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HRBR_DEFINE_ERROR(Name)              \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

HRBR_DEFINE_ERROR(SingularMatrix);
HRBR_DEFINE_ERROR(DimensionMismatch);
HRBR_DEFINE_ERROR(OutOfRange);
HRBR_DEFINE_ERROR(FailedProcessPresent);
HRBR_DEFINE_ERROR(UnsupportedScheme);
HRBR_DEFINE_ERROR(NoRedundancyAllocated);
HRBR_DEFINE_ERROR(VictimNotAlive);
HRBR_DEFINE_ERROR(ChecksumBroken);
HRBR_DEFINE_ERROR(NoSpareAvailable);
HRBR_DEFINE_ERROR(SingularTransformation);
HRBR_DEFINE_ERROR(SpeedupTooSmall);
HRBR_DEFINE_ERROR(InvalidArgument);

#undef HRBR_DEFINE_ERROR

}  // namespace hrbr
