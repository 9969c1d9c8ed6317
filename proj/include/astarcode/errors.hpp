#pragma once

#include <stdexcept>
#include <string>

namespace astarcode {

// Every failure raised by the library derives from Error so callers (the CLI
// in particular) can catch one type and still switch on the concrete kind.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ASTARCODE_DEFINE_ERROR(Name)          \
  class Name : public Error {                 \
   public:                                    \
    using Error::Error;                       \
  }

ASTARCODE_DEFINE_ERROR(DomainError);
ASTARCODE_DEFINE_ERROR(DegenerateRegionError);
ASTARCODE_DEFINE_ERROR(UnboundedRatioError);
ASTARCODE_DEFINE_ERROR(AbsoluteContinuityError);
ASTARCODE_DEFINE_ERROR(UnsupportedPairError);
ASTARCODE_DEFINE_ERROR(DepthExceededError);
ASTARCODE_DEFINE_ERROR(InvalidCodeError);
ASTARCODE_DEFINE_ERROR(BudgetExhaustedError);
ASTARCODE_DEFINE_ERROR(DegenerateTargetError);
ASTARCODE_DEFINE_ERROR(MalformedMessageError);
ASTARCODE_DEFINE_ERROR(ConstraintError);
ASTARCODE_DEFINE_ERROR(InfeasibleError);
ASTARCODE_DEFINE_ERROR(ConfigError);

#undef ASTARCODE_DEFINE_ERROR

}  // namespace astarcode
