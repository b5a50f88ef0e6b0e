#ifndef LATNC_ERRORS_HPP
#define LATNC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace latnc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define LATNC_DEFINE_ERROR(name)                 \
  struct name : Error {                          \
    using Error::Error;                          \
  };

LATNC_DEFINE_ERROR(RankDeficient)
LATNC_DEFINE_ERROR(NonFinite)
LATNC_DEFINE_ERROR(DimensionMismatch)
LATNC_DEFINE_ERROR(NegativeSnr)
LATNC_DEFINE_ERROR(IndexOutOfRange)
LATNC_DEFINE_ERROR(CodewordNotInCodebook)
LATNC_DEFINE_ERROR(OddL)
LATNC_DEFINE_ERROR(ConstructionFailed)
LATNC_DEFINE_ERROR(ConstellationViolation)
LATNC_DEFINE_ERROR(SingularTriangle)
LATNC_DEFINE_ERROR(NonDivisible)
LATNC_DEFINE_ERROR(LengthMismatch)
LATNC_DEFINE_ERROR(LengthNotMultiple)
LATNC_DEFINE_ERROR(CodedLengthMismatch)
LATNC_DEFINE_ERROR(NonPositiveInput)
LATNC_DEFINE_ERROR(ParseError)
LATNC_DEFINE_ERROR(ValidationError)
LATNC_DEFINE_ERROR(IoError)

#undef LATNC_DEFINE_ERROR

}  // namespace latnc

#endif
