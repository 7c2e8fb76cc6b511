#pragma once

#include <stdexcept>
#include <string>

namespace sral {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define SRAL_DEFINE_ERROR(Name)                              \
  class Name : public Error {                                \
   public:                                                   \
    explicit Name(const std::string& what) : Error(what) {}  \
  }

SRAL_DEFINE_ERROR(NonSquare);
SRAL_DEFINE_ERROR(InvalidP);
SRAL_DEFINE_ERROR(DimMismatch);
SRAL_DEFINE_ERROR(EigenvalueOnContour);
SRAL_DEFINE_ERROR(SingularResolvent);
SRAL_DEFINE_ERROR(ShapeMismatch);
SRAL_DEFINE_ERROR(LengthMismatch);
SRAL_DEFINE_ERROR(BudgetExceeded);
SRAL_DEFINE_ERROR(RowSumExceeded);
SRAL_DEFINE_ERROR(CoefficientTooLarge);
SRAL_DEFINE_ERROR(RadiusNotBelowOne);
SRAL_DEFINE_ERROR(ClosureViolated);
SRAL_DEFINE_ERROR(NotInAlgebra);
SRAL_DEFINE_ERROR(IdealNotNil);
SRAL_DEFINE_ERROR(NotNilFamily);
SRAL_DEFINE_ERROR(ChainNotInvariant);
SRAL_DEFINE_ERROR(TooFewFactors);
SRAL_DEFINE_ERROR(RadicalHypothesisViolated);
SRAL_DEFINE_ERROR(NodeCountZero);
SRAL_DEFINE_ERROR(YNotInvariant);
SRAL_DEFINE_ERROR(NotSurjectiveOnSubspace);
SRAL_DEFINE_ERROR(ContractionFails);
SRAL_DEFINE_ERROR(LambdaNotInSpectrum);
SRAL_DEFINE_ERROR(ParseError);

#undef SRAL_DEFINE_ERROR

}  // namespace sral
