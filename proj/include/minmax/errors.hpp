#pragma once

#include <stdexcept>
#include <string>

namespace minmax {

// Base for all library errors so callers can catch one type at the CLI boundary.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define MINMAX_DEFINE_ERROR(Name)                                  \
  struct Name : Error {                                            \
    explicit Name(const std::string& what) : Error(what) {}        \
  };

MINMAX_DEFINE_ERROR(DimensionMismatch)
MINMAX_DEFINE_ERROR(DefectiveMatrix)
MINMAX_DEFINE_ERROR(BlockStructureViolation)
MINMAX_DEFINE_ERROR(DegenerateSpectrum)
MINMAX_DEFINE_ERROR(EigengapTooSmall)
MINMAX_DEFINE_ERROR(NotNormal)
MINMAX_DEFINE_ERROR(AlphaOutOfRange)
MINMAX_DEFINE_ERROR(DegenerateSingularValues)
MINMAX_DEFINE_ERROR(PatternViolation)
MINMAX_DEFINE_ERROR(SingularResolvent)
MINMAX_DEFINE_ERROR(StepTooLarge)
MINMAX_DEFINE_ERROR(RankDeficientConstraints)
MINMAX_DEFINE_ERROR(DomainBoundary)
MINMAX_DEFINE_ERROR(NotStationary)
MINMAX_DEFINE_ERROR(BoundaryWeights)
MINMAX_DEFINE_ERROR(ImplicitSolveFailed)
MINMAX_DEFINE_ERROR(NumericalBlowup)
MINMAX_DEFINE_ERROR(InsufficientDecay)
MINMAX_DEFINE_ERROR(CountMismatch)
MINMAX_DEFINE_ERROR(NotConverged)
MINMAX_DEFINE_ERROR(ConfigError)

#undef MINMAX_DEFINE_ERROR

}  // namespace minmax
