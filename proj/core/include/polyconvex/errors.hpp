#pragma once

#include <stdexcept>
#include <string>

namespace pcx {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define PCX_DEFINE_ERROR(Name)                                  \
  struct Name : Error {                                         \
    explicit Name(const std::string& what) : Error(what) {}     \
  }

PCX_DEFINE_ERROR(DimensionMismatch);
PCX_DEFINE_ERROR(DegenerateInput);
PCX_DEFINE_ERROR(UnknownCell);
PCX_DEFINE_ERROR(IncompatibleComplexes);
PCX_DEFINE_ERROR(PointOutsideCarrier);
PCX_DEFINE_ERROR(PointOutsideComplex);
PCX_DEFINE_ERROR(NotASubOpen);
PCX_DEFINE_ERROR(NotASubdivision);
PCX_DEFINE_ERROR(FunctionNotDefinedOnComplex);
PCX_DEFINE_ERROR(DirectionOutsideCell);
PCX_DEFINE_ERROR(NotCellwiseConcave);
PCX_DEFINE_ERROR(FiberInconsistent);
PCX_DEFINE_ERROR(FaceInconsistency);
PCX_DEFINE_ERROR(ComplexMismatch);
PCX_DEFINE_ERROR(WitnessNotConcave);
PCX_DEFINE_ERROR(WitnessInvalid);
PCX_DEFINE_ERROR(NotPositive);
PCX_DEFINE_ERROR(NotMinkowski);
PCX_DEFINE_ERROR(NotPureDimensional);
PCX_DEFINE_ERROR(StarNotContained);
PCX_DEFINE_ERROR(UnboundedCell);
PCX_DEFINE_ERROR(NotConcaveOnCell);
PCX_DEFINE_ERROR(NotWeaklyConcaveMember);
PCX_DEFINE_ERROR(ParseError);

#undef PCX_DEFINE_ERROR

}  // namespace pcx
