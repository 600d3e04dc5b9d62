#pragma once

#include <stdexcept>
#include <string>

namespace beamstab {

enum class ErrorKind {
  Domain,
  Admissibility,
  Spec,
  SingularWeight,
  SpectralPoint,
  Fit,
  Numeric,
  Infeasible,
  UnsupportedMap,
  ConstructionUndefined,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define BEAMSTAB_DEFINE_ERROR(Name, Kind)                              \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

BEAMSTAB_DEFINE_ERROR(DomainError, Domain)
BEAMSTAB_DEFINE_ERROR(AdmissibilityError, Admissibility)
BEAMSTAB_DEFINE_ERROR(SpecError, Spec)
BEAMSTAB_DEFINE_ERROR(SingularWeightError, SingularWeight)
BEAMSTAB_DEFINE_ERROR(SpectralPointError, SpectralPoint)
BEAMSTAB_DEFINE_ERROR(FitError, Fit)
BEAMSTAB_DEFINE_ERROR(NumericError, Numeric)
BEAMSTAB_DEFINE_ERROR(InfeasibleError, Infeasible)
BEAMSTAB_DEFINE_ERROR(UnsupportedMapError, UnsupportedMap)
BEAMSTAB_DEFINE_ERROR(ConstructionUndefinedError, ConstructionUndefined)

#undef BEAMSTAB_DEFINE_ERROR

}  // namespace beamstab
