#include "beamstab/errors.hpp"

namespace beamstab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Admissibility: return "admissibility";
    case ErrorKind::Spec: return "spec";
    case ErrorKind::SingularWeight: return "singular-weight";
    case ErrorKind::SpectralPoint: return "spectral-point";
    case ErrorKind::Fit: return "fit";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::UnsupportedMap: return "unsupported-map";
    case ErrorKind::ConstructionUndefined: return "construction-undefined";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

}  // namespace beamstab
