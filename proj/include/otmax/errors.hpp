#pragma once

#include <stdexcept>
#include <string>

namespace otmax {

// Half-line domain too short to absorb the transported mass.
// `required_extension` is the minimal extra length that would make the
// problem feasible.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(const std::string& what, double required_extension)
      : std::runtime_error(what), required_extension(required_extension) {}
  double required_extension = 0.0;
};

// Requested construction finer than the underlying grid supports.
class ResolutionError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Geometry outside the supported class (e.g. a reflection that is not
// axis-aligned, or a grid that is not symmetric under it).
class UnsupportedGeometryError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The flow solver finished but its optimality certificate does not hold.
class CertificateError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace otmax
