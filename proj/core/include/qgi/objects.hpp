#pragma once

#include <complex>
#include <cstddef>
#include <variant>
#include <vector>

#include "qgi/vec2.hpp"

namespace qgi {

using cplx = std::complex<double>;

/// Two point scatterers, one at the origin and one at `separation`.
struct TwoPointObject {
  cplx amp_origin{1.0, 0.0};
  cplx amp_a{1.0, 0.0};
  Vec2 separation{};
};

enum class Dimensionality { Slit1D, Full2D };

/// Complex transmission sampled on a square pixel grid centred on the optical
/// axis. Slit1D objects are a single row of pixels along x at y = 0.
struct SampledObject {
  Dimensionality dimensionality = Dimensionality::Slit1D;
  double pixel_pitch = 0.0;
  std::size_t nx = 0;
  std::size_t ny = 1;
  std::vector<cplx> values;  ///< row-major, y outer

  Vec2 pixel_center(std::size_t ix, std::size_t iy) const;
  std::size_t size() const { return values.size(); }

  static SampledObject slit(std::vector<cplx> values, double pitch);
  static SampledObject grid(std::size_t nx, std::size_t ny, std::vector<cplx> values,
                            double pitch);
};

void validate(const TwoPointObject& obj);
void validate(const SampledObject& obj);

using ObjectModel = std::variant<TwoPointObject, SampledObject>;

/// One quadrature node of the object-plane integral. A delta scatterer has
/// weight 1; a pixel has weight pitch^2.
struct ObjectNode {
  Vec2 pos;
  cplx amp;
  double weight = 1.0;
};

std::vector<ObjectNode> object_nodes(const TwoPointObject& obj);
std::vector<ObjectNode> object_nodes(const SampledObject& obj);
std::vector<ObjectNode> object_nodes(const ObjectModel& obj);

/// Integer power of a complex amplitude by repeated multiplication.
cplx ipow(cplx z, int n);

}  // namespace qgi
