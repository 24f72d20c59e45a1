#include "qgi/objects.hpp"

#include <cmath>
#include <string>

#include "qgi/error.hpp"

namespace qgi {

Vec2 SampledObject::pixel_center(std::size_t ix, std::size_t iy) const {
  const double cx = (static_cast<double>(nx) - 1.0) / 2.0;
  const double cy = (static_cast<double>(ny) - 1.0) / 2.0;
  return {(static_cast<double>(ix) - cx) * pixel_pitch,
          (static_cast<double>(iy) - cy) * pixel_pitch};
}

SampledObject SampledObject::slit(std::vector<cplx> values, double pitch) {
  SampledObject obj;
  obj.dimensionality = Dimensionality::Slit1D;
  obj.pixel_pitch = pitch;
  obj.nx = values.size();
  obj.ny = 1;
  obj.values = std::move(values);
  validate(obj);
  return obj;
}

SampledObject SampledObject::grid(std::size_t nx, std::size_t ny, std::vector<cplx> values,
                                  double pitch) {
  SampledObject obj;
  obj.dimensionality = Dimensionality::Full2D;
  obj.pixel_pitch = pitch;
  obj.nx = nx;
  obj.ny = ny;
  obj.values = std::move(values);
  validate(obj);
  return obj;
}

void validate(const TwoPointObject& obj) {
  if (!isfinite(obj.separation)) throw DomainError("two-point separation must be finite");
  if (obj.amp_origin == cplx{} && obj.amp_a == cplx{}) {
    throw DomainError("two-point object needs at least one nonzero amplitude");
  }
}

void validate(const SampledObject& obj) {
  if (!(obj.pixel_pitch > 0.0) || !std::isfinite(obj.pixel_pitch)) {
    throw DomainError("pixel_pitch must be positive");
  }
  if (obj.nx == 0 || obj.ny == 0 || obj.values.size() != obj.nx * obj.ny) {
    throw DomainError("sampled object shape " + std::to_string(obj.nx) + "x" +
                      std::to_string(obj.ny) + " does not match " +
                      std::to_string(obj.values.size()) + " values");
  }
  if (obj.dimensionality == Dimensionality::Slit1D && obj.ny != 1) {
    throw DomainError("a Slit1D object has exactly one row");
  }
  for (const auto& v : obj.values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw DomainError("sampled object contains non-finite transmission");
    }
  }
}

std::vector<ObjectNode> object_nodes(const TwoPointObject& obj) {
  validate(obj);
  return {{Vec2{}, obj.amp_origin, 1.0}, {obj.separation, obj.amp_a, 1.0}};
}

std::vector<ObjectNode> object_nodes(const SampledObject& obj) {
  validate(obj);
  std::vector<ObjectNode> nodes;
  nodes.reserve(obj.size());
  const double w = obj.pixel_pitch * obj.pixel_pitch;
  for (std::size_t iy = 0; iy < obj.ny; ++iy) {
    for (std::size_t ix = 0; ix < obj.nx; ++ix) {
      nodes.push_back({obj.pixel_center(ix, iy), obj.values[iy * obj.nx + ix], w});
    }
  }
  return nodes;
}

std::vector<ObjectNode> object_nodes(const ObjectModel& obj) {
  return std::visit([](const auto& o) { return object_nodes(o); }, obj);
}

cplx ipow(cplx z, int n) {
  cplx r{1.0, 0.0};
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

}  // namespace qgi
