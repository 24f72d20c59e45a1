#include "qgi/analytic_imaging.hpp"

#include <cmath>
#include <string>

#include "qgi/error.hpp"

namespace qgi {

namespace {

// Quadratic object-plane phase coefficient N*K1/2 * (1/L1 + 1/(d1 + N*lambda2/lambda1*d2)).
double object_curvature_cfgI(const ImagingGeometry& geom, const SourceSpec& src) {
  const int n = src.n_degenerate;
  const double x = geom.d1 + n * src.lambda2 / src.lambda1 * geom.d2;
  return n * src.k1() / 2.0 * (1.0 / geom.L1 + 1.0 / x);
}

double object_curvature_cfgII(const ImagingGeometry& geom, const SourceSpec& src) {
  return src.k2() / 2.0 * (1.0 / geom.L2 + 1.0 / *geom.d2_prime);
}

double pupil_scale(const ImagingGeometry& geom, const SourceSpec& src) {
  return kTwoPi * geom.R / src.lambda2;
}

void check_cfgI(const ImagingGeometry& geom, const SourceSpec& src) {
  validate(geom, Configuration::ObjectInDegenerateArm);
  validate(src);
  require_thin_lens(geom, src, Configuration::ObjectInDegenerateArm);
}

void check_cfgII(const ImagingGeometry& geom, const SourceSpec& src) {
  validate(geom, Configuration::ObjectInAncillaArm);
  validate(src);
  require_thin_lens(geom, src, Configuration::ObjectInAncillaArm);
}

}  // namespace

void validate(const DetectionScheme& det) {
  if (const auto* p = std::get_if<PointDetector>(&det)) {
    if (!isfinite(p->position)) throw DomainError("point detector position must be finite");
    return;
  }
  const auto& b = std::get<BucketDetector>(det);
  if (!(b.area > 0.0)) throw DomainError("bucket area must be positive");
  if (!(b.extent.width > 0.0) || !(b.extent.height > 0.0)) {
    throw DomainError("bucket extent must have positive width and height");
  }
  if (std::fabs(b.extent.area() - b.area) > 1e-9 * b.area) {
    throw DomainError("bucket extent area " + std::to_string(b.extent.area()) +
                      " does not match s_b " + std::to_string(b.area));
  }
}

double scatterer_phase_cfgI(const ImagingGeometry& geom, const SourceSpec& src, Vec2 a,
                            Vec2 rho1) {
  const int n = src.n_degenerate;
  return object_curvature_cfgI(geom, src) * norm2(a) - n * src.k1() * dot(a, rho1) / geom.L1;
}

double scatterer_phase_cfgII(const ImagingGeometry& geom, const SourceSpec& src, Vec2 a,
                             Vec2 rho2) {
  return object_curvature_cfgII(geom, src) * norm2(a) - src.k2() * dot(rho2, a) / geom.L2;
}

cplx amplitude_cfgI(const ImagingGeometry& geom, const SourceSpec& src,
                    const std::vector<ObjectNode>& nodes, Vec2 rho1, Vec2 rho2) {
  check_cfgI(geom, src);
  const double eff = effective_object_distance(geom, src, Configuration::ObjectInDegenerateArm);
  const double k = pupil_scale(geom, src);
  const Vec2 image_dir = rho2 / geom.L2;
  cplx sum{};
  for (const auto& node : nodes) {
    if (node.amp == cplx{}) continue;
    const double phase = scatterer_phase_cfgI(geom, src, node.pos, rho1);
    const double s = somb(k * norm(image_dir + node.pos / eff));
    sum += ipow(node.amp, src.n_degenerate) * node.weight * std::polar(1.0, phase) * s;
  }
  return sum;
}

cplx amplitude_cfgII(const ImagingGeometry& geom, const SourceSpec& src,
                     const std::vector<ObjectNode>& nodes, Vec2 rho1, Vec2 rho2) {
  check_cfgII(geom, src);
  const double eff = effective_object_distance(geom, src, Configuration::ObjectInAncillaArm);
  const double k = pupil_scale(geom, src);
  const double dp = *geom.d2_prime;
  cplx sum{};
  for (const auto& node : nodes) {
    if (node.amp == cplx{}) continue;
    const double phase = scatterer_phase_cfgII(geom, src, node.pos, rho2);
    const double s = somb(k * norm(node.pos / dp + rho1 / eff));
    sum += node.amp * node.weight * std::polar(1.0, phase) * s;
  }
  return sum;
}

double intensity_bucket(const ImagingGeometry& geom, const SourceSpec& src,
                        const std::vector<ObjectNode>& nodes, double bucket_area, Vec2 rho2) {
  check_cfgI(geom, src);
  if (!(bucket_area > 0.0)) throw DomainError("bucket area must be positive");
  const int n = src.n_degenerate;
  const double eff = effective_object_distance(geom, src, Configuration::ObjectInDegenerateArm);
  const double k = pupil_scale(geom, src);
  const Vec2 image_dir = rho2 / geom.L2;
  double sum = 0.0;
  for (const auto& node : nodes) {
    const double a2 = std::norm(node.amp);
    if (a2 == 0.0) continue;
    const double s = somb(k * norm(image_dir + node.pos / eff));
    sum += std::pow(a2, n) * node.weight * s * s;
  }
  return std::pow(bucket_area, n) * sum;
}

cplx amplitude_two_point_cfgI(const ImagingGeometry& geom, const SourceSpec& src,
                              const TwoPointObject& obj, const PointDetector& det, Vec2 rho2) {
  return amplitude_cfgI(geom, src, object_nodes(obj), det.position, rho2);
}

double intensity_bucket_cfgI(const ImagingGeometry& geom, const SourceSpec& src,
                             const TwoPointObject& obj, const BucketDetector& det, Vec2 rho2) {
  validate(DetectionScheme{det});
  return intensity_bucket(geom, src, object_nodes(obj), det.area, rho2);
}

double interference_term_cfgI(const ImagingGeometry& geom, const SourceSpec& src,
                              const TwoPointObject& obj, const PointDetector& det, Vec2 rho2) {
  check_cfgI(geom, src);
  validate(obj);
  const int n = src.n_degenerate;
  const double eff = effective_object_distance(geom, src, Configuration::ObjectInDegenerateArm);
  const double k = pupil_scale(geom, src);
  const double s0 = somb(k * norm(rho2 / geom.L2));
  const double sa = somb(k * norm(rho2 / geom.L2 + obj.separation / eff));
  const double phi = scatterer_phase_cfgI(geom, src, obj.separation, det.position);
  const cplx cross = std::conj(ipow(obj.amp_origin, n)) * ipow(obj.amp_a, n) * std::polar(1.0, phi);
  return 2.0 * s0 * sa * cross.real();
}

cplx amplitude_two_point_cfgII(const ImagingGeometry& geom, const SourceSpec& src,
                               const TwoPointObject& obj, Vec2 rho1, Vec2 rho2) {
  return amplitude_cfgII(geom, src, object_nodes(obj), rho1, rho2);
}

double rayleigh_min_separation(const ImagingGeometry& geom, const SourceSpec& src,
                               Configuration cfg) {
  validate(geom, cfg);
  validate(src);
  const double c = rayleigh_factor();
  if (cfg == Configuration::ObjectInDegenerateArm) {
    return c * (src.lambda2 / geom.R) * effective_object_distance(geom, src, cfg);
  }
  return c * *geom.d2_prime * src.lambda2 / geom.R;
}

Vec2 image_point(const ImagingGeometry& geom, const SourceSpec& src, Configuration cfg, Vec2 a) {
  return -magnification(geom, src, cfg) * a;
}

GridSpec GridSpec::line(Vec2 center, double half_width, std::size_t n) {
  if (n < 2) throw DomainError("a line grid needs at least two samples");
  GridSpec g;
  g.pitch = 2.0 * half_width / static_cast<double>(n - 1);
  g.origin = {center.x - half_width, center.y};
  g.nx = n;
  g.ny = 1;
  return g;
}

const char* to_string(Plane p) {
  switch (p) {
    case Plane::Object:
      return "object";
    case Plane::Lens:
      return "lens";
    case Plane::D1:
      return "D1";
    case Plane::D2:
      return "D2";
  }
  return "unknown";
}

void require_nyquist(const ImagingGeometry& geom, const SourceSpec& src, Configuration cfg,
                     double pitch) {
  const double xi = airy_radius(geom, src, cfg);
  if (!(pitch > 0.0) || xi / pitch < kMinSamplesPerAiryRadius) {
    throw SamplingError("grid pitch " + std::to_string(pitch) + " m gives " +
                        std::to_string(xi / pitch) + " samples per Airy radius (need >= 8)");
  }
}

ImageField image_field_grid(const ImagingGeometry& geom, const SourceSpec& src,
                            const ObjectModel& obj, const DetectionScheme& det,
                            Configuration cfg, const GridSpec& grid, Vec2 ancilla_rho2) {
  validate(geom, cfg);
  validate(src);
  validate(det);
  require_thin_lens(geom, src, cfg);
  if (grid.size() == 0) throw DomainError("empty image grid");
  require_nyquist(geom, src, cfg, grid.pitch);

  const auto nodes = object_nodes(obj);
  ImageField out;
  out.grid = grid;
  out.intensity.resize(grid.size());

  if (cfg == Configuration::ObjectInAncillaArm) {
    if (!std::holds_alternative<PointDetector>(det)) {
      throw UnsupportedError("the ancilla-arm layout needs a point N-photon detector");
    }
    out.plane = Plane::D1;
    out.amplitude.resize(grid.size());
    for (std::size_t iy = 0; iy < grid.ny; ++iy) {
      for (std::size_t ix = 0; ix < grid.nx; ++ix) {
        const std::size_t i = iy * grid.nx + ix;
        out.amplitude[i] = amplitude_cfgII(geom, src, nodes, grid.point(ix, iy), ancilla_rho2);
        out.intensity[i] = std::norm(out.amplitude[i]);
      }
    }
    return out;
  }

  out.plane = Plane::D2;
  if (const auto* point = std::get_if<PointDetector>(&det)) {
    out.amplitude.resize(grid.size());
    for (std::size_t iy = 0; iy < grid.ny; ++iy) {
      for (std::size_t ix = 0; ix < grid.nx; ++ix) {
        const std::size_t i = iy * grid.nx + ix;
        out.amplitude[i] = amplitude_cfgI(geom, src, nodes, point->position, grid.point(ix, iy));
        out.intensity[i] = std::norm(out.amplitude[i]);
      }
    }
    return out;
  }

  const auto& bucket = std::get<BucketDetector>(det);
  out.coherent = false;
  out.bucket_scale = std::pow(bucket.area, src.n_degenerate);
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      // Unit bucket area keeps the field normalised; the scale is reported separately.
      out.intensity[iy * grid.nx + ix] = intensity_bucket(geom, src, nodes, 1.0, grid.point(ix, iy));
    }
  }
  return out;
}

}  // namespace qgi
