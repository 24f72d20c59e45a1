#pragma once

// Closed-form same-point amplitudes, coherent and bucket images and the
// Rayleigh limits for both object placements.
//
// The constant prefactor B0 is 1 throughout. Bucket intensities carry the
// s_b^N factor from integrating each of the N detection positions over the
// bucket; ImageField keeps it apart in `bucket_scale`.

#include <cstddef>
#include <variant>
#include <vector>

#include "qgi/objects.hpp"
#include "qgi/optics_core.hpp"
#include "qgi/vec2.hpp"

namespace qgi {

struct Rect {
  Vec2 center{};
  double width = 0.0;
  double height = 0.0;

  double area() const { return width * height; }
};

/// Spatially resolving N-photon detector; all N photons land at `position`.
struct PointDetector {
  Vec2 position{};
};

/// N-photon bucket of area s_b covering `extent`.
struct BucketDetector {
  double area = 0.0;
  Rect extent{};
};

using DetectionScheme = std::variant<PointDetector, BucketDetector>;

void validate(const DetectionScheme& det);

/// Coherent amplitude for an arbitrary node list, object in the degenerate
/// arm, all N photons detected at rho1.
cplx amplitude_cfgI(const ImagingGeometry& geom, const SourceSpec& src,
                    const std::vector<ObjectNode>& nodes, Vec2 rho1, Vec2 rho2);

/// Coherent amplitude for an arbitrary node list, object in the ancilla arm.
/// rho1 is the N-photon detector position, rho2 the ancilla detector position.
cplx amplitude_cfgII(const ImagingGeometry& geom, const SourceSpec& src,
                     const std::vector<ObjectNode>& nodes, Vec2 rho1, Vec2 rho2);

/// Incoherent bucket image: s_b^N * sum |A|^{2N} w somb^2.
double intensity_bucket(const ImagingGeometry& geom, const SourceSpec& src,
                        const std::vector<ObjectNode>& nodes, double bucket_area, Vec2 rho2);

/// Phase of the displaced scatterer relative to the one at the origin for a
/// point N-photon detector at rho1.
double scatterer_phase_cfgI(const ImagingGeometry& geom, const SourceSpec& src, Vec2 a,
                            Vec2 rho1);

/// Phase of the displaced scatterer, object in the ancilla arm.
double scatterer_phase_cfgII(const ImagingGeometry& geom, const SourceSpec& src, Vec2 a,
                             Vec2 rho2);

cplx amplitude_two_point_cfgI(const ImagingGeometry& geom, const SourceSpec& src,
                              const TwoPointObject& obj, const PointDetector& det, Vec2 rho2);

double intensity_bucket_cfgI(const ImagingGeometry& geom, const SourceSpec& src,
                             const TwoPointObject& obj, const BucketDetector& det, Vec2 rho2);

/// |B|^2 minus the incoherent sum for the point-detector image; evaluated
/// directly from the two somb terms.
double interference_term_cfgI(const ImagingGeometry& geom, const SourceSpec& src,
                              const TwoPointObject& obj, const PointDetector& det, Vec2 rho2);

cplx amplitude_two_point_cfgII(const ImagingGeometry& geom, const SourceSpec& src,
                               const TwoPointObject& obj, Vec2 rho1, Vec2 rho2);

/// Minimum resolvable separation by the first-zero criterion.
double rayleigh_min_separation(const ImagingGeometry& geom, const SourceSpec& src,
                               Configuration cfg);

/// Where the scatterer at object position `a` is imaged in the scanned plane.
Vec2 image_point(const ImagingGeometry& geom, const SourceSpec& src, Configuration cfg, Vec2 a);

struct GridSpec {
  Vec2 origin{};
  double pitch = 0.0;
  std::size_t nx = 1;
  std::size_t ny = 1;

  Vec2 point(std::size_t ix, std::size_t iy) const {
    return {origin.x + static_cast<double>(ix) * pitch,
            origin.y + static_cast<double>(iy) * pitch};
  }
  std::size_t size() const { return nx * ny; }

  /// nx samples along x centred on `center`, single row.
  static GridSpec line(Vec2 center, double half_width, std::size_t n);
};

enum class Plane { Object, Lens, D1, D2 };

const char* to_string(Plane p);

struct ImageField {
  GridSpec grid;
  Plane plane = Plane::D2;
  bool coherent = true;
  std::vector<cplx> amplitude;   ///< point detector only
  std::vector<double> intensity;  ///< |amplitude|^2, or the bucket image
  double b0_scale = 1.0;
  double bucket_scale = 1.0;  ///< s_b^N for bucket images, 1 otherwise
};

/// Samples the image over `grid`: the D2 plane when the object is in the
/// degenerate arm, the D1 plane when it is in the ancilla arm (the ancilla
/// detector then sits at `ancilla_rho2`). Requires >= 8 samples per Airy
/// radius; throws SamplingError otherwise.
ImageField image_field_grid(const ImagingGeometry& geom, const SourceSpec& src,
                            const ObjectModel& obj, const DetectionScheme& det,
                            Configuration cfg, const GridSpec& grid, Vec2 ancilla_rho2 = {});

inline constexpr double kMinSamplesPerAiryRadius = 8.0;

/// Throws SamplingError when `pitch` gives fewer than 8 samples per Airy radius.
void require_nyquist(const ImagingGeometry& geom, const SourceSpec& src, Configuration cfg,
                     double pitch);

}  // namespace qgi
