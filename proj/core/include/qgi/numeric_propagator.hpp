#pragma once

// Direct quadrature of the propagation integrals: object plane, lens plane and
// the transverse-mode (alpha) integral. Used as an independent check on the
// closed forms in analytic_imaging; nothing here calls somb().

#include <array>
#include <vector>

#include "qgi/analytic_imaging.hpp"
#include "qgi/objects.hpp"
#include "qgi/optics_core.hpp"

namespace qgi {

enum class AlphaMode { AnalyticFresnel, NumericGrid };

struct QuadratureSpec {
  int lens_samples = 128;    ///< cells across the lens diameter
  int object_samples = 1;    ///< midpoint sub-nodes per pixel, per axis
  AlphaMode alpha_mode = AlphaMode::AnalyticFresnel;
  double alpha_cutoff = 0.0;  ///< 1/m; flat window half-width, taper to zero at 2x
  int alpha_samples = 0;      ///< trapezoid nodes across [-2 cutoff, 2 cutoff]
  int rim_subdivision = 8;
  bool check_convergence = true;  ///< re-run with twice the lens samples
};

void validate(const QuadratureSpec& quad);

struct ComplexField {
  GridSpec grid;
  Plane plane = Plane::D2;
  std::vector<cplx> values;
};

/// Object-arm kernel with the object in the degenerate arm.
cplx chi1(Vec2 alpha, const ImagingGeometry& geom, const SourceSpec& src,
          const SampledObject& obj, Vec2 rho1);

/// Lens-arm kernel: quadrature over the lens disk.
cplx chi2(Vec2 alpha, const ImagingGeometry& geom, const SourceSpec& src, Vec2 rho2,
          int lens_samples = 256);

/// Integral of exp(-i q.rho) over the disk of radius R (q along x). Polar
/// Gauss-Legendre quadrature, independent of the Bessel routines.
cplx disk_integral(double q, double R);

/// Closed-form value of the 2-D Fresnel integral
///   int d^2 alpha exp(-i beta |alpha|^2 - i alpha.v) = (pi/(i beta)) exp(i |v|^2 / (4 beta)).
cplx fresnel_alpha_integral(double beta, Vec2 v);

/// The same integral on a truncated, smoothly tapered trapezoid grid.
/// Throws SamplingError when the window misses the stationary point or the
/// grid under-resolves the phase.
cplx fresnel_alpha_integral_numeric(double beta, Vec2 v, double cutoff, int samples);

/// Same-point amplitude by quadrature over object nodes, lens and alpha,
/// normalised to match analytic_imaging (B0 = 1). Object in the degenerate
/// arm, point N-photon detector at `det.position`.
cplx amplitude_samepoint_numeric(const ImagingGeometry& geom, const SourceSpec& src,
                                 const ObjectModel& obj, const PointDetector& det, Vec2 rho2,
                                 const QuadratureSpec& quad);

/// Object in the ancilla arm; the N-photon detector at rho1 is scanned.
cplx amplitude_ancilla_numeric(const ImagingGeometry& geom, const SourceSpec& src,
                               const ObjectModel& obj, Vec2 rho1, Vec2 rho2,
                               const QuadratureSpec& quad);

/// Two-photon amplitude without the same-point collapse: independent object
/// integrals for each photon, detected at rho1_pair. Slit1D objects only.
/// Normalised so that a single pixel reproduces the collapsed amplitude.
cplx amplitude_full_N2(const ImagingGeometry& geom, const SourceSpec& src,
                       const SampledObject& obj, const std::array<Vec2, 2>& rho1_pair, Vec2 rho2,
                       const QuadratureSpec& quad);

/// Numeric counterpart of image_field_grid for point detection.
ComplexField numeric_field_grid(const ImagingGeometry& geom, const SourceSpec& src,
                                const ObjectModel& obj, Configuration cfg, const GridSpec& grid,
                                Vec2 fixed_point, const QuadratureSpec& quad, unsigned jobs = 1);

}  // namespace qgi
