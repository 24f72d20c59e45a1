#pragma once

// Geometry and wavelength bookkeeping, the J1/somb special functions and the
// Gaussian thin-lens algebra shared by every imaging engine.
//
// All lengths are SI metres, angles radians.

#include <optional>
#include <string>

namespace qgi {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Which arm carries the object.
enum class Configuration {
  /// Object and N-photon detector D1 in the degenerate arm, lens in the ancilla arm.
  ObjectInDegenerateArm,
  /// Lens and object both in the ancilla (non-degenerate) arm.
  ObjectInAncillaArm,
};

std::string to_string(Configuration cfg);

/// Distances of the optical train.
///
/// d1: source to object (degenerate arm). d2: source to lens. L1: object to D1
/// (or source to D1 when the object sits in the ancilla arm). L2: lens to D2
/// (or object to D2 for the ancilla-arm layout). d2_prime: lens to object,
/// ancilla-arm layout only.
struct ImagingGeometry {
  double d1 = 0.0;
  double d2 = 0.0;
  double L1 = 0.0;
  double L2 = 0.0;
  double f = 0.0;
  double R = 0.0;
  std::optional<double> d2_prime;
};

/// N degenerate photons at lambda1 plus one ancilla photon at lambda2.
struct SourceSpec {
  int n_degenerate = 1;
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  double k1() const;
  double k2() const;
};

/// Throws DomainError naming the offending field. d2 may be zero (source
/// directly at the lens); every other distance used by `cfg` must be positive.
void validate(const ImagingGeometry& geom, Configuration cfg);
void validate(const SourceSpec& src);

/// 2*pi/lambda.
double wavenumber(double lambda);

/// First-order Bessel function of the first kind.
///
/// Ascending power series for |x| <= 8, Miller's backward recurrence up to 20
/// and the Hankel asymptotic expansion, truncated at its smallest term, beyond.
/// All branches run in long double and stay within a few 1e-15 absolute.
double bessel_j1(double x);

/// 2*J1(x)/x with somb(0) = 1.
double somb(double x);

/// First positive zero of J1, located by bisection on bessel_j1 to 1e-14.
double first_j1_zero();

/// Rayleigh constant first_j1_zero()/(2*pi) ~= 0.6098.
double rayleigh_factor();

/// Lens-to-object distance seen by the lens.
///
/// Degenerate arm: d2 + lambda1/(N*lambda2) * d1.
/// Ancilla arm:    d2 + lambda1/(N*lambda2) * L1.
double effective_object_distance(const ImagingGeometry& geom, const SourceSpec& src,
                                 Configuration cfg);

/// Two of the three thin-lens quantities; the third is solved for.
struct ThinLensKnowns {
  std::optional<double> focal;
  std::optional<double> image_side;
  std::optional<double> object_side;
};

/// Solves 1/f = 1/object_side + 1/image_side for the missing quantity.
/// Throws UnsolvableError when the solution is infinite or not positive.
double thin_lens_solve(const ThinLensKnowns& known);

/// |1/f - 1/a - 1/b| * f for the lens relation of `cfg`.
double thin_lens_residual(const ImagingGeometry& geom, const SourceSpec& src,
                          Configuration cfg);

/// Returns `geom` with L2 (degenerate arm) or d2_prime (ancilla arm) replaced
/// by the thin-lens solution for the current f.
ImagingGeometry focus(ImagingGeometry geom, const SourceSpec& src, Configuration cfg);

inline constexpr double kThinLensTolerance = 1e-9;

/// Throws InconsistentGeometryError when the thin-lens residual exceeds `tol`.
void require_thin_lens(const ImagingGeometry& geom, const SourceSpec& src,
                       Configuration cfg, double tol = kThinLensTolerance);

/// L2/effective (degenerate arm) or effective/d2_prime (ancilla arm).
double magnification(const ImagingGeometry& geom, const SourceSpec& src,
                     Configuration cfg);

/// Airy-disk radius in the scanned detector plane (D2 for the degenerate-arm
/// layout, D1 for the ancilla-arm layout).
double airy_radius(const ImagingGeometry& geom, const SourceSpec& src, Configuration cfg);

}  // namespace qgi
