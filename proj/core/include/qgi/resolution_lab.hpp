#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qgi/analytic_imaging.hpp"
#include "qgi/optics_core.hpp"

namespace qgi {

/// One imaging setup: geometry, source, object placement and detector.
/// For the ancilla-arm placement `ancilla_rho2` fixes the D2 position while
/// the N-photon detector plane is scanned.
struct Scenario {
  ImagingGeometry geom;
  SourceSpec src;
  Configuration cfg = Configuration::ObjectInDegenerateArm;
  DetectionScheme det = BucketDetector{1.0, Rect{{0.0, 0.0}, 1.0, 1.0}};
  Vec2 ancilla_rho2{};
};

void validate(const Scenario& scn);

/// Restores the thin-lens condition after N or a distance changed: L2 is
/// re-solved from f when the object is in the degenerate arm; with the object
/// in the ancilla arm d2' is held and f is re-solved.
Scenario refocus(Scenario scn);

/// Intensity sampled along a line: sample i sits at origin + i * pitch.
struct Profile {
  double origin = 0.0;
  double pitch = 0.0;
  std::vector<double> intensity;

  double position(std::size_t i) const { return origin + static_cast<double>(i) * pitch; }
};

/// Distance from `peak` to the first zero of a single-scatterer intensity
/// profile, searching in the direction of increasing sample index. The zero
/// is located on the signed square root of the intensity (sign flipped past
/// the first minimum) with cubic interpolation.
double first_zero_radius(const Profile& psf, double peak);

/// First-zero Rayleigh test: true when the second image point lies at or
/// beyond the first zero of the first scatterer's PSF. `psf` must start at or
/// before `first_peak` and run towards `second_peak`.
bool detect_resolved(const Profile& psf, double first_peak, double second_peak);

struct ResolutionReport {
  int n_degenerate = 1;
  double predicted_a_m = 0.0;
  double measured_a_m = 0.0;
  double relative_error = 0.0;
  std::optional<double> gain_vs_classical;  ///< set by sweeps over N
  double predicted_gain = 1.0;              ///< formula a_m(N=1) / a_m(N)
  std::string criterion;
};

inline constexpr double kDefaultScanTolerance = 0.005;

/// Bisects the two-point separation over [a_m/10, 10 a_m] until the
/// resolvability boundary is bracketed to `tol` (relative).
ResolutionReport scan_min_separation(const Scenario& base, double tol = kDefaultScanTolerance);

struct AiryRow {
  int n_degenerate = 1;
  double measured_xi = 0.0;
  double predicted_xi = 0.0;
  double measured_ratio = 1.0;   ///< xi(N) / xi(first entry)
  double predicted_ratio = 1.0;
};

/// Measures the first-zero radius of the D1-plane PSF for each N with the
/// object in the ancilla arm, refocusing (d2' held, f re-solved) for each N.
std::vector<AiryRow> airy_shrink_scan(const Scenario& base, const std::vector<int>& n_values);

enum class SweepParameter { SeparationA, NDegenerate, D1OverD2, L1OverD2 };

const char* to_string(SweepParameter p);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::NDegenerate;
  std::vector<double> values;
  Scenario base;
};

void validate(const SweepSpec& spec);

struct SweepRow {
  double value = 0.0;
  double predicted_a_m = 0.0;
  double airy_radius = 0.0;
  std::optional<ResolutionReport> report;  ///< measured rows only
  std::optional<bool> resolved;            ///< separation sweeps only
};

/// Closed-form rows for every sweep value; with `measure` set, also runs the
/// scan (or the resolvability test for separation sweeps) per value.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, bool measure, unsigned jobs = 1,
                                double tol = kDefaultScanTolerance);

}  // namespace qgi
