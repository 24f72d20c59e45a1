#include "qgi/resolution_lab.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qgi/error.hpp"
#include "qgi/parallel.hpp"

namespace qgi {

namespace {

constexpr double kBoundarySlack = 1e-4;
constexpr int kSamplesPerXi = 32;

bool is_bucket(const Scenario& scn) {
  return std::holds_alternative<BucketDetector>(scn.det);
}

// Intensity seen in the scanned plane at coordinate x along the separation axis.
double scanned_intensity(const Scenario& scn, const std::vector<ObjectNode>& nodes, double x) {
  const Vec2 at{x, 0.0};
  if (scn.cfg == Configuration::ObjectInAncillaArm) {
    return std::norm(amplitude_cfgII(scn.geom, scn.src, nodes, at, scn.ancilla_rho2));
  }
  if (const auto* b = std::get_if<BucketDetector>(&scn.det)) {
    return intensity_bucket(scn.geom, scn.src, nodes, b->area, at);
  }
  const auto& p = std::get<PointDetector>(scn.det);
  return std::norm(amplitude_cfgI(scn.geom, scn.src, nodes, p.position, at));
}

std::vector<ObjectNode> single(Vec2 pos) { return {ObjectNode{pos, {1.0, 0.0}, 1.0}}; }

Profile sample_profile(const Scenario& scn, const std::vector<ObjectNode>& nodes, double origin,
                       double pitch, std::size_t count) {
  Profile prof{origin, pitch, std::vector<double>(count)};
  for (std::size_t i = 0; i < count; ++i) {
    prof.intensity[i] = scanned_intensity(scn, nodes, prof.position(i));
  }
  return prof;
}

// Argmax with a parabolic refinement through its neighbours.
double locate_peak(const Profile& prof) {
  const auto& v = prof.intensity;
  const auto it = std::max_element(v.begin(), v.end());
  const std::size_t k = static_cast<std::size_t>(it - v.begin());
  if (!(*it > 0.0)) throw DetectionError("profile has no positive peak");
  if (k == 0 || k + 1 >= v.size()) throw DetectionError("peak lies on the edge of the profile");
  const double denom = v[k - 1] - 2.0 * v[k] + v[k + 1];
  double shift = 0.0;
  if (denom < 0.0) shift = 0.5 * (v[k - 1] - v[k + 1]) / denom;
  return prof.position(k) + std::clamp(shift, -0.5, 0.5) * prof.pitch;
}

double cubic_through(const double* y, double u) {
  // Lagrange cubic through nodes at -1, 0, 1, 2.
  const double a = u + 1.0, b = u, c = u - 1.0, d = u - 2.0;
  return -y[0] * b * c * d / 6.0 + y[1] * a * c * d / 2.0 - y[2] * a * b * d / 2.0 +
         y[3] * a * b * c / 6.0;
}

// Everything needed to decide resolvability of a two-point object at any
// separation along x for one scenario.
class TwoPointLab {
 public:
  explicit TwoPointLab(const Scenario& scn) : scn_(scn) {
    validate(scn_);
    require_thin_lens(scn_.geom, scn_.src, scn_.cfg);
    xi_ = airy_radius(scn_.geom, scn_.src, scn_.cfg);
    const double m = magnification(scn_.geom, scn_.src, scn_.cfg);
    dir_ = -m >= 0.0 ? 1.0 : -1.0;
    h_ = dir_ * xi_ / kSamplesPerXi;
    const double p0 = image_point(scn_.geom, scn_.src, scn_.cfg, {}).x;
    psf_ = sample_profile(scn_, single({}), p0 - 4.0 * h_, h_, 4 + kSamplesPerXi * 3 / 2 + 1);
    first_peak_ = locate_peak(psf_);
  }

  double xi() const { return xi_; }
  const Profile& psf() const { return psf_; }
  double first_peak() const { return first_peak_; }

  double second_peak(double a) const {
    const double p1 = image_point(scn_.geom, scn_.src, scn_.cfg, {a, 0.0}).x;
    const std::size_t half = kSamplesPerXi / 2;
    const Profile win = sample_profile(scn_, single({a, 0.0}),
                                       p1 - static_cast<double>(half) * h_, h_, 2 * half + 1);
    return locate_peak(win);
  }

  bool resolved(double a) const { return detect_resolved(psf_, first_peak_, second_peak(a)); }

 private:
  Scenario scn_;
  double xi_ = 0.0;
  double dir_ = 1.0;
  double h_ = 0.0;
  Profile psf_;
  double first_peak_ = 0.0;
};

Scenario with_n(Scenario scn, int n) {
  scn.src.n_degenerate = n;
  return refocus(std::move(scn));
}

}  // namespace

void validate(const Scenario& scn) {
  validate(scn.geom, scn.cfg);
  validate(scn.src);
  validate(scn.det);
  if (!std::isfinite(scn.ancilla_rho2.x) || !std::isfinite(scn.ancilla_rho2.y)) {
    throw DomainError("ancilla_rho2 must be finite");
  }
}

Scenario refocus(Scenario scn) {
  if (scn.cfg == Configuration::ObjectInDegenerateArm) {
    scn.geom = focus(scn.geom, scn.src, scn.cfg);
    return scn;
  }
  validate(scn.geom, scn.cfg);
  validate(scn.src);
  ThinLensKnowns k;
  k.image_side = *scn.geom.d2_prime;
  k.object_side = effective_object_distance(scn.geom, scn.src, scn.cfg);
  scn.geom.f = thin_lens_solve(k);
  return scn;
}

double first_zero_radius(const Profile& psf, double peak) {
  const auto& v = psf.intensity;
  const std::size_t n = v.size();
  if (n < 5) throw DetectionError("profile too short to locate a zero");
  if (!(psf.pitch != 0.0) || !std::isfinite(psf.pitch)) {
    throw DomainError("profile pitch must be finite and non-zero");
  }
  const double fi = std::round((peak - psf.origin) / psf.pitch);
  if (!(fi >= 0.0) || fi >= static_cast<double>(n - 1)) {
    throw DetectionError("peak lies outside the profile");
  }
  const auto i0 = static_cast<std::size_t>(fi);
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  if (!(*hi_it > 0.0) || *hi_it - *lo_it <= 1e-12 * *hi_it) {
    throw DetectionError("flat profile: no peak to resolve");
  }

  std::size_t k = 0;
  for (std::size_t i = i0 + 1; i + 1 < n; ++i) {
    if (v[i] <= v[i - 1] && v[i] < v[i + 1]) {
      k = i;
      break;
    }
  }
  if (k == 0) throw DetectionError("no intensity minimum within the profile");
  if (v[i0] <= 0.0 || v[k] > 0.5 * v[i0]) {
    throw DetectionError("intensity minimum too shallow to be a PSF zero");
  }

  double zero_pos = 0.0;
  if (v[k] <= 0.0) {
    zero_pos = psf.position(k);
  } else {
    const std::size_t flip = v[k + 1] < v[k - 1] ? k + 1 : k;
    auto signed_amp = [&](std::size_t i) {
      const double s = std::sqrt(std::max(v[i], 0.0));
      return i >= flip ? -s : s;
    };
    // Crossing lies between j and j+1; fit the cubic on j-1..j+2.
    std::size_t j = flip - 1;
    std::size_t base = std::clamp<std::size_t>(j, 1, n - 3) - 1;
    double y[4];
    for (int t = 0; t < 4; ++t) y[t] = signed_amp(base + t);
    const double off = static_cast<double>(j) - static_cast<double>(base + 1);
    double a = off, b = off + 1.0;
    double fa = cubic_through(y, a);
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (a + b);
      const double fm = cubic_through(y, mid);
      if ((fm > 0.0) == (fa > 0.0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    zero_pos = psf.position(base + 1) + 0.5 * (a + b) * psf.pitch;
  }
  const double r0 = std::abs(zero_pos - peak);
  if (r0 / std::abs(psf.pitch) < kMinSamplesPerAiryRadius) {
    throw SamplingError("profile gives " + std::to_string(r0 / std::abs(psf.pitch)) +
                        " samples per first-zero radius (need >= 8)");
  }
  return r0;
}

bool detect_resolved(const Profile& psf, double first_peak, double second_peak) {
  if (!std::isfinite(first_peak) || !std::isfinite(second_peak)) {
    throw DomainError("peak positions must be finite");
  }
  const double r0 = first_zero_radius(psf, first_peak);
  return std::abs(second_peak - first_peak) >= r0 * (1.0 - kBoundarySlack);
}

ResolutionReport scan_min_separation(const Scenario& base, double tol) {
  if (!(tol > 0.0) || tol >= 1.0) throw DomainError("scan tolerance must be in (0, 1)");
  const TwoPointLab lab(base);
  ResolutionReport rep;
  rep.n_degenerate = base.src.n_degenerate;
  rep.predicted_a_m = rayleigh_min_separation(base.geom, base.src, base.cfg);
  const Scenario classical = with_n(base, 1);
  rep.predicted_gain =
      rayleigh_min_separation(classical.geom, classical.src, classical.cfg) / rep.predicted_a_m;
  rep.criterion = std::string("first zero of the single-scatterer PSF, ") +
                  (base.cfg == Configuration::ObjectInDegenerateArm && is_bucket(base)
                       ? "bucket intensity"
                       : "coherent |B|^2");

  double lo = rep.predicted_a_m / 10.0;
  double hi = rep.predicted_a_m * 10.0;
  if (lab.resolved(lo) || !lab.resolved(hi)) {
    throw ScanError("resolution boundary not bracketed by [a_m/10, 10 a_m]");
  }
  for (int it = 0; it < 200 && hi - lo > tol * 0.5 * (hi + lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    (lab.resolved(mid) ? hi : lo) = mid;
  }
  rep.measured_a_m = 0.5 * (lo + hi);
  rep.relative_error = std::abs(rep.measured_a_m - rep.predicted_a_m) / rep.predicted_a_m;
  return rep;
}

std::vector<AiryRow> airy_shrink_scan(const Scenario& base, const std::vector<int>& n_values) {
  if (n_values.empty()) throw DomainError("airy scan needs at least one N");
  std::vector<AiryRow> rows;
  for (const int n : n_values) {
    const Scenario scn = with_n(base, n);
    const TwoPointLab lab(scn);
    AiryRow row;
    row.n_degenerate = n;
    row.predicted_xi = lab.xi();
    row.measured_xi = first_zero_radius(lab.psf(), lab.first_peak());
    rows.push_back(row);
  }
  for (auto& row : rows) {
    row.measured_ratio = row.measured_xi / rows.front().measured_xi;
    row.predicted_ratio = row.predicted_xi / rows.front().predicted_xi;
  }
  return rows;
}

const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::SeparationA: return "separation_a";
    case SweepParameter::NDegenerate: return "n_degenerate";
    case SweepParameter::D1OverD2: return "d1_over_d2";
    case SweepParameter::L1OverD2: return "L1_over_d2";
  }
  return "?";
}

void validate(const SweepSpec& spec) {
  validate(spec.base);
  const auto& v = spec.values;
  if (v.empty()) throw DomainError("sweep needs at least one value");
  for (const double x : v) {
    if (!std::isfinite(x) || !(x > 0.0)) throw DomainError("sweep values must be positive and finite");
    if (spec.parameter == SweepParameter::NDegenerate && x != std::round(x)) {
      throw DomainError("n_degenerate sweep values must be integers");
    }
  }
  if (v.size() > 1) {
    const bool up = v[1] > v[0];
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (up ? !(v[i] > v[i - 1]) : !(v[i] < v[i - 1])) {
        throw DomainError("sweep values must be strictly monotone");
      }
    }
  }
  if ((spec.parameter == SweepParameter::D1OverD2 || spec.parameter == SweepParameter::L1OverD2) &&
      !(spec.base.geom.d2 > 0.0)) {
    throw DomainError("ratio sweeps need d2 > 0");
  }
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, bool measure, unsigned jobs, double tol) {
  validate(spec);
  std::vector<SweepRow> rows(spec.values.size());
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    const double value = spec.values[i];
    Scenario scn = spec.base;
    switch (spec.parameter) {
      case SweepParameter::SeparationA: break;
      case SweepParameter::NDegenerate: scn.src.n_degenerate = static_cast<int>(value); break;
      case SweepParameter::D1OverD2: scn.geom.d1 = value * scn.geom.d2; break;
      case SweepParameter::L1OverD2: scn.geom.L1 = value * scn.geom.d2; break;
    }
    scn = refocus(scn);
    SweepRow row;
    row.value = value;
    row.predicted_a_m = rayleigh_min_separation(scn.geom, scn.src, scn.cfg);
    row.airy_radius = airy_radius(scn.geom, scn.src, scn.cfg);
    if (measure) {
      if (spec.parameter == SweepParameter::SeparationA) {
        row.resolved = TwoPointLab(scn).resolved(value);
      } else {
        ResolutionReport rep = scan_min_separation(scn, tol);
        const ResolutionReport classical =
            scn.src.n_degenerate == 1 ? rep : scan_min_separation(with_n(scn, 1), tol);
        rep.gain_vs_classical = classical.measured_a_m / rep.measured_a_m;
        row.report = rep;
      }
    }
    rows[i] = std::move(row);
  });
  return rows;
}

}  // namespace qgi
