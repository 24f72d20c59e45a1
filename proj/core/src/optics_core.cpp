#include "qgi/optics_core.hpp"

#include <cmath>
#include <limits>

#include "qgi/error.hpp"

namespace qgi {

namespace {

constexpr double kSeriesLimit = 8.0;
constexpr double kRecurrenceLimit = 20.0;

long double j1_series(long double x) {
  const long double half = x / 2.0L;
  const long double q = half * half;
  long double term = half;
  long double sum = term;
  for (int k = 0; k < 200; ++k) {
    term *= -q / (static_cast<long double>(k + 1) * static_cast<long double>(k + 2));
    sum += term;
    if (std::fabs(term) < 1e-22L * (std::fabs(sum) + 1e-300L) && k > x) break;
  }
  return sum;
}

// Miller's backward recurrence normalised by J0 + 2 sum J_2k = 1. The series
// above cancels too heavily past x ~ 8 even in long double.
long double j1_recurrence(long double x) {
  const int start = 2 * (static_cast<int>(x) / 2 + 20);
  long double next = 0.0L;
  long double cur = 1e-30L;
  long double norm = 0.0L;
  long double j1 = 0.0L;
  for (int k = start; k > 0; --k) {
    const long double prev = 2.0L * k / x * cur - next;
    next = cur;
    cur = prev;  // J_{k-1}
    if (k - 1 == 1) j1 = cur;
    if ((k - 1) % 2 == 0) norm += (k - 1 == 0 ? 1.0L : 2.0L) * cur;
    if (std::fabs(cur) > 1e100L) {
      cur *= 1e-100L;
      next *= 1e-100L;
      norm *= 1e-100L;
      j1 *= 1e-100L;
    }
  }
  return j1 / norm;
}

// Hankel expansion, x > 0. Each series is cut just before its terms start
// growing again.
long double j1_asymptotic(long double x) {
  constexpr long double mu = 4.0L;
  long double p = 0.0L;
  long double q = 0.0L;
  long double term = 1.0L;
  long double prev = std::numeric_limits<long double>::infinity();
  for (int k = 0; k < 100; ++k) {
    if (k > 0) {
      const long double odd = 2.0L * k - 1.0L;
      term *= (mu - odd * odd) / (static_cast<long double>(k) * 8.0L * x);
    }
    const long double mag = std::fabs(term);
    if (mag > prev) break;
    prev = mag;
    const long double sign = ((k / 2) % 2 == 0) ? 1.0L : -1.0L;
    if (k % 2 == 0) {
      p += sign * term;
    } else {
      q += sign * term;
    }
    if (mag < 1e-21L) break;
  }
  const long double chi = x - 0.75L * static_cast<long double>(kPi);
  return std::sqrt(2.0L / (static_cast<long double>(kPi) * x)) *
         (p * std::cos(chi) - q * std::sin(chi));
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be a positive finite length, got " +
                      std::to_string(v));
  }
}

}  // namespace

std::string to_string(Configuration cfg) {
  switch (cfg) {
    case Configuration::ObjectInDegenerateArm:
      return "object_in_degenerate_arm";
    case Configuration::ObjectInAncillaArm:
      return "object_in_ancilla_arm";
  }
  return "unknown";
}

double SourceSpec::k1() const { return wavenumber(lambda1); }
double SourceSpec::k2() const { return wavenumber(lambda2); }

void validate(const ImagingGeometry& geom, Configuration cfg) {
  if (!(geom.d2 >= 0.0) || !std::isfinite(geom.d2)) {
    throw DomainError("d2 must be a non-negative finite length, got " + std::to_string(geom.d2));
  }
  require_positive(geom.L1, "L1");
  require_positive(geom.L2, "L2");
  require_positive(geom.f, "f");
  require_positive(geom.R, "R");
  if (cfg == Configuration::ObjectInDegenerateArm) {
    require_positive(geom.d1, "d1");
    if (geom.d2_prime) {
      throw DomainError("d2_prime is only meaningful when the object is in the ancilla arm");
    }
  } else {
    if (!geom.d2_prime) throw DomainError("d2_prime is required when the object is in the ancilla arm");
    require_positive(*geom.d2_prime, "d2_prime");
  }
}

void validate(const SourceSpec& src) {
  if (src.n_degenerate < 1) {
    throw DomainError("n_degenerate must be >= 1, got " + std::to_string(src.n_degenerate));
  }
  require_positive(src.lambda1, "lambda1");
  require_positive(src.lambda2, "lambda2");
}

double wavenumber(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("wavelength must be positive and finite");
  }
  return kTwoPi / lambda;
}

double bessel_j1(double x) {
  if (!std::isfinite(x)) throw DomainError("bessel_j1: non-finite argument");
  const double ax = std::fabs(x);
  const long double v = ax <= kSeriesLimit       ? j1_series(ax)
                        : ax <= kRecurrenceLimit ? j1_recurrence(ax)
                                                 : j1_asymptotic(ax);
  return static_cast<double>(x < 0.0 ? -v : v);
}

double somb(double x) {
  if (!std::isfinite(x)) throw DomainError("somb: non-finite argument");
  const double ax = std::fabs(x);
  if (ax < 1e-4) {
    // 2 J1(x)/x = 1 - x^2/8 + x^4/192 - ...
    const double q = ax * ax;
    return 1.0 - q / 8.0 + q * q / 192.0;
  }
  return 2.0 * bessel_j1(ax) / ax;
}

double first_j1_zero() {
  static const double zero = [] {
    double lo = 3.0;
    double hi = 4.5;
    while (hi - lo > 1e-14) {
      const double mid = 0.5 * (lo + hi);
      if (bessel_j1(mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }();
  return zero;
}

double rayleigh_factor() { return first_j1_zero() / kTwoPi; }

double effective_object_distance(const ImagingGeometry& geom, const SourceSpec& src,
                                 Configuration cfg) {
  const double ratio = src.lambda1 / (src.n_degenerate * src.lambda2);
  const double far = cfg == Configuration::ObjectInDegenerateArm ? geom.d1 : geom.L1;
  return geom.d2 + ratio * far;
}

double thin_lens_solve(const ThinLensKnowns& known) {
  const int given = static_cast<int>(known.focal.has_value()) +
                    static_cast<int>(known.image_side.has_value()) +
                    static_cast<int>(known.object_side.has_value());
  if (given != 2) throw DomainError("thin_lens_solve needs exactly two known quantities");

  double result = 0.0;
  if (!known.focal) {
    const double a = *known.object_side;
    const double b = *known.image_side;
    require_positive(a, "object_side");
    require_positive(b, "image_side");
    result = 1.0 / (1.0 / a + 1.0 / b);
  } else {
    const double f = *known.focal;
    const double a = known.object_side ? *known.object_side : *known.image_side;
    require_positive(f, "f");
    require_positive(a, known.object_side ? "object_side" : "image_side");
    const double inv = 1.0 / f - 1.0 / a;
    if (std::fabs(inv) <= 1e-13 / f) {
      throw UnsolvableError("conjugate distance equals the focal length; image at infinity");
    }
    result = 1.0 / inv;
    if (!(result > 0.0)) {
      throw UnsolvableError("thin-lens solution is not positive (virtual conjugate)");
    }
  }
  return result;
}

double thin_lens_residual(const ImagingGeometry& geom, const SourceSpec& src,
                          Configuration cfg) {
  const double eff = effective_object_distance(geom, src, cfg);
  const double other =
      cfg == Configuration::ObjectInDegenerateArm ? geom.L2 : geom.d2_prime.value_or(0.0);
  if (!(other > 0.0)) return std::numeric_limits<double>::infinity();
  return std::fabs(1.0 / geom.f - 1.0 / eff - 1.0 / other) * geom.f;
}

ImagingGeometry focus(ImagingGeometry geom, const SourceSpec& src, Configuration cfg) {
  const double eff = effective_object_distance(geom, src, cfg);
  const double solved = thin_lens_solve({.focal = geom.f, .image_side = {}, .object_side = eff});
  if (cfg == Configuration::ObjectInDegenerateArm) {
    geom.L2 = solved;
  } else {
    geom.d2_prime = solved;
  }
  return geom;
}

void require_thin_lens(const ImagingGeometry& geom, const SourceSpec& src, Configuration cfg,
                       double tol) {
  const double r = thin_lens_residual(geom, src, cfg);
  if (!(r <= tol)) {
    throw InconsistentGeometryError("thin-lens condition violated: relative residual " +
                                    std::to_string(r));
  }
}

double magnification(const ImagingGeometry& geom, const SourceSpec& src, Configuration cfg) {
  require_thin_lens(geom, src, cfg);
  const double eff = effective_object_distance(geom, src, cfg);
  if (cfg == Configuration::ObjectInDegenerateArm) return geom.L2 / eff;
  return eff / *geom.d2_prime;
}

double airy_radius(const ImagingGeometry& geom, const SourceSpec& src, Configuration cfg) {
  const double c = rayleigh_factor();
  if (cfg == Configuration::ObjectInDegenerateArm) return c * src.lambda2 * geom.L2 / geom.R;
  return c * (src.lambda2 / geom.R) * effective_object_distance(geom, src, cfg);
}

}  // namespace qgi
