#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "qgi/error.hpp"
#include "qgi/optics_core.hpp"

using namespace qgi;

namespace {

// Bessel's integral over a full period; the trapezoid rule is spectrally
// accurate for periodic integrands.
double j1_trapezoid(double x) {
  const int m = 256 + static_cast<int>(2 * std::abs(x));
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    const double t = kTwoPi * i / m;
    sum += std::cos(t - x * std::sin(t));
  }
  return sum / m;
}

constexpr auto kI = Configuration::ObjectInDegenerateArm;
constexpr auto kII = Configuration::ObjectInAncillaArm;

}  // namespace

TEST(BesselJ1, MatchesPeriodicTrapezoidOracle) {
  for (double x = -50.0; x <= 50.0; x += 0.173) {
    // relative 1e-12, floored near the zeros where relative error is meaningless
    const double ref = j1_trapezoid(x);
    EXPECT_NEAR(bessel_j1(x), ref, 1e-12 * std::max(std::abs(ref), 1e-2)) << "x=" << x;
  }
}

TEST(BesselJ1, MatchesStandardLibraryAcrossBranchSwitch) {
  for (double x = 0.0; x <= 60.0; x += 0.0917) {
    EXPECT_NEAR(bessel_j1(x), std::cyl_bessel_j(1.0, x), 5e-14) << "x=" << x;
  }
  for (double x : {19.999999, 20.0, 20.000001}) {
    EXPECT_NEAR(bessel_j1(x), std::cyl_bessel_j(1.0, x), 5e-14);
  }
}

TEST(BesselJ1, IsOdd) {
  for (double x : {0.3, 2.0, 7.7, 25.0}) EXPECT_DOUBLE_EQ(bessel_j1(-x), -bessel_j1(x));
}

TEST(Somb, EvenBoundedAndUnitAtOrigin) {
  EXPECT_EQ(somb(0.0), 1.0);
  for (double x = 1e-3; x < 40.0; x += 0.0371) {
    EXPECT_EQ(somb(x), somb(-x));
    EXPECT_LT(std::abs(somb(x)), 1.0);
  }
}

TEST(RayleighFactor, FirstZeroOfJ1) {
  const double x0 = first_j1_zero();
  EXPECT_NEAR(x0, 3.8317059702075123, 1e-12);
  EXPECT_NEAR(std::cyl_bessel_j(1.0, x0), 0.0, 1e-13);
  EXPECT_DOUBLE_EQ(rayleigh_factor(), x0 / kTwoPi);
  EXPECT_NEAR(rayleigh_factor(), 0.61, 0.0005);
}

TEST(EffectiveDistance, Examples) {
  const SourceSpec n2{2, 1e-6, 1e-6};
  ImagingGeometry g{10.0, 0.05, 1.0, 1.0, 0.1, 0.01, {}};
  EXPECT_NEAR(effective_object_distance(g, n2, kI), 5.05, 1e-14);

  g.d2 = 0.0;
  EXPECT_EQ(effective_object_distance(g, SourceSpec{1, 1e-6, 1e-6}, kI), g.d1);

  ImagingGeometry g2{0.0, 0.05, 10.0, 1.0, 0.1, 0.01, 0.2};
  EXPECT_NEAR(effective_object_distance(g2, n2, kII), 5.05, 1e-14);
}

TEST(EffectiveDistance, StrictlyDecreasingInN) {
  ImagingGeometry g{10.0, 0.05, 3.0, 1.0, 0.1, 0.01, {}};
  ImagingGeometry g2 = g;
  g2.d2_prime = 0.2;
  double prev1 = INFINITY, prev2 = INFINITY;
  for (int n = 1; n <= 10; ++n) {
    const SourceSpec s{n, 0.8e-6, 1.1e-6};
    const double e1 = effective_object_distance(g, s, kI);
    const double e2 = effective_object_distance(g2, s, kII);
    EXPECT_LT(e1, prev1);
    EXPECT_LT(e2, prev2);
    prev1 = e1;
    prev2 = e2;
  }
}

TEST(ThinLens, Examples) {
  EXPECT_NEAR(thin_lens_solve({.focal = 0.1, .image_side = {}, .object_side = 5.05}),
              1.0 / (1.0 / 0.1 - 1.0 / 5.05), 1e-15);
  EXPECT_NEAR(thin_lens_solve({.focal = 0.1, .image_side = {}, .object_side = 0.2}), 0.2, 1e-15);
  EXPECT_THROW(thin_lens_solve({.focal = 0.1, .image_side = {}, .object_side = 0.1}), UnsolvableError);
  EXPECT_THROW(thin_lens_solve({.focal = 0.1, .image_side = {}, .object_side = 0.05}), UnsolvableError);
  EXPECT_NEAR(thin_lens_solve({.focal = {}, .image_side = 0.2, .object_side = 0.2}), 0.1, 1e-15);
}

TEST(ThinLens, ResubstitutedResidual) {
  for (double f : {0.05, 0.1, 0.37}) {
    for (double a : {0.4, 1.0, 5.05, 123.0}) {
      const double b = thin_lens_solve({.focal = f, .image_side = {}, .object_side = a});
      EXPECT_LE(std::abs(1.0 / f - 1.0 / a - 1.0 / b), 1e-12 / f);
    }
  }
}

TEST(Geometry, ValidationNamesTheField) {
  ImagingGeometry g{-10.0, 0.0, 1.0, 1.0, 0.1, 0.01, {}};
  try {
    validate(g, kI);
    FAIL() << "negative d1 accepted";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("d1"), std::string::npos);
  }
  g.d1 = 10.0;
  EXPECT_NO_THROW(validate(g, kI));  // d2 = 0 is allowed
  EXPECT_THROW(validate(g, kII), DomainError);  // d2_prime missing
  g.d2_prime = 0.2;
  EXPECT_THROW(validate(g, kI), DomainError);
  EXPECT_THROW(validate(SourceSpec{0, 1e-6, 1e-6}), DomainError);
  EXPECT_THROW(validate(SourceSpec{1, -1e-6, 1e-6}), DomainError);
}

TEST(Magnification, Examples) {
  const SourceSpec s{2, 1e-6, 1e-6};
  ImagingGeometry g{10.0, 0.05, 1.0, 0.0, 0.1, 0.01, {}};
  g = focus(g, s, kI);
  EXPECT_NEAR(magnification(g, s, kI), g.L2 / 5.05, 1e-15);
  EXPECT_NEAR(magnification(g, s, kI), 0.0202, 1e-4);

  ImagingGeometry unit{0.2 * 2, 0.0, 1.0, 0.2, 0.1, 0.01, {}};
  EXPECT_NEAR(magnification(unit, s, kI), 1.0, 1e-15);

  ImagingGeometry g2{0.0, 0.05, 10.0, 1.0, 0.1, 0.01, 1.0};
  g2 = focus(g2, s, kII);
  EXPECT_NEAR(magnification(g2, s, kII), 5.05 / *g2.d2_prime, 1e-13);
  EXPECT_NEAR(magnification(g2, s, kII), 49.5, 0.01);

  g.L2 *= 1.01;
  EXPECT_THROW(magnification(g, s, kI), InconsistentGeometryError);
}

TEST(AiryRadius, Examples) {
  const SourceSpec s1{1, 1e-6, 1e-6};
  ImagingGeometry g{0.1 * 0.1 / (0.1 - 0.05), 0.0, 1.0, 0.1, 0.05, 0.01, {}};
  EXPECT_NEAR(airy_radius(g, s1, kI), 6.1e-6, 0.01e-6);
  EXPECT_DOUBLE_EQ(airy_radius(g, s1, kI), rayleigh_factor() * 1e-6 * 0.1 / 0.01);

  const SourceSpec s2{2, 1e-6, 1e-6};
  ImagingGeometry g2{0.0, 0.0, 10.0, 1.0, 0.1, 0.01, 1.0};
  EXPECT_NEAR(airy_radius(g2, s2, kII), rayleigh_factor() * 1e-6 * 5.0 / 0.01, 1e-18);

  // N -> infinity leaves only the d2 term; the L1/N remainder is 5e-4 here
  ImagingGeometry g3{0.0, 0.02, 10.0, 1.0, 0.1, 0.01, 1.0};
  const SourceSpec big{1000000, 1e-6, 1e-6};
  const double limit = rayleigh_factor() * 1e-6 * 0.02 / 0.01;
  EXPECT_NEAR(airy_radius(g3, big, kII) / limit, 1.0 + 10.0 / (1e6 * 0.02), 1e-12);
  EXPECT_NEAR(airy_radius(g3, big, kII) / limit, 1.0, 1e-3);
}
