#include <gtest/gtest.h>

#include <cmath>

#include "qgi/error.hpp"
#include "qgi/resolution_lab.hpp"

using namespace qgi;

namespace {

constexpr auto kI = Configuration::ObjectInDegenerateArm;
constexpr auto kII = Configuration::ObjectInAncillaArm;
constexpr double kJ1Zero = 3.8317059702075123;

Scenario degenerate_arm(int n, double d2 = 0.0) {
  Scenario s;
  s.geom = {10.0, d2, 1.0, 0.0, 0.1, 0.01, {}};
  s.src = {n, 1e-6, 1e-6};
  s.cfg = kI;
  return refocus(s);
}

Scenario ancilla_arm(int n, double d2 = 0.0, double L1 = 10.0) {
  Scenario s;
  s.geom = {0.0, d2, L1, 1.0, 0.1, 0.01, 0.2};
  s.src = {n, 1e-6, 1e-6};
  s.cfg = kII;
  s.det = PointDetector{};
  return refocus(s);
}

// Airy pattern with its first zero at `radius`, sampled from `start`.
Profile airy_profile(double radius, double start, double pitch, std::size_t n) {
  Profile p{start, pitch, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = kJ1Zero * std::fabs(p.position(i)) / radius;
    const double v = x == 0.0 ? 1.0 : 2.0 * std::cyl_bessel_j(1.0, x) / x;
    p.intensity.push_back(v * v);
  }
  return p;
}

}  // namespace

TEST(FirstZero, LocatesTheDarkRing) {
  const double xi = 6.1e-6;
  const auto p = airy_profile(xi, -4 * xi / 32, xi / 32, 60);
  EXPECT_NEAR(first_zero_radius(p, 0.0) / xi, 1.0, 1e-5);
  // Scanning the other way.
  const auto q = airy_profile(xi, 4 * xi / 32, -xi / 32, 60);
  EXPECT_NEAR(first_zero_radius(q, 0.0) / xi, 1.0, 1e-5);
  // Peak between samples.
  const auto r = airy_profile(xi, -4.37 * xi / 32, xi / 32, 60);
  EXPECT_NEAR(first_zero_radius(r, 0.0) / xi, 1.0, 1e-5);
}

TEST(FirstZero, RefusesUnusableProfiles) {
  Profile flat{0.0, 1e-7, std::vector<double>(64, 1.0)};
  EXPECT_THROW(first_zero_radius(flat, 0.0), DetectionError);
  const double xi = 6.1e-6;
  const auto coarse = airy_profile(xi, 0.0, xi / 4, 20);
  EXPECT_THROW(first_zero_radius(coarse, 0.0), SamplingError);
  const auto short_run = airy_profile(xi, 0.0, xi / 32, 20);
  EXPECT_THROW(first_zero_radius(short_run, 0.0), DetectionError);
  const auto fine = airy_profile(xi, 0.0, xi / 32, 60);
  EXPECT_THROW(first_zero_radius(fine, 10 * xi), DetectionError);
}

TEST(DetectResolved, BoundaryAtTheFirstZero) {
  const double xi = 6.1e-6;
  const auto p = airy_profile(xi, -4 * xi / 32, xi / 32, 60);
  EXPECT_TRUE(detect_resolved(p, 0.0, xi));
  EXPECT_TRUE(detect_resolved(p, 0.0, 1.2 * xi));
  EXPECT_FALSE(detect_resolved(p, 0.0, 0.95 * xi));
  EXPECT_FALSE(detect_resolved(p, 0.0, 0.5 * xi));
}

TEST(Refocus, RestoresTheLensEquation) {
  const auto a = degenerate_arm(3, 0.05);
  EXPECT_LT(thin_lens_residual(a.geom, a.src, a.cfg), 1e-12);
  const auto b = ancilla_arm(3, 0.05);
  EXPECT_EQ(*b.geom.d2_prime, 0.2);
  EXPECT_LT(thin_lens_residual(b.geom, b.src, b.cfg), 1e-12);
}

TEST(SeparationSweep, ResolvedAtTheLimitNotBelow) {
  for (const auto& base : {degenerate_arm(2), ancilla_arm(2)}) {
    const double am = rayleigh_min_separation(base.geom, base.src, base.cfg);
    SweepSpec spec{SweepParameter::SeparationA, {0.5 * am, 0.95 * am, am, 1.5 * am}, base};
    const auto rows = run_sweep(spec, true);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_FALSE(*rows[0].resolved);
    EXPECT_FALSE(*rows[1].resolved);
    EXPECT_TRUE(*rows[2].resolved);
    EXPECT_TRUE(*rows[3].resolved);
    for (const auto& r : rows) EXPECT_FALSE(r.report.has_value());
  }
}

TEST(ScanMinSeparation, MatchesTheFormula) {
  for (int n : {1, 2, 4}) {
    const auto rep = scan_min_separation(degenerate_arm(n), 0.005);
    EXPECT_EQ(rep.n_degenerate, n);
    EXPECT_LE(rep.relative_error, 0.005) << "N=" << n;
    EXPECT_NEAR(rep.predicted_a_m, rayleigh_factor() * 1e-6 * 10.0 / (n * 0.01), 1e-18);
  }
  EXPECT_THROW(scan_min_separation(degenerate_arm(2), 0.0), DomainError);
}

TEST(ScanMinSeparation, PointDetectorGivesTheSameBoundary) {
  auto s = degenerate_arm(2, 0.01);
  s.det = PointDetector{{2e-4, 0.0}};
  const auto rep = scan_min_separation(s, 0.005);
  EXPECT_LE(rep.relative_error, 0.005);
}

TEST(NSweep, GainOverClassicalIsN) {
  SweepSpec spec{SweepParameter::NDegenerate, {1, 2, 3, 5}, degenerate_arm(1)};
  const auto rows = run_sweep(spec, true, 2);
  double prev = INFINITY;
  for (const auto& row : rows) {
    ASSERT_TRUE(row.report.has_value());
    const auto& rep = *row.report;
    EXPECT_LT(rep.measured_a_m, prev);
    prev = rep.measured_a_m;
    ASSERT_TRUE(rep.gain_vs_classical.has_value());
    EXPECT_NEAR(rep.predicted_gain, row.value, 1e-12);
    EXPECT_NEAR(*rep.gain_vs_classical / row.value, 1.0, 0.01) << "N=" << row.value;
  }
  EXPECT_DOUBLE_EQ(*rows.front().report->gain_vs_classical, 1.0);
}

TEST(NSweep, ResultIndependentOfThreadCount) {
  SweepSpec spec{SweepParameter::NDegenerate, {1, 2, 3}, degenerate_arm(1)};
  const auto a = run_sweep(spec, true, 1);
  const auto b = run_sweep(spec, true, 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].report->measured_a_m, b[i].report->measured_a_m);
  }
}

TEST(NSweep, AncillaArmLimitDoesNotDependOnN) {
  SweepSpec spec{SweepParameter::NDegenerate, {1, 2, 5, 10}, ancilla_arm(1, 0.05)};
  const auto rows = run_sweep(spec, true, 1, 1e-4);
  const double first = rows.front().report->measured_a_m;
  for (const auto& row : rows) {
    EXPECT_NEAR(row.report->measured_a_m / first, 1.0, 2e-4);
    EXPECT_NEAR(row.predicted_a_m, rayleigh_factor() * 1e-6 * 0.2 / 0.01, 1e-18);
    EXPECT_NEAR(*row.report->gain_vs_classical, 1.0, 2e-4);
  }
}

TEST(AiryShrink, OneOverNWhenSourceSitsAtTheLens) {
  const auto rows = airy_shrink_scan(ancilla_arm(1), {1, 2, 3, 5, 10});
  for (const auto& row : rows) {
    EXPECT_NEAR(row.predicted_ratio, 1.0 / row.n_degenerate, 1e-14);
    EXPECT_NEAR(row.measured_ratio * row.n_degenerate, 1.0, 1e-3);
    EXPECT_NEAR(row.measured_xi / row.predicted_xi, 1.0, 1e-4);
  }
}

TEST(AiryShrink, NoShrinkWhenL1IsSmallComparedWithD2) {
  // L1/N is negligible next to d2, so the Airy radius barely moves.
  const auto rows = airy_shrink_scan(ancilla_arm(1, 1.0, 1e-3), {1, 2, 10});
  for (const auto& row : rows) EXPECT_NEAR(row.measured_ratio, 1.0, 1e-3);
  const auto halving = airy_shrink_scan(ancilla_arm(1, 0.01, 10.0), {1, 2});
  EXPECT_NEAR(halving.back().measured_ratio, 0.5005, 2e-4);
}

TEST(RatioSweeps, ClosedFormRows) {
  const auto base = degenerate_arm(2, 0.1);
  SweepSpec d1{SweepParameter::D1OverD2, {10, 100, 1000}, base};
  const auto rows = run_sweep(d1, false);
  for (const auto& row : rows) {
    EXPECT_FALSE(row.report.has_value());
    // a_m = c lambda/R (d2 + d1/N)
    EXPECT_NEAR(row.predicted_a_m / (rayleigh_factor() * 1e-4 * (0.1 + row.value * 0.1 / 2)), 1.0,
                1e-12);
  }
  SweepSpec l1{SweepParameter::L1OverD2, {1, 10, 100}, ancilla_arm(2, 0.1)};
  double prev = 0.0;
  for (const auto& row : run_sweep(l1, false)) {
    EXPECT_GT(row.airy_radius, prev);
    prev = row.airy_radius;
  }
}

TEST(SweepSpec, Validation) {
  const auto base = degenerate_arm(2, 0.1);
  EXPECT_THROW(validate(SweepSpec{SweepParameter::NDegenerate, {}, base}), DomainError);
  EXPECT_THROW(validate(SweepSpec{SweepParameter::NDegenerate, {1, 2.5}, base}), DomainError);
  EXPECT_THROW(validate(SweepSpec{SweepParameter::NDegenerate, {1, 3, 2}, base}), DomainError);
  EXPECT_THROW(validate(SweepSpec{SweepParameter::SeparationA, {1e-6, 1e-6}, base}), DomainError);
  EXPECT_THROW(validate(SweepSpec{SweepParameter::SeparationA, {-1e-6}, base}), DomainError);
  EXPECT_THROW(validate(SweepSpec{SweepParameter::SeparationA, {NAN}, base}), DomainError);
  EXPECT_NO_THROW(validate(SweepSpec{SweepParameter::SeparationA, {3e-6, 2e-6}, base}));
  EXPECT_THROW(validate(SweepSpec{SweepParameter::D1OverD2, {10}, degenerate_arm(2, 0.0)}),
               DomainError);
  EXPECT_STREQ(to_string(SweepParameter::L1OverD2), "L1_over_d2");
}
