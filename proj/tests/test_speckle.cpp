#include <gtest/gtest.h>

#include <cmath>

#include "qgi/error.hpp"
#include "qgi/random.hpp"
#include "qgi/speckle_ensemble.hpp"

using namespace qgi;

namespace {

constexpr auto kI = Configuration::ObjectInDegenerateArm;

struct Scene {
  SourceSpec src;
  ImagingGeometry geom;
  SampledObject obj;
  EnsembleConfig ens;
  GridSpec grid;

  Scene(int n, std::size_t pixels, double L1, std::size_t realizations = 400)
      : src{n, 1e-6, 1e-6},
        geom(focus({10.0, 0.001, L1, 0.0, 0.1, 0.01, {}}, src, kI)),
        obj(SampledObject::slit(std::vector<cplx>(pixels, 1.0), 75e-6)) {
    ens.realizations = realizations;
    ens.rng_seed = 7;
    ens.bucket = BucketDetector{1e-4, Rect{{0.0, 0.0}, 1e-2, 1e-2}};
    ens.detector_samples = 16;
    grid = GridSpec::line({}, 4.0 * airy_radius(geom, src, kI), 33);
  }
};

}  // namespace

TEST(Philox, KnownAnswers) {
  const Philox4x32 zero(Philox4x32::Key{0, 0});
  EXPECT_EQ(zero({0, 0, 0, 0}), (Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  const Philox4x32 pi(Philox4x32::Key{0xa4093822, 0x299f31d0});
  EXPECT_EQ(pi({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}),
            (Philox4x32::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
  const Philox4x32 ones(Philox4x32::Key{0xffffffff, 0xffffffff});
  EXPECT_EQ(ones({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}),
            (Philox4x32::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, Uniform01Range) {
  EXPECT_EQ(uniform01(0, 0), 0.0);
  EXPECT_LT(uniform01(0xffffffff, 0xffffffff), 1.0);
  EXPECT_DOUBLE_EQ(uniform01(0x80000000, 0), 0.5);
}

TEST(PhaseScreen, UniformAndIndependent) {
  const auto obj = SampledObject::slit(std::vector<cplx>(100000, 1.0), 1e-6);
  const auto a = sample_phase_screen(obj, 42, 0, 0);
  cplx mean{};
  double lo = INFINITY, hi = -INFINITY;
  for (double phi : a.phases) {
    mean += std::polar(1.0, phi);
    lo = std::min(lo, phi);
    hi = std::max(hi, phi);
  }
  mean /= static_cast<double>(a.phases.size());
  EXPECT_LT(std::abs(mean), 0.02);
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, kTwoPi);

  // Second moment: <exp(2i phi)> also vanishes for a uniform phase.
  cplx second{};
  for (double phi : a.phases) second += std::polar(1.0, 2.0 * phi);
  EXPECT_LT(std::abs(second) / a.phases.size(), 0.02);

  const auto again = sample_phase_screen(obj, 42, 0, 0);
  EXPECT_EQ(a.phases, again.phases);
  EXPECT_NE(a.phases, sample_phase_screen(obj, 42, 1, 0).phases);
  EXPECT_NE(a.phases, sample_phase_screen(obj, 42, 0, 1).phases);
  EXPECT_NE(a.phases, sample_phase_screen(obj, 43, 0, 0).phases);
}

TEST(SpeckleEnsemble, FastPathMatchesBruteForce) {
  Scene s(2, 6, 3.0, 20);
  s.ens.detector_samples = 8;
  s.grid = GridSpec::line({}, 2.0 * airy_radius(s.geom, s.src, kI), 9);
  const auto fast = mc_bucket_intensity(s.geom, s.src, s.obj, s.ens, s.grid, 1, McPath::Fast);
  const auto brute = mc_bucket_intensity(s.geom, s.src, s.obj, s.ens, s.grid, 1, McPath::BruteForce);
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    EXPECT_NEAR(fast.total[i] / brute.total[i], 1.0, 1e-10);
    EXPECT_NEAR(fast.image_term[i], brute.image_term[i], 1e-10 * brute.total[i]);
  }
}

TEST(SpeckleEnsemble, FastPathMatchesBruteForceThreePhotons) {
  Scene s(3, 3, 3.0, 4);
  s.ens.detector_samples = 6;
  s.grid = GridSpec::line({}, airy_radius(s.geom, s.src, kI), 3);
  const auto fast = mc_bucket_intensity(s.geom, s.src, s.obj, s.ens, s.grid, 1, McPath::Fast);
  const auto brute = mc_bucket_intensity(s.geom, s.src, s.obj, s.ens, s.grid, 1, McPath::BruteForce);
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    EXPECT_NEAR(fast.total[i] / brute.total[i], 1.0, 1e-10);
    EXPECT_NEAR(fast.image_term[i], brute.image_term[i], 1e-10 * brute.total[i]);
  }
}

TEST(SpeckleEnsemble, SinglePixelHasNoBackground) {
  Scene s(2, 1, 3.0, 50);
  const auto mc = mc_bucket_intensity(s.geom, s.src, s.obj, s.ens, s.grid);
  EXPECT_NEAR(mc.visibility, 1.0, 1e-12);
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    EXPECT_NEAR(mc.background_field[i], 0.0, 1e-12 * mc.total[mc.peak_index]);
  }
  const auto exact = analytic_speckle(s.geom, s.src, s.obj, s.ens, s.grid, 2);
  EXPECT_NEAR(exact.visibility, 1.0, 1e-12);
}

TEST(SpeckleEnsemble, RefusesDegenerateConfigurations) {
  Scene s(2, 4, 3.0, 1);
  EXPECT_THROW(mc_bucket_intensity(s.geom, s.src, s.obj, s.ens, s.grid), DomainError);
  s.ens.realizations = 10;
  s.ens.detector_samples = 2;
  EXPECT_THROW(mc_bucket_intensity(s.geom, s.src, s.obj, s.ens, s.grid), DomainError);
  s.ens.detector_samples = 16;
  EXPECT_THROW(analytic_speckle(s.geom, s.src, s.obj, s.ens, s.grid, 4), UnsupportedError);
  // Too few bucket samples for the speckle period over a long slit.
  Scene wide(2, 64, 3.0, 10);
  wide.ens.detector_samples = 8;
  EXPECT_THROW(mc_bucket_intensity(wide.geom, wide.src, wide.obj, wide.ens, wide.grid),
               SamplingError);
  const auto sheet = SampledObject::grid(2, 2, {1.0, 1.0, 1.0, 1.0}, 75e-6);
  EXPECT_THROW(mc_bucket_intensity(s.geom, s.src, sheet, s.ens, s.grid, 1, McPath::Fast),
               UnsupportedError);
}

TEST(SpeckleEnsemble, DeterministicAcrossThreadCounts) {
  Scene s(2, 8, 3.0, 60);
  const auto one = mc_bucket_intensity(s.geom, s.src, s.obj, s.ens, s.grid, 1);
  const auto three = mc_bucket_intensity(s.geom, s.src, s.obj, s.ens, s.grid, 3);
  EXPECT_EQ(one.total, three.total);
  EXPECT_EQ(one.image_term, three.image_term);
  EXPECT_EQ(one.standard_errors, three.standard_errors);
  EXPECT_EQ(one.visibility, three.visibility);
}

TEST(SpeckleEnsemble, MonteCarloWithinThreeStandardErrorsOfExactAverage) {
  Scene s(2, 8, 3.0, 400);
  const auto mc = mc_bucket_intensity(s.geom, s.src, s.obj, s.ens, s.grid);
  const auto exact = analytic_speckle(s.geom, s.src, s.obj, s.ens, s.grid, 2);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    if (std::abs(mc.image_term[i] - exact.image_term[i]) <= 3.0 * mc.standard_errors[i]) ++inside;
    EXPECT_LE(std::abs(mc.total[i] - exact.total[i]), 5.0 * mc.total_se[i]);
  }
  EXPECT_GE(inside, static_cast<std::size_t>(std::ceil(0.95 * s.grid.size())));
}

TEST(SpeckleEnsemble, BackgroundBoundForTwoPhotons) {
  for (double L1 : {1.5, 3.0, 6.0}) {
    Scene s(2, 8, L1, 200);
    const auto exact = analytic_speckle(s.geom, s.src, s.obj, s.ens, s.grid, 2);
    // s_b^2 (sum |A|^2 p^2)^2 with |A| = 1
    const double bound = std::pow(1e-4 * 8 * std::pow(75e-6, 4), 2);
    EXPECT_NEAR(exact.background_bound / bound, 1.0, 1e-12);
    EXPECT_LE(exact.background, exact.background_bound);
    const auto mc = mc_bucket_intensity(s.geom, s.src, s.obj, s.ens, s.grid);
    EXPECT_LE(mc.background, mc.background_bound + 3.0 * mc.background_se_at_peak);
  }
}

TEST(SpeckleEnsemble, FresnelRatioScalesImageNotBackground) {
  Scene a(2, 8, 3.0), b(2, 8, 6.0);
  const auto ea = analytic_speckle(a.geom, a.src, a.obj, a.ens, a.grid, 2);
  const auto eb = analytic_speckle(b.geom, b.src, b.obj, b.ens, b.grid, 2);
  EXPECT_NEAR(eb.fresnel_ratio / ea.fresnel_ratio, 2.0, 1e-14);
  EXPECT_NEAR(ea.fresnel_ratio, 3.0 * 1e-6 / (kTwoPi * 1e-4), 1e-15);
  ASSERT_EQ(ea.class_terms.size(), 2u);
  EXPECT_EQ(ea.class_terms[1].name, "single_cycle");
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    EXPECT_NEAR(eb.class_terms[1].values[i] / ea.class_terms[1].values[i], 2.0, 1e-12);
    EXPECT_NEAR(eb.class_terms[0].values[i] / ea.class_terms[0].values[i], 1.0, 1e-12);
    EXPECT_NEAR(eb.background_field[i] / ea.background_field[i], 1.0, 1e-9);
  }
  // The exact single-cycle term tracks its continuum limit.
  const std::size_t k = ea.peak_index;
  EXPECT_NEAR(ea.image_term[k] / ea.class_terms[1].values[k], 1.0, 0.1);
}

TEST(SpeckleEnsemble, VisibilityGrowsWithFresnelRatioAndFallsWithN) {
  double prev = 0.0;
  for (double L1 : {1.5, 3.0, 6.0, 12.0}) {
    Scene s(2, 8, L1);
    const double v = analytic_speckle(s.geom, s.src, s.obj, s.ens, s.grid, 2).visibility;
    EXPECT_GT(v, prev);
    prev = v;
  }
  Scene s2(2, 8, 3.0), s3(3, 8, 3.0);
  EXPECT_LT(analytic_speckle(s3.geom, s3.src, s3.obj, s3.ens, s3.grid, 3).visibility,
            analytic_speckle(s2.geom, s2.src, s2.obj, s2.ens, s2.grid, 2).visibility);
}

TEST(SpeckleEnsemble, ThreePhotonClassStructure) {
  Scene s(3, 8, 3.0);
  const auto exact = analytic_speckle(s.geom, s.src, s.obj, s.ens, s.grid, 3);
  ASSERT_EQ(exact.class_terms.size(), 3u);
  EXPECT_EQ(exact.class_terms[0].name, "identity");
  EXPECT_EQ(exact.class_terms[1].name, "transpositions");
  EXPECT_EQ(exact.class_terms[2].name, "three_cycles");
  // Single pixel: every class is the same somb^2 image, weighted by its
  // multiplicity and powers of the Fresnel ratio.
  Scene one(3, 1, 3.0);
  const auto e1 = analytic_speckle(one.geom, one.src, one.obj, one.ens, one.grid, 3);
  const double w = 1e-6 * 3.0 / (75e-6 * 1e-2);
  const std::size_t k = e1.peak_index;
  EXPECT_NEAR(e1.class_terms[1].values[k] / e1.class_terms[0].values[k], 3.0 * w, 1e-12);
  EXPECT_NEAR(e1.class_terms[2].values[k] / e1.class_terms[0].values[k], 2.0 * w * w, 1e-12);
}

TEST(Visibility, Definition) {
  SpeckleReport r;
  r.total = {1.0, 3.0, 2.0};
  r.background_field = {0.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(visibility(r), 1.0);
  r.background_field = {1.0, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(visibility(r), 0.5);
  r.background_field = {1e6, 1e6, 1e6};
  EXPECT_LT(visibility(r), 1e-5);
  r.total = {2.0, 2.0, 2.0};
  EXPECT_THROW(visibility(r), DomainError);
}
