#pragma once

// Random-phase (rough surface) objects seen through an N-photon bucket.
//
// Every object pixel transmits with an independent uniform phase. The bucket
// integral over the N detection positions is a fixed midpoint sum over the
// bucket rectangle; only the phases are random.
//
// The ensemble-averaged intensity splits by which rearrangements of the pixel
// tuple survive the phase average. The image term collects the rearrangements
// reached by a single N-cycle; everything else is background. Monte Carlo
// estimates the image by re-running each realization with independent phase
// screens per block of every set partition of the photons and combining the
// results with the partition-lattice Moebius weights, plus an exact correction
// for pixel tuples with repeated entries.

#include <cstdint>
#include <string>
#include <vector>

#include "qgi/analytic_imaging.hpp"
#include "qgi/objects.hpp"
#include "qgi/optics_core.hpp"

namespace qgi {

struct PhaseScreen {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> phases;  ///< radians in [0, 2 pi), row-major like SampledObject
};

/// i.i.d. uniform phases, one per pixel, from the counter-based generator.
/// `realization` and `stream` select independent screens for the same seed.
PhaseScreen sample_phase_screen(const SampledObject& obj, std::uint64_t seed,
                                std::uint64_t realization = 0, std::uint32_t stream = 0);

struct EnsembleConfig {
  std::size_t realizations = 2000;
  std::uint64_t rng_seed = 0;
  BucketDetector bucket{};
  int detector_samples = 32;  ///< midpoint samples per axis over the bucket
};

void validate(const EnsembleConfig& ens);

enum class McPath { Auto, Fast, BruteForce };

struct ClassTerm {
  std::string name;
  std::vector<double> values;
};

struct SpeckleReport {
  GridSpec grid;
  int n_degenerate = 2;
  std::size_t realizations = 0;  ///< 0 for analytic reports

  std::vector<double> total;             ///< <bucket |B|^2>
  std::vector<double> total_se;
  std::vector<double> image_term;        ///< single-cycle part
  std::vector<double> standard_errors;   ///< of image_term
  std::vector<double> background_field;  ///< total - image_term
  std::vector<double> background_se;

  std::size_t peak_index = 0;      ///< argmax of total
  double background = 0.0;         ///< background constant C, taken at the peak
  double background_se_at_peak = 0.0;
  double visibility = 0.0;
  double visibility_se = 0.0;
  double fresnel_ratio = 0.0;      ///< L1 lambda1 / (2 pi s_b)
  double background_bound = 0.0;   ///< s_b^N (sum |A|^2 w)^N

  /// Continuum (delta-correlated, infinite bucket sampling) closed forms for
  /// each permutation class; analytic reports only.
  std::vector<ClassTerm> class_terms;

  bool precision_warning = false;
  std::string warning;
};

/// Monte-Carlo estimate over `ens.realizations` phase screens. Object in the
/// degenerate arm, bucket N-photon detector, ancilla scanned over rho2_grid.
/// Work is split across `jobs` threads; the result does not depend on it.
SpeckleReport mc_bucket_intensity(const ImagingGeometry& geom, const SourceSpec& src,
                                  const SampledObject& obj, const EnsembleConfig& ens,
                                  const GridSpec& rho2_grid, unsigned jobs = 1,
                                  McPath path = McPath::Auto);

/// Exact ensemble average on the same bucket sampling as the Monte Carlo,
/// together with the continuum closed forms. n must be 2 or 3.
SpeckleReport analytic_speckle(const ImagingGeometry& geom, const SourceSpec& src,
                               const SampledObject& obj, const EnsembleConfig& ens,
                               const GridSpec& rho2_grid, int n);

/// (I_max - C) / (I_max + C) with C the background at the intensity peak.
/// Throws DomainError for a flat field.
double visibility(const SpeckleReport& report);

}  // namespace qgi
