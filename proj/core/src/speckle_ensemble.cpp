#include "qgi/speckle_ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "qgi/error.hpp"
#include "qgi/parallel.hpp"
#include "qgi/permutations.hpp"
#include "qgi/random.hpp"

namespace qgi {

namespace {

constexpr double kExactBudget = 5e7;
constexpr double kBruteBudget = 2e8;
constexpr double kPrecisionLimit = 0.1;

// Everything the estimators share: pixel data, bucket sampling and the
// lens-arm factors as functions of the photon centroid rho_+.
struct Setup {
  int n = 2;
  bool slit = true;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t m = 0;
  double p = 0.0;
  std::vector<Vec2> pos;
  std::vector<cplx> c;  // A_j p^2 exp(i K1 |x_j|^2 / 2 L1)
  std::vector<double> tx;
  std::vector<double> ty;
  double hx = 0.0;
  double hy = 0.0;
  double wx = 0.0;
  double wy = 0.0;
  double s_b = 0.0;
  double k1 = 0.0;
  double L1 = 0.0;
  double L2 = 0.0;
  double eff = 0.0;
  double x_dist = 0.0;  // d1 + N lambda2/lambda1 d2
  double pupil = 0.0;
  std::size_t jx = 0;  // centroid index range per axis
  std::size_t jy = 0;

  std::size_t keys() const { return jx * jy; }

  Vec2 centroid(std::size_t key) const {
    const double sx = static_cast<double>(key / jy);
    const double sy = static_cast<double>(key % jy);
    return {pos.front().x + sx * p / n, pos.front().y + sy * p / n};
  }

  cplx q_factor(Vec2 rp) const { return std::polar(1.0, n * k1 * norm2(rp) / (2.0 * x_dist)); }

  double psf(Vec2 rp, Vec2 rho2) const { return somb(pupil * norm(rho2 / L2 + rp / eff)); }
};

std::vector<double> midpoints(double centre, double width, int samples, double& h) {
  h = width / samples;
  std::vector<double> t(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) t[static_cast<std::size_t>(s)] = centre - width / 2 + (s + 0.5) * h;
  return t;
}

Setup make_setup(const ImagingGeometry& geom, const SourceSpec& src, const SampledObject& obj,
                 const EnsembleConfig& ens) {
  validate(geom, Configuration::ObjectInDegenerateArm);
  validate(src);
  validate(obj);
  validate(ens);
  require_thin_lens(geom, src, Configuration::ObjectInDegenerateArm);

  Setup s;
  s.n = src.n_degenerate;
  s.slit = obj.dimensionality == Dimensionality::Slit1D;
  s.nx = obj.nx;
  s.ny = obj.ny;
  s.m = obj.size();
  s.p = obj.pixel_pitch;
  s.k1 = src.k1();
  s.L1 = geom.L1;
  s.L2 = geom.L2;
  s.eff = effective_object_distance(geom, src, Configuration::ObjectInDegenerateArm);
  s.x_dist = geom.d1 + s.n * src.lambda2 / src.lambda1 * geom.d2;
  s.pupil = kTwoPi * geom.R / src.lambda2;
  s.jx = static_cast<std::size_t>(s.n) * (s.nx - 1) + 1;
  s.jy = static_cast<std::size_t>(s.n) * (s.ny - 1) + 1;
  for (std::size_t iy = 0; iy < s.ny; ++iy) {
    for (std::size_t ix = 0; ix < s.nx; ++ix) {
      const Vec2 x = obj.pixel_center(ix, iy);
      s.pos.push_back(x);
      s.c.push_back(obj.values[iy * s.nx + ix] * s.p * s.p *
                    std::polar(1.0, s.k1 * norm2(x) / (2.0 * s.L1)));
    }
  }
  const Rect& box = ens.bucket.extent;
  s.wx = box.width;
  s.wy = box.height;
  s.s_b = ens.bucket.area;
  s.tx = midpoints(box.center.x, box.width, ens.detector_samples, s.hx);
  if (s.slit) {
    s.ty = {box.center.y};
    s.hy = box.height;
  } else {
    s.ty = midpoints(box.center.y, box.height, ens.detector_samples, s.hy);
  }

  // Bucket sums repeat with period (speckle width) x (samples) in the pixel
  // offset; keep every offset the object can produce inside one period.
  const double lambda1 = src.lambda1;
  const auto check_axis = [&](double width, std::size_t pixels, const char* axis) {
    const double speckle = lambda1 * geom.L1 / (s.p * width);
    if (speckle * ens.detector_samples < 2.0 * static_cast<double>(pixels - 1)) {
      throw SamplingError(std::string("bucket sampling aliases along ") + axis + ": " +
                          std::to_string(ens.detector_samples) + " samples with a speckle width of " +
                          std::to_string(speckle) + " pixels cannot cover " +
                          std::to_string(pixels) + " pixels");
    }
  };
  check_axis(s.wx, s.nx, "x");
  if (!s.slit) check_axis(s.wy, s.ny, "y");
  return s;
}

std::size_t centroid_key(const Setup& s, const std::vector<std::size_t>& tuple) {
  std::size_t sx = 0;
  std::size_t sy = 0;
  for (const auto j : tuple) {
    sx += j % s.nx;
    sy += j / s.nx;
  }
  return sx * s.jy + sy;
}

bool next_tuple(std::vector<std::size_t>& t, std::size_t base) {
  for (std::size_t r = t.size(); r-- > 0;) {
    if (++t[r] < base) return true;
    t[r] = 0;
  }
  return false;
}

std::vector<cplx> bucket_sums(const std::vector<double>& t, double h, double pitch, double k1,
                              double L1, std::size_t pixels) {
  std::vector<cplx> f(2 * pixels - 1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double q = static_cast<double>(i) - static_cast<double>(pixels - 1);
    cplx sum{};
    for (const double ts : t) sum += std::polar(1.0, -k1 * ts * q * pitch / L1);
    f[i] = h * sum;
  }
  return f;
}

// Exact ensemble averages grouped by centroid key: the full average, its
// single-cycle part, and the difference between that part and what the
// partition-lattice combination recovers (non-zero only for tuples with
// repeated pixels).
struct ExactWeights {
  std::vector<double> total;
  std::vector<double> image;
  std::vector<double> correction;
};

ExactWeights exact_weights(const Setup& s) {
  const auto perms = permutation_sum_terms(s.n);
  const auto parts = set_partitions(s.n);
  const double cost = std::pow(static_cast<double>(s.m), s.n) * static_cast<double>(perms.size());
  if (cost > kExactBudget) {
    throw UnsupportedError("exact speckle average needs " + std::to_string(cost) +
                           " tuple terms; reduce the pixel count or N");
  }
  std::vector<double> mu;
  for (const auto& pt : parts) mu.push_back(mobius_to_top(pt));
  std::vector<std::vector<bool>> keeps(perms.size(), std::vector<bool>(parts.size()));
  for (std::size_t a = 0; a < perms.size(); ++a) {
    for (std::size_t b = 0; b < parts.size(); ++b) keeps[a][b] = preserves_blocks(perms[a].image, parts[b]);
  }
  const auto fx = bucket_sums(s.tx, s.hx, s.p, s.k1, s.L1, s.nx);
  const auto fy = s.slit ? std::vector<cplx>{cplx{s.wy, 0.0}}
                         : bucket_sums(s.ty, s.hy, s.p, s.k1, s.L1, s.ny);
  const auto f_of = [&](std::size_t a, std::size_t b) {
    const std::size_t qx = a % s.nx + s.nx - 1 - b % s.nx;
    const std::size_t qy = a / s.nx + s.ny - 1 - b / s.nx;
    return fx[qx] * fy[qy];
  };

  ExactWeights w;
  w.total.assign(s.keys(), 0.0);
  w.image.assign(s.keys(), 0.0);
  w.correction.assign(s.keys(), 0.0);

  const std::size_t n = static_cast<std::size_t>(s.n);
  std::vector<std::size_t> tuple(n, 0);
  std::vector<std::vector<std::size_t>> seen;
  std::vector<std::vector<std::size_t>> which;
  std::vector<std::size_t> moved(n);
  do {
    double base = 1.0;
    for (const auto j : tuple) base *= std::norm(s.c[j]);
    if (base == 0.0) continue;
    seen.clear();
    which.clear();
    for (std::size_t a = 0; a < perms.size(); ++a) {
      for (std::size_t r = 0; r < n; ++r) moved[r] = tuple[static_cast<std::size_t>(perms[a].image[r])];
      const auto it = std::find(seen.begin(), seen.end(), moved);
      if (it == seen.end()) {
        seen.push_back(moved);
        which.push_back({a});
      } else {
        which[static_cast<std::size_t>(it - seen.begin())].push_back(a);
      }
    }
    const std::size_t key = centroid_key(s, tuple);
    for (std::size_t d = 0; d < seen.size(); ++d) {
      cplx fprod{1.0, 0.0};
      for (std::size_t r = 0; r < n; ++r) fprod *= f_of(tuple[r], seen[d][r]);
      const double term = base * fprod.real();
      bool single_cycle = false;
      for (const auto a : which[d]) single_cycle = single_cycle || perms[a].tag == CycleClass::FullCycle;
      double lattice = 0.0;
      for (std::size_t b = 0; b < parts.size(); ++b) {
        bool reached = false;
        for (const auto a : which[d]) reached = reached || keeps[a][b];
        if (reached) lattice += mu[b];
      }
      const double g = single_cycle ? 1.0 : 0.0;
      w.total[key] += term;
      w.image[key] += g * term;
      w.correction[key] += (g - lattice) * term;
    }
  } while (next_tuple(tuple, s.m));
  return w;
}

std::vector<double> weighted_field(const Setup& s, const std::vector<double>& weights,
                                   const GridSpec& grid) {
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t key = 0; key < weights.size(); ++key) {
    if (weights[key] == 0.0) continue;
    const Vec2 rp = s.centroid(key);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double v = s.psf(rp, grid.point(i % grid.nx, i / grid.nx));
      out[i] += weights[key] * v * v;
    }
  }
  return out;
}

std::vector<std::vector<cplx>> screens_for(const Setup& s, std::uint64_t seed, std::uint64_t r) {
  const Philox4x32 gen(seed);
  std::vector<std::vector<cplx>> out(static_cast<std::size_t>(s.n), std::vector<cplx>(s.m));
  for (std::uint32_t b = 0; b < static_cast<std::uint32_t>(s.n); ++b) {
    for (std::size_t j = 0; j < s.m; ++j) {
      const auto w = gen({static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(r),
                          static_cast<std::uint32_t>(r >> 32), b});
      out[b][j] = std::polar(1.0, kTwoPi * uniform01(w[0], w[1]));
    }
  }
  return out;
}

// Per-realization bucket intensities over the rho2 grid, one vector per
// set partition (in set_partitions order).
class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual std::vector<std::vector<double>> run(const std::vector<std::vector<cplx>>& screens) const = 0;
};

// Slit objects: the x dependence of the bucket phase factorises as
// omega^(s j), so the sum over sample tuples collapses onto a Gram matrix
// indexed by the centroid.
class FastSlitEstimator final : public Estimator {
 public:
  FastSlitEstimator(const Setup& s, const GridSpec& grid)
      : s_(s), parts_(set_partitions(s.n)), nj_(s.jx) {
    const std::size_t sx = s.tx.size();
    const int span = static_cast<int>(sx) - 1;
    const double theta = s.k1 * s.p * s.hx / s.L1;
    pow_.assign(2 * sx - 1, std::vector<cplx>(s.m));
    for (int d = -span; d <= span; ++d) {
      for (std::size_t j = 0; j < s.m; ++j) {
        pow_[static_cast<std::size_t>(d + span)][j] = std::polar(1.0, -theta * d * static_cast<double>(j));
      }
    }
    for (std::size_t j = 0; j < s.m; ++j) {
      cprime_.push_back(s.c[j] * std::polar(1.0, -s.k1 * s.tx.front() * s.pos[j].x / s.L1));
    }
    // Offsets of photons 2..N relative to photon 1, with the range of the
    // reference sample index that keeps every photon inside the bucket.
    std::vector<int> delta(static_cast<std::size_t>(s.n), 0);
    const auto visit = [&](auto&& self, std::size_t r) -> void {
      if (r == delta.size()) {
        const auto [lo, hi] = std::minmax_element(delta.begin(), delta.end());
        const int len = static_cast<int>(sx) - (*hi - *lo);
        if (len <= 0) return;
        Offset off;
        off.delta = delta;
        off.table = geometric_table(std::max(0, -*lo), len, theta);
        offsets_.push_back(std::move(off));
        return;
      }
      for (int d = -span; d <= span; ++d) {
        delta[r] = d;
        self(self, r + 1);
      }
    };
    visit(visit, 1);
    kernel_.assign(grid.size(), std::vector<cplx>(nj_));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vec2 rho2 = grid.point(i % grid.nx, i / grid.nx);
      for (std::size_t J = 0; J < nj_; ++J) {
        const Vec2 rp = s.centroid(J * s.jy);
        kernel_[i][J] = s.q_factor(rp) * s.psf(rp, rho2);
      }
    }
    scale_ = std::pow(s.hx * s.wy, s.n);
  }

  std::vector<std::vector<double>> run(const std::vector<std::vector<cplx>>& screens) const override {
    std::vector<std::vector<double>> out;
    std::vector<std::vector<cplx>> amp(static_cast<std::size_t>(s_.n), std::vector<cplx>(s_.m));
    std::vector<cplx> gram(nj_ * nj_);
    std::vector<cplx> t;
    std::vector<cplx> next;
    const int span = static_cast<int>(s_.tx.size()) - 1;
    for (const auto& part : parts_) {
      for (std::size_t r = 0; r < amp.size(); ++r) {
        const auto& screen = screens[static_cast<std::size_t>(part.block[r])];
        for (std::size_t j = 0; j < s_.m; ++j) amp[r][j] = cprime_[j] * screen[j];
      }
      std::fill(gram.begin(), gram.end(), cplx{});
      for (const auto& off : offsets_) {
        t = amp[0];
        for (std::size_t r = 1; r < amp.size(); ++r) {
          const auto& pw = pow_[static_cast<std::size_t>(off.delta[r] + span)];
          next.assign(t.size() + s_.m - 1, cplx{});
          for (std::size_t a = 0; a < t.size(); ++a) {
            if (t[a] == cplx{}) continue;
            for (std::size_t j = 0; j < s_.m; ++j) next[a + j] += t[a] * amp[r][j] * pw[j];
          }
          t.swap(next);
        }
        for (std::size_t J = 0; J < nj_; ++J) {
          if (t[J] == cplx{}) continue;
          const cplx* e = off.table.data() + (nj_ - 1) + J;
          cplx* row = gram.data() + J * nj_;
          for (std::size_t K = J; K < nj_; ++K) row[K] += *(e - K) * t[J] * std::conj(t[K]);
        }
      }
      std::vector<double> field(kernel_.size());
      for (std::size_t i = 0; i < kernel_.size(); ++i) {
        const auto& k = kernel_[i];
        double diag = 0.0;
        cplx off{};
        for (std::size_t J = 0; J < nj_; ++J) {
          const cplx* row = gram.data() + J * nj_;
          diag += std::norm(k[J]) * row[J].real();
          cplx acc{};
          for (std::size_t K = J + 1; K < nj_; ++K) acc += row[K] * std::conj(k[K]);
          off += k[J] * acc;
        }
        field[i] = scale_ * (diag + 2.0 * off.real());
      }
      out.push_back(std::move(field));
    }
    return out;
  }

 private:
  struct Offset {
    std::vector<int> delta;
    std::vector<cplx> table;  // sum_s omega^(s q) for q = -(nj-1) .. nj-1
  };

  std::vector<cplx> geometric_table(int start, int len, double theta) const {
    std::vector<cplx> table(2 * nj_ - 1);
    for (std::size_t i = 0; i < table.size(); ++i) {
      const double q = static_cast<double>(i) - static_cast<double>(nj_ - 1);
      cplx sum{};
      for (int s = start; s < start + len; ++s) sum += std::polar(1.0, -theta * s * q);
      table[i] = sum;
    }
    return table;
  }

  const Setup& s_;
  std::vector<SetPartition> parts_;
  std::size_t nj_;
  std::vector<std::vector<cplx>> pow_;
  std::vector<cplx> cprime_;
  std::vector<Offset> offsets_;
  std::vector<std::vector<cplx>> kernel_;
  double scale_ = 1.0;
};

// Direct sum over every tuple of bucket samples and every pixel tuple.
class BruteEstimator final : public Estimator {
 public:
  BruteEstimator(const Setup& s, const GridSpec& grid) : s_(s), parts_(set_partitions(s.n)) {
    for (const double y : s.ty) {
      for (const double x : s.tx) samples_.push_back({x, y});
    }
    const double per_tuple = std::pow(static_cast<double>(s.m), s.n) +
                             static_cast<double>(s.keys() * grid.size());
    const double cost =
        std::pow(static_cast<double>(samples_.size()), s.n) * per_tuple * parts_.size();
    if (cost > kBruteBudget) {
      throw UnsupportedError("direct Monte-Carlo sum needs " + std::to_string(cost) +
                             " operations per realization; reduce samples or pixels");
    }
    phase_.assign(samples_.size(), std::vector<cplx>(s.m));
    for (std::size_t a = 0; a < samples_.size(); ++a) {
      for (std::size_t j = 0; j < s.m; ++j) {
        phase_[a][j] = std::polar(1.0, -s.k1 * dot(samples_[a], s.pos[j]) / s.L1);
      }
    }
    kernel_.assign(grid.size(), std::vector<cplx>(s.keys()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vec2 rho2 = grid.point(i % grid.nx, i / grid.nx);
      for (std::size_t key = 0; key < s.keys(); ++key) {
        const Vec2 rp = s.centroid(key);
        kernel_[i][key] = s.q_factor(rp) * s.psf(rp, rho2);
      }
    }
    for (std::size_t j = 0; j < s.m; ++j) {
      std::vector<std::size_t> t{j};
      key_of_.push_back(centroid_key(s, t));
    }
    weight_ = std::pow(s.hx * s.hy, s.n);
  }

  std::vector<std::vector<double>> run(const std::vector<std::vector<cplx>>& screens) const override {
    const std::size_t n = static_cast<std::size_t>(s_.n);
    std::vector<std::vector<double>> out;
    std::vector<cplx> bins(s_.keys());
    for (const auto& part : parts_) {
      std::vector<double> field(kernel_.size(), 0.0);
      std::vector<std::size_t> st(n, 0);
      do {
        std::fill(bins.begin(), bins.end(), cplx{});
        std::vector<std::size_t> jt(n, 0);
        do {
          cplx prod{1.0, 0.0};
          std::size_t key = 0;
          for (std::size_t r = 0; r < n; ++r) {
            const std::size_t j = jt[r];
            prod *= s_.c[j] * screens[static_cast<std::size_t>(part.block[r])][j] * phase_[st[r]][j];
            key += key_of_[j];
          }
          bins[key] += prod;
        } while (next_tuple(jt, s_.m));
        for (std::size_t i = 0; i < kernel_.size(); ++i) {
          cplx b{};
          for (std::size_t key = 0; key < bins.size(); ++key) b += bins[key] * kernel_[i][key];
          field[i] += weight_ * std::norm(b);
        }
      } while (next_tuple(st, samples_.size()));
      out.push_back(std::move(field));
    }
    return out;
  }

 private:
  const Setup& s_;
  std::vector<SetPartition> parts_;
  std::vector<Vec2> samples_;
  std::vector<std::vector<cplx>> phase_;
  std::vector<std::vector<cplx>> kernel_;
  std::vector<std::size_t> key_of_;
  double weight_ = 1.0;
};

double background_bound(const Setup& s) {
  double sum = 0.0;
  for (const auto& v : s.c) sum += std::norm(v);
  return std::pow(s.s_b * sum, s.n);
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

void finish_report(SpeckleReport& rep) {
  rep.peak_index = argmax(rep.total);
  rep.background = rep.background_field[rep.peak_index];
  rep.background_se_at_peak = rep.background_se.empty() ? 0.0 : rep.background_se[rep.peak_index];
  rep.visibility = visibility(rep);
}

std::vector<ClassTerm> closed_form_terms(const Setup& s, const GridSpec& grid,
                                         double lambda1) {
  std::vector<ClassTerm> terms;
  if (!s.slit) return terms;
  const double w = lambda1 * s.L1 / (s.p * s.wx);
  const std::size_t m = s.m;
  const auto field = [&](auto&& weight_at) {
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = weight_at(grid.point(i % grid.nx, i / grid.nx));
    return out;
  };
  const auto sq = [&](Vec2 rp, Vec2 rho2) {
    const double v = s.psf(rp, rho2);
    return v * v;
  };
  std::vector<double> a2(m);
  for (std::size_t j = 0; j < m; ++j) a2[j] = std::norm(s.c[j]);
  if (s.n == 2) {
    terms.push_back({"identity", field([&](Vec2 rho2) {
                       double sum = 0.0;
                       for (std::size_t a = 0; a < m; ++a)
                         for (std::size_t b = 0; b < m; ++b)
                           sum += a2[a] * a2[b] * sq(0.5 * (s.pos[a] + s.pos[b]), rho2);
                       return s.s_b * s.s_b * sum;
                     })});
    terms.push_back({"single_cycle", field([&](Vec2 rho2) {
                       double sum = 0.0;
                       for (std::size_t a = 0; a < m; ++a) sum += a2[a] * a2[a] * sq(s.pos[a], rho2);
                       return s.s_b * s.s_b * w * sum;
                     })});
  } else if (s.n == 3) {
    const double sb3 = s.s_b * s.s_b * s.s_b;
    terms.push_back({"identity", field([&](Vec2 rho2) {
                       double sum = 0.0;
                       for (std::size_t a = 0; a < m; ++a)
                         for (std::size_t b = 0; b < m; ++b)
                           for (std::size_t c = 0; c < m; ++c)
                             sum += a2[a] * a2[b] * a2[c] *
                                    sq((s.pos[a] + s.pos[b] + s.pos[c]) / 3.0, rho2);
                       return sb3 * sum;
                     })});
    terms.push_back({"transpositions", field([&](Vec2 rho2) {
                       double sum = 0.0;
                       for (std::size_t a = 0; a < m; ++a)
                         for (std::size_t b = 0; b < m; ++b)
                           sum += a2[a] * a2[a] * a2[b] * sq((2.0 * s.pos[a] + s.pos[b]) / 3.0, rho2);
                       return 3.0 * sb3 * w * sum;
                     })});
    terms.push_back({"three_cycles", field([&](Vec2 rho2) {
                       double sum = 0.0;
                       for (std::size_t a = 0; a < m; ++a) sum += a2[a] * a2[a] * a2[a] * sq(s.pos[a], rho2);
                       return 2.0 * sb3 * w * w * sum;
                     })});
  }
  return terms;
}

}  // namespace

PhaseScreen sample_phase_screen(const SampledObject& obj, std::uint64_t seed,
                                std::uint64_t realization, std::uint32_t stream) {
  validate(obj);
  const Philox4x32 gen(seed);
  PhaseScreen screen;
  screen.nx = obj.nx;
  screen.ny = obj.ny;
  screen.phases.resize(obj.size());
  for (std::size_t j = 0; j < obj.size(); ++j) {
    const auto w = gen({static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(realization),
                        static_cast<std::uint32_t>(realization >> 32), stream});
    const double phi = kTwoPi * uniform01(w[0], w[1]);
    screen.phases[j] = phi < kTwoPi ? phi : 0.0;
  }
  return screen;
}

void validate(const EnsembleConfig& ens) {
  if (ens.realizations < 2) throw DomainError("at least two realizations are required");
  if (ens.detector_samples < 4) throw DomainError("detector_samples must be >= 4 per axis");
  validate(DetectionScheme{ens.bucket});
}

SpeckleReport mc_bucket_intensity(const ImagingGeometry& geom, const SourceSpec& src,
                                  const SampledObject& obj, const EnsembleConfig& ens,
                                  const GridSpec& rho2_grid, unsigned jobs, McPath path) {
  if (rho2_grid.size() == 0) throw DomainError("empty rho2 grid");
  const Setup s = make_setup(geom, src, obj, ens);
  if (path == McPath::Auto) path = s.slit ? McPath::Fast : McPath::BruteForce;
  if (path == McPath::Fast && !s.slit) {
    throw UnsupportedError("the factorised Monte-Carlo path needs a Slit1D object");
  }
  std::unique_ptr<Estimator> est;
  if (path == McPath::Fast) {
    est = std::make_unique<FastSlitEstimator>(s, rho2_grid);
  } else {
    est = std::make_unique<BruteEstimator>(s, rho2_grid);
  }

  const auto parts = set_partitions(s.n);
  const ExactWeights exact = exact_weights(s);
  const auto correction = weighted_field(s, exact.correction, rho2_grid);

  const std::size_t R = ens.realizations;
  const std::size_t P = rho2_grid.size();
  std::vector<std::vector<double>> tot(R);
  std::vector<std::vector<double>> img(R);
  parallel_for(R, jobs, [&](std::size_t r) {
    const auto fields = est->run(screens_for(s, ens.rng_seed, r));
    std::vector<double> image = correction;
    for (std::size_t b = 0; b < parts.size(); ++b) {
      const double mu = mobius_to_top(parts[b]);
      for (std::size_t i = 0; i < P; ++i) image[i] += mu * fields[b][i];
    }
    tot[r] = fields.front();
    img[r] = std::move(image);
  });

  SpeckleReport rep;
  rep.grid = rho2_grid;
  rep.n_degenerate = s.n;
  rep.realizations = R;
  rep.fresnel_ratio = geom.L1 * src.lambda1 / (kTwoPi * s.s_b);
  rep.background_bound = background_bound(s);
  const auto mean_se = [&](auto&& value, std::vector<double>& mean, std::vector<double>& se) {
    mean.assign(P, 0.0);
    se.assign(P, 0.0);
    for (std::size_t i = 0; i < P; ++i) {
      double sum = 0.0;
      for (std::size_t r = 0; r < R; ++r) sum += value(r, i);
      const double mu = sum / static_cast<double>(R);
      double ss = 0.0;
      for (std::size_t r = 0; r < R; ++r) ss += (value(r, i) - mu) * (value(r, i) - mu);
      mean[i] = mu;
      se[i] = std::sqrt(ss / static_cast<double>(R - 1) / static_cast<double>(R));
    }
  };
  mean_se([&](std::size_t r, std::size_t i) { return tot[r][i]; }, rep.total, rep.total_se);
  mean_se([&](std::size_t r, std::size_t i) { return img[r][i]; }, rep.image_term, rep.standard_errors);
  mean_se([&](std::size_t r, std::size_t i) { return tot[r][i] - img[r][i]; }, rep.background_field,
          rep.background_se);
  finish_report(rep);

  // Delta-method error of (T - C)/(T + C) at the peak from per-realization pairs.
  const std::size_t k = rep.peak_index;
  const double T = rep.total[k];
  const double C = std::max(rep.background, 0.0);
  if (T + C > 0.0) {
    const double dT = 2.0 * C / ((T + C) * (T + C));
    const double dC = -2.0 * T / ((T + C) * (T + C));
    double ss = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      const double g = dT * (tot[r][k] - T) + dC * ((tot[r][k] - img[r][k]) - rep.background);
      ss += g * g;
    }
    rep.visibility_se = std::sqrt(ss / static_cast<double>(R - 1) / static_cast<double>(R));
  }
  const double rel = rep.standard_errors[k] / std::max(std::fabs(rep.image_term[k]), 1e-300);
  if (rel > kPrecisionLimit) {
    rep.precision_warning = true;
    rep.warning = "image term at the peak has relative standard error " + std::to_string(rel) +
                  "; increase realizations";
  }
  return rep;
}

SpeckleReport analytic_speckle(const ImagingGeometry& geom, const SourceSpec& src,
                               const SampledObject& obj, const EnsembleConfig& ens,
                               const GridSpec& rho2_grid, int n) {
  if (n != 2 && n != 3) throw UnsupportedError("closed forms exist for N = 2 and N = 3 only");
  if (rho2_grid.size() == 0) throw DomainError("empty rho2 grid");
  SourceSpec s_n = src;
  s_n.n_degenerate = n;
  const Setup s = make_setup(geom, s_n, obj, ens);
  const ExactWeights exact = exact_weights(s);

  SpeckleReport rep;
  rep.grid = rho2_grid;
  rep.n_degenerate = n;
  rep.total = weighted_field(s, exact.total, rho2_grid);
  rep.image_term = weighted_field(s, exact.image, rho2_grid);
  rep.background_field.resize(rep.total.size());
  for (std::size_t i = 0; i < rep.total.size(); ++i) {
    rep.background_field[i] = rep.total[i] - rep.image_term[i];
  }
  rep.total_se.assign(rep.total.size(), 0.0);
  rep.standard_errors.assign(rep.total.size(), 0.0);
  rep.background_se.assign(rep.total.size(), 0.0);
  rep.fresnel_ratio = geom.L1 * src.lambda1 / (kTwoPi * s.s_b);
  rep.background_bound = background_bound(s);
  rep.class_terms = closed_form_terms(s, rho2_grid, src.lambda1);
  finish_report(rep);
  return rep;
}

double visibility(const SpeckleReport& report) {
  if (report.total.empty() || report.background_field.size() != report.total.size()) {
    throw DomainError("visibility needs total and background fields of equal size");
  }
  const auto [lo, hi] = std::minmax_element(report.total.begin(), report.total.end());
  const double imax = *hi;
  if (!(imax > 0.0) || (imax - *lo) <= 1e-12 * std::fabs(imax)) {
    throw DomainError("visibility is undefined for a flat intensity field");
  }
  const std::size_t k = static_cast<std::size_t>(hi - report.total.begin());
  const double c = std::max(report.background_field[k], 0.0);
  return std::clamp((imax - c) / (imax + c), 0.0, 1.0);
}

}  // namespace qgi
