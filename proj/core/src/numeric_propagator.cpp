#include "qgi/numeric_propagator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "qgi/error.hpp"
#include "qgi/lens_grid.hpp"
#include "qgi/parallel.hpp"

namespace qgi {

namespace {

constexpr double kConvergenceTolerance = 1e-3;
// Dark points are judged against a tenth of the node-sum scale, not their own value.
constexpr double kConvergenceFloor = 0.1;

struct AlphaContext {
  AlphaMode mode = AlphaMode::AnalyticFresnel;
  double beta = 0.0;  // N^2 eff / (2 K2)
  int n = 1;
  double k2 = 0.0;
  double eff = 0.0;
  double cutoff = 0.0;
  int samples = 0;
  cplx root_norm{};  // sqrt(pi / (i beta))
};

AlphaContext make_alpha(const QuadratureSpec& quad, const SourceSpec& src, double eff) {
  AlphaContext a;
  a.mode = quad.alpha_mode;
  a.n = src.n_degenerate;
  a.k2 = src.k2();
  a.eff = eff;
  a.beta = a.n * a.n * eff / (2.0 * a.k2);
  a.cutoff = quad.alpha_cutoff;
  a.samples = quad.alpha_samples;
  a.root_norm = std::sqrt(kPi / a.beta) * std::polar(1.0, -kPi / 4.0);
  return a;
}

double taper(double t) {
  const auto psi = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  const double u = std::clamp(t, 0.0, 1.0);
  return 1.0 - psi(u) / (psi(u) + psi(1.0 - u));
}

double window(double alpha, double cutoff) {
  const double a = std::fabs(alpha);
  if (a <= cutoff) return 1.0;
  if (a >= 2.0 * cutoff) return 0.0;
  return taper((a - cutoff) / cutoff);
}

cplx alpha_1d_numeric(double beta, double v, double cutoff, int samples) {
  const double stationary = std::fabs(v) / (2.0 * beta);
  if (stationary > 0.75 * cutoff) {
    throw SamplingError("alpha window (cutoff " + std::to_string(cutoff) +
                        " 1/m) misses the stationary point at " + std::to_string(stationary));
  }
  const double h = 4.0 * cutoff / (samples - 1);
  const double advance = (4.0 * beta * cutoff + std::fabs(v)) * h;
  if (advance > kPi / 4.0) {
    throw SamplingError("alpha grid under-resolved: phase advance " + std::to_string(advance) +
                        " rad per sample");
  }
  cplx sum{};
  for (int j = 0; j < samples; ++j) {
    const double a = -2.0 * cutoff + j * h;
    const double w = window(a, cutoff);
    if (w == 0.0) continue;
    sum += w * std::polar(1.0, -(beta * a * a + a * v));
  }
  return sum * h;
}

// Lens-plane integral of exp(i[quad |rl|^2 + lin.rl]) times the alpha integral
// for v = N (rl - centre), divided by pi/(i beta).
cplx lens_sum(const std::vector<LensNode>& nodes, double quad, Vec2 lin, Vec2 centre,
              const AlphaContext& a) {
  cplx sum{};
  if (a.mode == AlphaMode::AnalyticFresnel) {
    const double c = a.k2 / (2.0 * a.eff);
    for (const auto& node : nodes) {
      const Vec2 d = node.pos - centre;
      const double phase = quad * norm2(node.pos) + dot(lin, node.pos) + c * norm2(d);
      sum += node.weight * std::polar(1.0, phase);
    }
    return sum;
  }
  std::map<double, cplx> cache;
  const auto factor = [&](double v) {
    auto it = cache.find(v);
    if (it != cache.end()) return it->second;
    const cplx val = alpha_1d_numeric(a.beta, v, a.cutoff, a.samples) / a.root_norm;
    cache.emplace(v, val);
    return val;
  };
  for (const auto& node : nodes) {
    const Vec2 d = node.pos - centre;
    const double phase = quad * norm2(node.pos) + dot(lin, node.pos);
    sum += node.weight * std::polar(1.0, phase) * factor(a.n * d.x) * factor(a.n * d.y);
  }
  return sum;
}

class LensSet {
 public:
  LensSet(double R, const QuadratureSpec& quad)
      : coarse_(lens_nodes(R, quad.lens_samples, quad.rim_subdivision)) {
    if (quad.check_convergence) {
      fine_ = lens_nodes(R, 2 * quad.lens_samples, quad.rim_subdivision);
    }
  }

  template <class Eval>
  cplx converge(Eval&& eval, double scale, bool check) const {
    const cplx coarse = eval(coarse_);
    if (!check) return coarse;
    const cplx fine = eval(fine_);
    const double diff = std::abs(fine - coarse);
    const double ref = std::max(std::abs(fine), kConvergenceFloor * scale);
    if (diff > kConvergenceTolerance * ref) {
      throw ConvergenceError("lens quadrature did not converge: change " + std::to_string(diff) +
                             " against reference " + std::to_string(ref) +
                             " on doubling the lens samples");
    }
    return fine;
  }

 private:
  std::vector<LensNode> coarse_;
  std::vector<LensNode> fine_;
};

std::vector<ObjectNode> quadrature_nodes(const ObjectModel& obj, const QuadratureSpec& quad) {
  const auto* sampled = std::get_if<SampledObject>(&obj);
  if (!sampled || quad.object_samples <= 1) return object_nodes(obj);
  validate(*sampled);
  const int sub = quad.object_samples;
  const double p = sampled->pixel_pitch;
  const double hs = p / sub;
  std::vector<ObjectNode> nodes;
  nodes.reserve(sampled->size() * sub * sub);
  for (std::size_t iy = 0; iy < sampled->ny; ++iy) {
    for (std::size_t ix = 0; ix < sampled->nx; ++ix) {
      const Vec2 c = sampled->pixel_center(ix, iy);
      const cplx amp = sampled->values[iy * sampled->nx + ix];
      for (int sy = 0; sy < sub; ++sy) {
        for (int sx = 0; sx < sub; ++sx) {
          const Vec2 pos{c.x - 0.5 * p + (sx + 0.5) * hs, c.y - 0.5 * p + (sy + 0.5) * hs};
          nodes.push_back({pos, amp, hs * hs});
        }
      }
    }
  }
  return nodes;
}

double disk_area(const ImagingGeometry& geom) { return kPi * geom.R * geom.R; }

struct SamepointCfgI {
  const ImagingGeometry& geom;
  const SourceSpec& src;
  const std::vector<ObjectNode>& nodes;
  AlphaContext alpha;
  double scale = 0.0;

  cplx operator()(const std::vector<LensNode>& lens, Vec2 rho1, Vec2 rho2) const {
    const int n = src.n_degenerate;
    const double k1 = src.k1();
    const double quad = alpha.k2 / 2.0 * (1.0 / geom.L2 - 1.0 / geom.f);
    const Vec2 lin = -(alpha.k2 / geom.L2) * rho2;
    cplx sum{};
    for (const auto& node : nodes) {
      if (node.amp == cplx{}) continue;
      const double phase =
          n * k1 * norm2(node.pos) / (2.0 * geom.L1) - n * k1 * dot(rho1, node.pos) / geom.L1;
      sum += ipow(node.amp, n) * node.weight * std::polar(1.0, phase) *
             lens_sum(lens, quad, lin, node.pos, alpha);
    }
    return sum / disk_area(geom);
  }
};

struct SamepointCfgII {
  const ImagingGeometry& geom;
  const SourceSpec& src;
  const std::vector<ObjectNode>& nodes;
  AlphaContext alpha;
  double scale = 0.0;

  cplx operator()(const std::vector<LensNode>& lens, Vec2 rho1, Vec2 rho2) const {
    const double k2 = alpha.k2;
    const double dp = *geom.d2_prime;
    const double quad = k2 / 2.0 * (1.0 / dp - 1.0 / geom.f);
    cplx sum{};
    for (const auto& node : nodes) {
      if (node.amp == cplx{}) continue;
      const double phase = k2 * norm2(node.pos) / 2.0 * (1.0 / geom.L2 + 1.0 / dp) -
                           k2 * dot(rho2, node.pos) / geom.L2;
      const Vec2 lin = -(k2 / dp) * node.pos;
      sum += node.amp * node.weight * std::polar(1.0, phase) * lens_sum(lens, quad, lin, rho1, alpha);
    }
    const cplx centre_phase = std::polar(1.0, k2 * norm2(rho1) / (2.0 * alpha.eff));
    return sum / (disk_area(geom) * centre_phase);
  }
};

double node_scale(const std::vector<ObjectNode>& nodes, int power) {
  double s = 0.0;
  for (const auto& node : nodes) s += std::pow(std::abs(node.amp), power) * node.weight;
  return s;
}

void require_finite(Vec2 v, const char* name) {
  if (!isfinite(v)) throw DomainError(std::string(name) + " must be finite");
}

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

void validate(const QuadratureSpec& quad) {
  if (quad.lens_samples < 16) throw DomainError("lens_samples must be >= 16");
  if (quad.object_samples < 1) throw DomainError("object_samples must be >= 1");
  if (quad.rim_subdivision < 1) throw DomainError("rim_subdivision must be >= 1");
  if (quad.alpha_mode == AlphaMode::NumericGrid) {
    if (!(quad.alpha_cutoff > 0.0)) throw DomainError("alpha cutoff must be positive");
    if (quad.alpha_samples < 16) throw DomainError("alpha_samples must be >= 16");
  }
}

cplx chi1(Vec2 alpha, const ImagingGeometry& geom, const SourceSpec& src,
          const SampledObject& obj, Vec2 rho1) {
  validate(geom, Configuration::ObjectInDegenerateArm);
  validate(src);
  validate(obj);
  require_finite(alpha, "alpha");
  require_finite(rho1, "rho1");
  const double k1 = src.k1();
  const double p = obj.pixel_pitch;
  cplx sum{};
  for (const auto& node : object_nodes(obj)) {
    const Vec2 grad = (k1 / geom.L1) * (node.pos - rho1) + alpha;
    const double advance = std::max(std::fabs(grad.x), std::fabs(grad.y)) * p;
    if (advance > kPi) {
      throw SamplingError("chi1 aliasing: phase advance " + std::to_string(advance) +
                          " rad per object pixel");
    }
    const double phase =
        k1 * norm2(node.pos) / (2.0 * geom.L1) - k1 * dot(rho1, node.pos) / geom.L1 +
        dot(alpha, node.pos);
    sum += node.amp * node.weight * std::polar(1.0, phase);
  }
  return std::polar(1.0, -geom.d1 * norm2(alpha) / (2.0 * k1)) * sum;
}

cplx chi2(Vec2 alpha, const ImagingGeometry& geom, const SourceSpec& src, Vec2 rho2,
          int lens_samples) {
  validate(geom, Configuration::ObjectInDegenerateArm);
  validate(src);
  require_finite(alpha, "alpha");
  require_finite(rho2, "rho2");
  const double k2 = src.k2();
  const double curv = k2 * (1.0 / geom.L2 - 1.0 / geom.f);
  const Vec2 lin = alpha - (k2 / geom.L2) * rho2;
  const double h = 2.0 * geom.R / lens_samples;
  const double advance = (std::fabs(curv) * geom.R + norm(lin)) * h;
  if (advance > kPi) {
    throw SamplingError("chi2 aliasing: phase advance " + std::to_string(advance) +
                        " rad per lens cell");
  }
  cplx sum{};
  for (const auto& node : lens_nodes(geom.R, lens_samples)) {
    sum += node.weight * std::polar(1.0, curv / 2.0 * norm2(node.pos) + dot(lin, node.pos));
  }
  return std::polar(1.0, -geom.d2 * norm2(alpha) / (2.0 * k2)) * sum;
}

cplx disk_integral(double q, double R) {
  if (!std::isfinite(q)) throw DomainError("disk_integral: q must be finite");
  if (!(R > 0.0)) throw DomainError("disk_integral: R must be positive");
  const double qr = std::fabs(q) * R;
  const int nr = 40 + static_cast<int>(std::ceil(qr));
  const int nt = 64 + 2 * static_cast<int>(std::ceil(qr));
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(nr, x, w);
  cplx sum{};
  for (int i = 0; i < nr; ++i) {
    const double r = 0.5 * R * (x[i] + 1.0);
    cplx ring{};
    for (int j = 0; j < nt; ++j) {
      const double theta = kTwoPi * j / nt;
      ring += std::polar(1.0, -q * r * std::cos(theta));
    }
    sum += 0.5 * R * w[i] * r * ring * (kTwoPi / nt);
  }
  return sum;
}

cplx fresnel_alpha_integral(double beta, Vec2 v) {
  if (!(beta > 0.0)) throw DomainError("fresnel_alpha_integral: beta must be positive");
  return (kPi / beta) * std::polar(1.0, -kPi / 2.0) * std::polar(1.0, norm2(v) / (4.0 * beta));
}

cplx fresnel_alpha_integral_numeric(double beta, Vec2 v, double cutoff, int samples) {
  if (!(beta > 0.0)) throw DomainError("fresnel_alpha_integral: beta must be positive");
  if (!(cutoff > 0.0) || samples < 16) throw DomainError("invalid alpha grid");
  return alpha_1d_numeric(beta, v.x, cutoff, samples) * alpha_1d_numeric(beta, v.y, cutoff, samples);
}

cplx amplitude_samepoint_numeric(const ImagingGeometry& geom, const SourceSpec& src,
                                 const ObjectModel& obj, const PointDetector& det, Vec2 rho2,
                                 const QuadratureSpec& quad) {
  GridSpec grid;
  grid.origin = rho2;
  grid.nx = grid.ny = 1;
  grid.pitch = 1.0;
  return numeric_field_grid(geom, src, obj, Configuration::ObjectInDegenerateArm, grid,
                            det.position, quad)
      .values.front();
}

cplx amplitude_ancilla_numeric(const ImagingGeometry& geom, const SourceSpec& src,
                               const ObjectModel& obj, Vec2 rho1, Vec2 rho2,
                               const QuadratureSpec& quad) {
  GridSpec grid;
  grid.origin = rho1;
  grid.nx = grid.ny = 1;
  grid.pitch = 1.0;
  return numeric_field_grid(geom, src, obj, Configuration::ObjectInAncillaArm, grid, rho2, quad)
      .values.front();
}

ComplexField numeric_field_grid(const ImagingGeometry& geom, const SourceSpec& src,
                                const ObjectModel& obj, Configuration cfg, const GridSpec& grid,
                                Vec2 fixed_point, const QuadratureSpec& quad, unsigned jobs) {
  validate(geom, cfg);
  validate(src);
  validate(quad);
  require_finite(fixed_point, "detector position");
  if (grid.size() == 0) throw DomainError("empty grid");

  const auto nodes = quadrature_nodes(obj, quad);
  const double eff = effective_object_distance(geom, src, cfg);
  const AlphaContext alpha = make_alpha(quad, src, eff);
  const LensSet lens(geom.R, quad);

  ComplexField out;
  out.grid = grid;
  out.values.resize(grid.size());
  if (cfg == Configuration::ObjectInDegenerateArm) {
    out.plane = Plane::D2;
    const SamepointCfgI eval{geom, src, nodes, alpha, node_scale(nodes, src.n_degenerate)};
    parallel_for(grid.size(), jobs, [&](std::size_t i) {
      const Vec2 rho2 = grid.point(i % grid.nx, i / grid.nx);
      out.values[i] = lens.converge(
          [&](const std::vector<LensNode>& l) { return eval(l, fixed_point, rho2); }, eval.scale,
          quad.check_convergence);
    });
  } else {
    out.plane = Plane::D1;
    const SamepointCfgII eval{geom, src, nodes, alpha, node_scale(nodes, 1)};
    parallel_for(grid.size(), jobs, [&](std::size_t i) {
      const Vec2 rho1 = grid.point(i % grid.nx, i / grid.nx);
      out.values[i] = lens.converge(
          [&](const std::vector<LensNode>& l) { return eval(l, rho1, fixed_point); }, eval.scale,
          quad.check_convergence);
    });
  }
  return out;
}

cplx amplitude_full_N2(const ImagingGeometry& geom, const SourceSpec& src,
                       const SampledObject& obj, const std::array<Vec2, 2>& rho1_pair, Vec2 rho2,
                       const QuadratureSpec& quad) {
  validate(geom, Configuration::ObjectInDegenerateArm);
  validate(src);
  validate(quad);
  validate(obj);
  if (obj.dimensionality != Dimensionality::Slit1D) {
    throw UnsupportedError("the un-collapsed double object integral is limited to Slit1D objects");
  }
  if (src.n_degenerate != 2) throw DomainError("amplitude_full_N2 requires n_degenerate = 2");
  require_finite(rho1_pair[0], "rho1");
  require_finite(rho1_pair[1], "rho1'");
  require_finite(rho2, "rho2");

  const auto nodes = quadrature_nodes(ObjectModel{obj}, quad);
  const double eff = effective_object_distance(geom, src, Configuration::ObjectInDegenerateArm);
  const AlphaContext alpha = make_alpha(quad, src, eff);
  const LensSet lens(geom.R, quad);
  const double k1 = src.k1();
  const double quad_coef = alpha.k2 / 2.0 * (1.0 / geom.L2 - 1.0 / geom.f);
  const Vec2 lin = -(alpha.k2 / geom.L2) * rho2;
  // The discrete stand-in for delta(rho_o - rho_o') is 1/w.
  const double delta_norm = nodes.front().weight;

  std::vector<cplx> arm_a(nodes.size());
  std::vector<cplx> arm_b(nodes.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& nd = nodes[i];
    const double common = k1 * norm2(nd.pos) / (2.0 * geom.L1);
    arm_a[i] = nd.amp * nd.weight * std::polar(1.0, common - k1 * dot(rho1_pair[0], nd.pos) / geom.L1);
    arm_b[i] = nd.amp * nd.weight * std::polar(1.0, common - k1 * dot(rho1_pair[1], nd.pos) / geom.L1);
    scale += std::abs(nd.amp) * nd.weight;
  }
  scale = scale * scale / delta_norm;

  const auto eval = [&](const std::vector<LensNode>& l) {
    cplx sum{};
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (arm_a[i] == cplx{} && arm_b[i] == cplx{}) continue;
      for (std::size_t j = i; j < nodes.size(); ++j) {
        const cplx pair = i == j ? arm_a[i] * arm_b[i] : arm_a[i] * arm_b[j] + arm_a[j] * arm_b[i];
        if (pair == cplx{}) continue;
        const Vec2 centre = 0.5 * (nodes[i].pos + nodes[j].pos);
        sum += pair * lens_sum(l, quad_coef, lin, centre, alpha);
      }
    }
    return sum / (delta_norm * disk_area(geom));
  };
  return lens.converge(eval, scale, quad.check_convergence);
}

}  // namespace qgi
