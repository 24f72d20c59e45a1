#include "commands.hpp"

#include <yaml-cpp/exceptions.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "output.hpp"
#include "qgi/error.hpp"
#include "qgi/permutations.hpp"

namespace qgi::cli {

namespace {

std::string output_dir(const ScenarioConfig& cfg, const RunOptions& opt) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  throw ConfigError("no output directory: pass --out or set 'output' in the config");
}

const char* axis_name(const Scenario& scn) {
  return scn.cfg == Configuration::ObjectInDegenerateArm ? "rho2_x" : "rho1_x";
}

Vec2 fixed_point(const Scenario& scn) {
  if (scn.cfg == Configuration::ObjectInAncillaArm) return scn.ancilla_rho2;
  if (const auto* p = std::get_if<PointDetector>(&scn.det)) return p->position;
  return std::get<BucketDetector>(scn.det).extent.center;
}

void require_point_for_ancilla(const Scenario& scn) {
  if (scn.cfg == Configuration::ObjectInAncillaArm && !std::holds_alternative<PointDetector>(scn.det)) {
    throw ConfigError("detection: the ancilla_arm configuration needs a point detector");
  }
}

GridSpec make_line(const Scenario& scn, const LineGrid& g, double auto_half_width,
                   const std::string& section) {
  const double hw = g.half_width > 0.0 ? g.half_width : auto_half_width;
  const GridSpec grid = GridSpec::line(g.center, hw, g.samples);
  const double xi = airy_radius(scn.geom, scn.src, scn.cfg);
  if (xi / grid.pitch < kMinSamplesPerAiryRadius) {
    std::ostringstream msg;
    msg << section << ": " << g.samples << " samples over +/-" << hw << " m give "
        << xi / grid.pitch << " samples per Airy radius (need >= 8)";
    throw ConfigError(msg.str());
  }
  return grid;
}

TwoPointObject point_at(Vec2 pos, cplx amp) {
  TwoPointObject o;
  o.amp_origin = {0.0, 0.0};
  o.amp_a = amp;
  o.separation = pos;
  return o;
}

std::vector<double> intensities(const std::vector<cplx>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::norm(v[i]);
  return out;
}

// Numeric counterpart of the analytic image. Bucket images are incoherent
// sums of single-scatterer images, which the quadrature supplies for
// two-point objects.
std::vector<double> numeric_image(const ScenarioConfig& cfg, const ObjectModel& obj,
                                  const GridSpec& grid, unsigned jobs) {
  const Scenario& s = cfg.scenario;
  const bool bucket = s.cfg == Configuration::ObjectInDegenerateArm &&
                      std::holds_alternative<BucketDetector>(s.det);
  if (!bucket) {
    return intensities(numeric_field_grid(s.geom, s.src, obj, s.cfg, grid, fixed_point(s),
                                          cfg.quadrature, jobs)
                           .values);
  }
  const auto* tp = std::get_if<TwoPointObject>(&obj);
  if (!tp) throw ConfigError("engine: numeric bucket images need a two_point object");
  std::vector<double> sum(grid.size(), 0.0);
  for (const auto& [pos, amp] : {std::pair{Vec2{}, tp->amp_origin}, std::pair{tp->separation, tp->amp_a}}) {
    if (amp == cplx{}) continue;
    const auto f = numeric_field_grid(s.geom, s.src, ObjectModel{point_at(pos, amp)}, s.cfg, grid,
                                      fixed_point(s), cfg.quadrature, jobs);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += std::norm(f.values[i]);
  }
  return sum;
}

struct EngineColumns {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  double max_rel_deviation = 0.0;
  bool compared = false;
};

EngineColumns image_columns(const ScenarioConfig& cfg, const ObjectModel& obj, const GridSpec& grid,
                            unsigned jobs) {
  const Scenario& s = cfg.scenario;
  EngineColumns out;
  out.header = {axis_name(s)};
  std::vector<double> analytic, numeric;
  std::vector<cplx> amplitude;
  if (cfg.engine != Engine::Numeric) {
    const ImageField f = image_field_grid(s.geom, s.src, obj, s.det, s.cfg, grid, s.ancilla_rho2);
    analytic = f.intensity;
    amplitude = f.amplitude;
  }
  if (cfg.engine != Engine::Analytic) numeric = numeric_image(cfg, obj, grid, jobs);

  if (cfg.engine == Engine::Both) {
    out.header.insert(out.header.end(), {"intensity", "intensity_numeric", "engine_rel_diff"});
    out.compared = true;
  } else {
    out.header.push_back("intensity");
  }
  if (!amplitude.empty()) out.header.insert(out.header.end(), {"amplitude_re", "amplitude_im"});

  const auto& ref = analytic.empty() ? numeric : analytic;
  const double peak = *std::max_element(ref.begin(), ref.end());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<double> row{grid.point(i, 0).x};
    if (cfg.engine == Engine::Both) {
      const double rel = peak > 0.0 ? std::abs(numeric[i] - analytic[i]) / peak : 0.0;
      out.max_rel_deviation = std::max(out.max_rel_deviation, rel);
      row.insert(row.end(), {analytic[i], numeric[i], rel});
    } else {
      row.push_back(ref[i]);
    }
    if (!amplitude.empty()) row.insert(row.end(), {amplitude[i].real(), amplitude[i].imag()});
    out.rows.push_back(std::move(row));
  }
  return out;
}

json scenario_summary(const ScenarioConfig& cfg) {
  const Scenario& s = cfg.scenario;
  json j;
  j["configuration"] = s.cfg == Configuration::ObjectInDegenerateArm ? "degenerate_arm" : "ancilla_arm";
  j["n_degenerate"] = s.src.n_degenerate;
  j["plane"] = s.cfg == Configuration::ObjectInDegenerateArm ? "D2" : "D1";
  j["effective_object_distance_m"] = effective_object_distance(s.geom, s.src, s.cfg);
  j["magnification"] = magnification(s.geom, s.src, s.cfg);
  j["airy_radius_m"] = airy_radius(s.geom, s.src, s.cfg);
  j["rayleigh_min_separation_m"] = rayleigh_min_separation(s.geom, s.src, s.cfg);
  j["engine"] = to_string(cfg.engine);
  if (const auto* b = std::get_if<BucketDetector>(&s.det)) {
    j["bucket_scale"] = std::pow(b->area, s.src.n_degenerate);
  }
  return j;
}

double object_half_extent(const ObjectModel& obj) {
  if (const auto* tp = std::get_if<TwoPointObject>(&obj)) return norm(tp->separation);
  const auto& so = std::get<SampledObject>(obj);
  return 0.5 * so.pixel_pitch * static_cast<double>(std::max(so.nx, so.ny));
}

void log_written(std::ostream& log, const OutputSet& out) {
  log << "wrote " << out.dir().string() << "\n";
}

}  // namespace

void cmd_psf(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
  const Scenario& s = cfg.scenario;
  require_point_for_ancilla(s);
  const double xi = airy_radius(s.geom, s.src, s.cfg);
  const GridSpec grid = make_line(s, cfg.image, 3.0 * xi, "image");
  const EngineColumns cols =
      image_columns(cfg, ObjectModel{point_at({}, {1.0, 0.0})}, grid, opt.jobs);

  std::vector<std::vector<double>> airy_rows;
  for (int n = 1; n <= std::max(5, s.src.n_degenerate); ++n) {
    Scenario sn = s;
    sn.src.n_degenerate = n;
    sn = refocus(sn);
    airy_rows.push_back({static_cast<double>(n), airy_radius(sn.geom, sn.src, sn.cfg),
                         rayleigh_min_separation(sn.geom, sn.src, sn.cfg),
                         magnification(sn.geom, sn.src, sn.cfg)});
  }

  json summary = scenario_summary(cfg);
  summary["command"] = "psf";
  summary["samples"] = grid.nx;
  summary["pitch_m"] = grid.pitch;
  if (cols.compared) summary["max_rel_deviation"] = cols.max_rel_deviation;

  OutputSet out(output_dir(cfg, opt), "psf", config_hash(cfg));
  out.write_text("config.canonical.yaml", canonical_yaml(cfg));
  out.write_csv("psf.csv", cols.header, cols.rows);
  out.write_csv("airy.csv", {"n_degenerate", "airy_radius_m", "rayleigh_min_separation_m", "magnification"},
                airy_rows);
  out.write_json("summary.json", summary);
  out.finish();
  log_written(log, out);
}

void cmd_image(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
  const Scenario& s = cfg.scenario;
  require_point_for_ancilla(s);
  const double xi = airy_radius(s.geom, s.src, s.cfg);
  const double m = magnification(s.geom, s.src, s.cfg);
  const GridSpec grid =
      make_line(s, cfg.image, 3.0 * xi + m * object_half_extent(cfg.object), "image");
  const EngineColumns cols = image_columns(cfg, cfg.object, grid, opt.jobs);

  json summary = scenario_summary(cfg);
  summary["command"] = "image";
  summary["samples"] = grid.nx;
  summary["pitch_m"] = grid.pitch;
  if (cols.compared) summary["max_rel_deviation"] = cols.max_rel_deviation;
  if (const auto* tp = std::get_if<TwoPointObject>(&cfg.object)) {
    const Vec2 p = image_point(s.geom, s.src, s.cfg, tp->separation);
    summary["second_image_point_m"] = {p.x, p.y};
  }

  OutputSet out(output_dir(cfg, opt), "image", config_hash(cfg));
  out.write_text("config.canonical.yaml", canonical_yaml(cfg));
  out.write_csv("image.csv", cols.header, cols.rows);
  out.write_json("summary.json", summary);
  out.finish();
  log_written(log, out);
}

void cmd_resolve(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
  if (!cfg.sweep) throw ConfigError("resolve needs a 'sweep' block naming the scanned parameter");
  const Scenario& s = cfg.scenario;
  require_point_for_ancilla(s);
  const SweepSpec spec{cfg.sweep->parameter, cfg.sweep->values, s};
  const auto rows = run_sweep(spec, true, opt.jobs, cfg.sweep->tolerance);

  json report = scenario_summary(cfg);
  report["command"] = "resolve";
  report["parameter"] = to_string(spec.parameter);
  report["tolerance"] = cfg.sweep->tolerance;
  report["rows"] = json::array();
  std::vector<std::vector<double>> table;
  const bool separation = spec.parameter == SweepParameter::SeparationA;
  for (const auto& r : rows) {
    json jr;
    jr["value"] = r.value;
    jr["predicted_a_m"] = r.predicted_a_m;
    if (separation) {
      jr["resolved"] = *r.resolved;
      table.push_back({r.value, r.predicted_a_m, *r.resolved ? 1.0 : 0.0});
    } else {
      const auto& rep = *r.report;
      jr["measured_a_m"] = rep.measured_a_m;
      jr["relative_error"] = rep.relative_error;
      jr["gain_vs_classical"] = *rep.gain_vs_classical;
      jr["predicted_gain"] = rep.predicted_gain;
      jr["criterion"] = rep.criterion;
      table.push_back({r.value, rep.predicted_a_m, rep.measured_a_m, rep.relative_error,
                       *rep.gain_vs_classical, rep.predicted_gain});
    }
    report["rows"].push_back(jr);
  }

  OutputSet out(output_dir(cfg, opt), "resolve", config_hash(cfg));
  out.write_text("config.canonical.yaml", canonical_yaml(cfg));
  if (separation) {
    out.write_csv("resolved.csv", {"separation_a_m", "predicted_a_m", "resolved"}, table);
  } else {
    out.write_csv("gain.csv",
                  {to_string(spec.parameter), "predicted_a_m", "measured_a_m", "relative_error",
                   "gain_vs_classical", "predicted_gain"},
                  table);
  }
  out.write_json("resolution.json", report);
  out.finish();
  log_written(log, out);
}

void cmd_sweep(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
  if (!cfg.sweep) throw ConfigError("sweep needs a 'sweep' block");
  const Scenario& s = cfg.scenario;
  require_point_for_ancilla(s);
  const SweepSpec spec{cfg.sweep->parameter, cfg.sweep->values, s};
  const bool measure = cfg.sweep->measure && spec.parameter != SweepParameter::SeparationA;
  const auto rows = run_sweep(spec, measure, opt.jobs, cfg.sweep->tolerance);

  std::vector<std::string> header{to_string(spec.parameter), "predicted_a_m", "airy_radius_m"};
  if (measure) header.insert(header.end(), {"measured_a_m", "gain_vs_classical"});
  std::vector<std::vector<double>> table;
  for (const auto& r : rows) {
    std::vector<double> row{r.value, r.predicted_a_m, r.airy_radius};
    if (measure) row.insert(row.end(), {r.report->measured_a_m, *r.report->gain_vs_classical});
    table.push_back(std::move(row));
  }

  json summary = scenario_summary(cfg);
  summary["command"] = "sweep";
  summary["parameter"] = to_string(spec.parameter);
  summary["measured"] = measure;

  OutputSet out(output_dir(cfg, opt), "sweep", config_hash(cfg));
  out.write_text("config.canonical.yaml", canonical_yaml(cfg));
  out.write_csv("sweep.csv", header, table);
  if (measure && spec.parameter == SweepParameter::NDegenerate &&
      s.cfg == Configuration::ObjectInAncillaArm) {
    std::vector<int> ns;
    for (double v : spec.values) ns.push_back(static_cast<int>(v));
    std::vector<std::vector<double>> airy;
    for (const auto& r : airy_shrink_scan(s, ns)) {
      airy.push_back({static_cast<double>(r.n_degenerate), r.measured_xi, r.predicted_xi,
                      r.measured_ratio, r.predicted_ratio});
    }
    out.write_csv("airy_shrink.csv",
                  {"n_degenerate", "measured_xi_m", "predicted_xi_m", "measured_ratio", "predicted_ratio"},
                  airy);
  }
  out.write_json("summary.json", summary);
  out.finish();
  log_written(log, out);
}

void cmd_speckle(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
  if (!cfg.ensemble) throw ConfigError("speckle needs an 'ensemble' block");
  const Scenario& s = cfg.scenario;
  if (s.cfg != Configuration::ObjectInDegenerateArm) {
    throw ConfigError("speckle: the rough object must sit in the degenerate arm");
  }
  const auto* bucket = std::get_if<BucketDetector>(&s.det);
  if (!bucket) throw ConfigError("speckle: detection must be a bucket");
  const auto* obj = std::get_if<SampledObject>(&cfg.object);
  if (!obj) throw ConfigError("speckle: object must be a slit or grid");

  const auto& e = *cfg.ensemble;
  EnsembleConfig ens;
  ens.realizations = e.realizations;
  ens.rng_seed = cfg.seed;
  ens.bucket = *bucket;
  ens.detector_samples = e.detector_samples;

  const double xi = airy_radius(s.geom, s.src, s.cfg);
  const double m = magnification(s.geom, s.src, s.cfg);
  const GridSpec grid =
      make_line(s, e.grid, 2.0 * xi + 1.2 * m * object_half_extent(*obj), "ensemble.grid");

  const SpeckleReport mc = mc_bucket_intensity(s.geom, s.src, *obj, ens, grid, opt.jobs, e.path);
  const int n = s.src.n_degenerate;
  const bool exact = e.analytic && (n == 2 || n == 3);
  SpeckleReport an;
  if (exact) an = analytic_speckle(s.geom, s.src, *obj, ens, grid, n);

  std::vector<std::string> header{"rho2_x",     "total",      "total_se",     "image_term",
                                  "image_se",   "background", "background_se"};
  if (exact) {
    header.insert(header.end(), {"exact_image", "exact_total"});
    for (const auto& t : an.class_terms) header.push_back("continuum_" + t.name);
  }
  std::vector<std::vector<double>> rows;
  std::size_t within = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<double> row{grid.point(i, 0).x,  mc.total[i],           mc.total_se[i],
                            mc.image_term[i],    mc.standard_errors[i], mc.background_field[i],
                            mc.background_se[i]};
    if (exact) {
      row.insert(row.end(), {an.image_term[i], an.total[i]});
      for (const auto& t : an.class_terms) row.push_back(t.values[i]);
      if (std::abs(mc.image_term[i] - an.image_term[i]) <= 3.0 * mc.standard_errors[i]) ++within;
    }
    rows.push_back(std::move(row));
  }

  json report;
  report["command"] = "speckle";
  report["n_degenerate"] = n;
  report["realizations"] = mc.realizations;
  report["seed"] = cfg.seed;
  report["pixels"] = obj->size();
  report["peak_index"] = mc.peak_index;
  report["peak_rho2_x"] = grid.point(mc.peak_index, 0).x;
  report["background"] = mc.background;
  report["background_se"] = mc.background_se_at_peak;
  report["visibility"] = mc.visibility;
  report["visibility_se"] = mc.visibility_se;
  report["fresnel_ratio"] = mc.fresnel_ratio;
  report["background_bound"] = mc.background_bound;
  report["precision_warning"] = mc.precision_warning;
  report["warning"] = mc.warning;
  if (exact) {
    report["exact_visibility"] = an.visibility;
    report["fraction_within_3se"] = static_cast<double>(within) / static_cast<double>(grid.size());
  }

  OutputSet out(output_dir(cfg, opt), "speckle", config_hash(cfg));
  out.write_text("config.canonical.yaml", canonical_yaml(cfg));
  out.write_csv("speckle.csv", header, rows);
  out.write_json("speckle.json", report);
  out.finish();
  if (mc.precision_warning) log << "warning: " << mc.warning << "\n";
  log_written(log, out);
}

std::vector<CheckResult> validation_suite(const ScenarioConfig* cfg, const std::string& fault) {
  std::vector<CheckResult> results;
  auto run = [&](const std::string& name, const std::string& scenario, auto&& body) {
    CheckResult r{name, scenario, false, ""};
    try {
      r.passed = body(r.detail);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = e.what();
    }
    results.push_back(std::move(r));
  };
  const double somb_scale = fault == "somb" ? 1.0 + 1e-3 : 1.0;

  run("j1_first_zero", "builtin", [](std::string& d) {
    const double err = std::abs(first_j1_zero() - 3.8317059702075123);
    d = "abs error " + format_double(err);
    return err < 1e-12;
  });

  run("disk_integral_identity", "R=1cm, 50 qR in [0,20]", [&](std::string& d) {
    const double R = 0.01;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double qr = 20.0 * i / 49.0;
      const double ref = kPi * R * R * somb(qr) * somb_scale;
      const cplx num = disk_integral(qr / R, R);
      worst = std::max(worst, std::abs(num - ref) / std::abs(ref));
    }
    d = "max relative error " + format_double(worst);
    return worst <= 1e-6;
  });

  run("engine_equivalence", "two-point, N in {1,2,3}, both placements", [](std::string& d) {
    double worst_mag = 0.0, worst_phase = 0.0;
    QuadratureSpec q;
    for (int n = 1; n <= 3; ++n) {
      const SourceSpec src{n, 1e-6, 1e-6};
      const auto cfg1 = Configuration::ObjectInDegenerateArm;
      const ImagingGeometry g1 = focus({10, 0.0, 1.0, 0, 0.1, 0.01, {}}, src, cfg1);
      const double am = rayleigh_min_separation(g1, src, cfg1);
      const TwoPointObject o1{{1, 0}, {0.7, 0.3}, {0.3 * am, 0.0}};
      const double xi = airy_radius(g1, src, cfg1);
      const Vec2 mid = image_point(g1, src, cfg1, o1.separation) * 0.5;
      const auto cfg2 = Configuration::ObjectInAncillaArm;
      const ImagingGeometry g2 = focus({0, 0.0, 10.0, 1.0, 0.1, 0.01, 1.0}, src, cfg2);
      const double am2 = rayleigh_min_separation(g2, src, cfg2);
      const TwoPointObject o2{{1, 0}, {0.5, 0.2}, {0.3 * am2, 0.1 * am2}};
      const double xi2 = airy_radius(g2, src, cfg2);
      const Vec2 mid2 = image_point(g2, src, cfg2, o2.separation) * 0.5;
      for (int k = -1; k <= 1; ++k) {
        const Vec2 r2 = mid + Vec2{k * 0.4 * xi, 0.1 * xi};
        const cplx a = amplitude_two_point_cfgI(g1, src, o1, {Vec2{1e-4, 0}}, r2);
        const cplx b = amplitude_samepoint_numeric(g1, src, ObjectModel{o1}, {Vec2{1e-4, 0}}, r2, q);
        worst_mag = std::max(worst_mag, std::abs(std::abs(b) - std::abs(a)) / std::abs(a));
        worst_phase = std::max(worst_phase, std::abs(std::arg(b / a)));
        const Vec2 r1 = mid2 + Vec2{k * 0.4 * xi2, 0.0};
        const cplx c = amplitude_two_point_cfgII(g2, src, o2, r1, {2e-4, 0});
        const cplx e = amplitude_ancilla_numeric(g2, src, ObjectModel{o2}, r1, {2e-4, 0}, q);
        worst_mag = std::max(worst_mag, std::abs(std::abs(e) - std::abs(c)) / std::abs(c));
        worst_phase = std::max(worst_phase, std::abs(std::arg(e / c)));
      }
    }
    d = "max |B| rel " + format_double(worst_mag) + ", max phase " + format_double(worst_phase) + " rad";
    return worst_mag <= 1e-3 && worst_phase <= 1e-2;
  });

  run("bucket_incoherence", "two-point, N=2", [](std::string& d) {
    const SourceSpec src{2, 1e-6, 1e-6};
    const auto c1 = Configuration::ObjectInDegenerateArm;
    const ImagingGeometry g = focus({10, 0.001, 1.0, 0, 0.1, 0.01, {}}, src, c1);
    const TwoPointObject o{{1, 0}, {0.6, -0.4}, {1e-4, 0.0}};
    double worst = 0.0;
    for (int i = 0; i < 21; ++i) {
      const Vec2 r2{-2e-5 + 2e-6 * i, 1e-6};
      const double both = intensity_bucket(g, src, object_nodes(o), 1.0, r2);
      const double a = intensity_bucket(g, src, object_nodes(point_at({}, o.amp_origin)), 1.0, r2);
      const double b = intensity_bucket(g, src, object_nodes(point_at(o.separation, o.amp_a)), 1.0, r2);
      worst = std::max(worst, std::abs(both - a - b) / std::max(both, 1e-300));
    }
    d = "max relative deviation " + format_double(worst);
    return worst <= 1e-10;
  });

  run("permutation_counts", "n <= 6", [](std::string& d) {
    std::size_t fact = 1;
    for (int n = 1; n <= 6; ++n) {
      fact *= static_cast<std::size_t>(n);
      const auto terms = permutation_sum_terms(n);
      const auto cycles = std::count_if(terms.begin(), terms.end(), [n](const PermutationTerm& t) {
        return t.cycle_type == std::vector<int>{n};
      });
      std::size_t expect_cycles = 1;
      for (int k = 2; k < n; ++k) expect_cycles *= static_cast<std::size_t>(k);
      if (terms.size() != fact || static_cast<std::size_t>(cycles) != expect_cycles) {
        d = "n=" + std::to_string(n) + ": " + std::to_string(terms.size()) + " terms";
        return false;
      }
    }
    d = "N! terms, (N-1)! full cycles";
    return true;
  });

  if (cfg) {
    const Scenario& s = cfg->scenario;
    run("thin_lens_residual", "config", [&](std::string& d) {
      const double r = thin_lens_residual(s.geom, s.src, s.cfg);
      d = "residual " + format_double(r);
      return r <= kThinLensTolerance;
    });
    run("nyquist", "config image grid", [&](std::string& d) {
      const double xi = airy_radius(s.geom, s.src, s.cfg);
      const double hw = cfg->image.half_width > 0.0 ? cfg->image.half_width : 3.0 * xi;
      const GridSpec grid = GridSpec::line(cfg->image.center, hw, cfg->image.samples);
      require_nyquist(s.geom, s.src, s.cfg, grid.pitch);
      d = format_double(xi / grid.pitch) + " samples per Airy radius";
      return true;
    });
  }
  return results;
}

int run_command(const std::string& command, const RunOptions& opt, std::ostream& log,
                std::ostream& err) {
  try {
    std::optional<ScenarioConfig> cfg;
    if (!opt.config_path.empty()) {
      cfg = load_config(opt.config_path);
      if (opt.seed) cfg->seed = *opt.seed;
      if (opt.engine) cfg->engine = *opt.engine;
    } else if (command != "validate") {
      throw ConfigError(command + " needs --config");
    }
    if (command == "validate") {
      const auto results = validation_suite(cfg ? &*cfg : nullptr, opt.inject_fault);
      bool ok = true;
      log << std::left << std::setw(24) << "check" << std::setw(44) << "scenario" << std::setw(8)
          << "result"
          << "detail\n";
      for (const auto& r : results) {
        ok = ok && r.passed;
        log << std::left << std::setw(24) << r.name << std::setw(44) << r.scenario << std::setw(8)
            << (r.passed ? "PASS" : "FAIL") << r.detail << "\n";
      }
      return ok ? kExitOk : kExitRuntime;
    }
    if (command == "psf") {
      cmd_psf(*cfg, opt, log);
    } else if (command == "image") {
      cmd_image(*cfg, opt, log);
    } else if (command == "resolve") {
      cmd_resolve(*cfg, opt, log);
    } else if (command == "sweep") {
      cmd_sweep(*cfg, opt, log);
    } else if (command == "speckle") {
      cmd_speckle(*cfg, opt, log);
    } else {
      throw ConfigError("unknown command '" + command + "'");
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const YAML::Exception& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace qgi::cli
