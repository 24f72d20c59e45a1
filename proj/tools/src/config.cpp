#include "config.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qgi/error.hpp"

namespace qgi::cli {

namespace {

struct Ctx {
  std::string origin;
  std::string base_dir;

  std::string at(const YAML::Node& n) const {
    const auto m = n.Mark();
    if (m.line < 0) return origin;
    return origin + ":" + std::to_string(m.line + 1);
  }
  [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
    throw ConfigError(at(n) + ": " + msg);
  }
};

void check_keys(const Ctx& c, const YAML::Node& map, const std::string& section,
                const std::set<std::string>& allowed) {
  if (!map.IsMap()) c.fail(map, section + " must be a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) c.fail(kv.first, "unknown key '" + key + "' in " + section);
  }
}

std::string scalar(const Ctx& c, const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) c.fail(n, field + " must be a scalar");
  return n.Scalar();
}

double parse_number(const Ctx& c, const YAML::Node& n, const std::string& field) {
  const auto s = scalar(c, n, field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    c.fail(n, field + ": expected a plain number, got '" + s + "'");
  }
  return v;
}

std::int64_t parse_int(const Ctx& c, const YAML::Node& n, const std::string& field) {
  const auto s = scalar(c, n, field);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    c.fail(n, field + ": expected an integer, got '" + s + "'");
  }
  return v;
}

bool parse_bool(const Ctx& c, const YAML::Node& n, const std::string& field) {
  const auto s = scalar(c, n, field);
  if (s == "true") return true;
  if (s == "false") return false;
  c.fail(n, field + ": expected true or false, got '" + s + "'");
}

double length(const Ctx& c, const YAML::Node& n, const std::string& field) {
  try {
    return parse_length(scalar(c, n, field), field);
  } catch (const ConfigError& e) {
    throw ConfigError(c.at(n) + ": " + e.what());
  }
}

Vec2 length_pair(const Ctx& c, const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence() || n.size() != 2) c.fail(n, field + " must be a pair [x, y] of lengths");
  return {length(c, n[0], field + ".x"), length(c, n[1], field + ".y")};
}

cplx complex_value(const Ctx& c, const YAML::Node& n, const std::string& field) {
  if (n.IsSequence()) {
    if (n.size() != 2) c.fail(n, field + " must be a number or [re, im]");
    return {parse_number(c, n[0], field + ".re"), parse_number(c, n[1], field + ".im")};
  }
  return {parse_number(c, n, field), 0.0};
}

// Re-runs a library validator and attaches the position of `n` on failure.
template <class F>
void checked(const Ctx& c, const YAML::Node& n, F&& f) {
  try {
    f();
  } catch (const qgi::Error& e) {
    c.fail(n, e.what());
  }
}

Configuration parse_configuration(const Ctx& c, const YAML::Node& n) {
  const auto s = scalar(c, n, "configuration");
  if (s == "degenerate_arm" || s == "I") return Configuration::ObjectInDegenerateArm;
  if (s == "ancilla_arm" || s == "II") return Configuration::ObjectInAncillaArm;
  c.fail(n, "configuration must be degenerate_arm or ancilla_arm, got '" + s + "'");
}

struct Geometry {
  ImagingGeometry geom;
  bool auto_f = false, auto_L2 = false, auto_d2p = false;
};

Geometry parse_geometry(const Ctx& c, const YAML::Node& n, Configuration cfg) {
  check_keys(c, n, "geometry", {"d1", "d2", "L1", "L2", "f", "R", "d2_prime"});
  Geometry g;
  auto get = [&](const char* key, double& out, bool* auto_flag) {
    const auto v = n[key];
    if (!v) return;
    if (auto_flag && v.IsScalar() && v.Scalar() == "auto") {
      *auto_flag = true;
      return;
    }
    out = length(c, v, std::string("geometry.") + key);
  };
  get("d1", g.geom.d1, nullptr);
  get("d2", g.geom.d2, nullptr);
  get("L1", g.geom.L1, nullptr);
  get("L2", g.geom.L2, cfg == Configuration::ObjectInDegenerateArm ? &g.auto_L2 : nullptr);
  get("f", g.geom.f, &g.auto_f);
  get("R", g.geom.R, nullptr);
  if (n["d2_prime"]) {
    if (cfg == Configuration::ObjectInDegenerateArm) {
      c.fail(n["d2_prime"], "geometry.d2_prime is only valid with configuration ancilla_arm");
    }
    double v = 0.0;
    get("d2_prime", v, &g.auto_d2p);
    if (!g.auto_d2p) g.geom.d2_prime = v;
  }
  if (g.auto_f + g.auto_L2 + g.auto_d2p > 1) {
    c.fail(n, "at most one of f, L2, d2_prime may be auto");
  }
  return g;
}

void solve_lens(const Ctx& c, const YAML::Node& n, Geometry& g, const SourceSpec& src,
                Configuration cfg) {
  checked(c, n, [&] {
    if (g.auto_d2p) g.geom.d2_prime = 1.0;  // placeholder so validation passes
    if (g.auto_L2) g.geom.L2 = 1.0;
    if (g.auto_f) g.geom.f = 1.0;
    validate(g.geom, cfg);
    const double eff = effective_object_distance(g.geom, src, cfg);
    ThinLensKnowns k;
    k.object_side = eff;
    if (g.auto_f) {
      k.image_side = cfg == Configuration::ObjectInDegenerateArm ? g.geom.L2 : *g.geom.d2_prime;
      g.geom.f = thin_lens_solve(k);
    } else if (g.auto_L2 || g.auto_d2p) {
      g.geom = focus(g.geom, src, cfg);
    }
    require_thin_lens(g.geom, src, cfg);
  });
}

SourceSpec parse_source(const Ctx& c, const YAML::Node& n) {
  check_keys(c, n, "source", {"n_degenerate", "lambda1", "lambda2"});
  SourceSpec s;
  if (!n["n_degenerate"] || !n["lambda1"] || !n["lambda2"]) {
    c.fail(n, "source needs n_degenerate, lambda1 and lambda2");
  }
  s.n_degenerate = static_cast<int>(parse_int(c, n["n_degenerate"], "source.n_degenerate"));
  s.lambda1 = length(c, n["lambda1"], "source.lambda1");
  s.lambda2 = length(c, n["lambda2"], "source.lambda2");
  checked(c, n, [&] { validate(s); });
  return s;
}

std::vector<double> read_grid_file(const Ctx& c, const YAML::Node& n, std::size_t& nx,
                                   std::size_t& ny) {
  std::filesystem::path p = scalar(c, n, "object.file");
  if (p.is_relative()) p = std::filesystem::path(c.base_dir) / p;
  std::ifstream in(p);
  if (!in) c.fail(n, "cannot open object file " + p.string());
  std::vector<double> values;
  std::string line;
  nx = 0;
  ny = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::size_t count = 0;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      if (b == std::string::npos) c.fail(n, p.string() + ": empty cell in row " + std::to_string(ny + 1));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data() + b, cell.data() + e + 1, v);
      if (ec != std::errc{} || ptr != cell.data() + e + 1 || !std::isfinite(v)) {
        c.fail(n, p.string() + ": bad value '" + cell + "' in row " + std::to_string(ny + 1));
      }
      values.push_back(v);
      ++count;
    }
    if (nx == 0) nx = count;
    if (count != nx) c.fail(n, p.string() + ": ragged row " + std::to_string(ny + 1));
    ++ny;
  }
  if (values.empty()) c.fail(n, p.string() + ": no pixel values");
  return values;
}

ObjectModel parse_object(const Ctx& c, const YAML::Node& n) {
  if (!n.IsMap() || !n["type"]) c.fail(n, "object needs a type (two_point, slit or grid)");
  const auto type = scalar(c, n["type"], "object.type");
  if (type == "two_point") {
    check_keys(c, n, "object", {"type", "separation", "amp_origin", "amp_a"});
    TwoPointObject o;
    if (!n["separation"]) c.fail(n, "two_point object needs a separation");
    o.separation = length_pair(c, n["separation"], "object.separation");
    if (n["amp_origin"]) o.amp_origin = complex_value(c, n["amp_origin"], "object.amp_origin");
    if (n["amp_a"]) o.amp_a = complex_value(c, n["amp_a"], "object.amp_a");
    checked(c, n, [&] { validate(o); });
    return o;
  }
  if (type == "slit") {
    check_keys(c, n, "object", {"type", "pitch", "pixels", "amplitudes"});
    if (!n["pitch"]) c.fail(n, "slit object needs a pitch");
    const double pitch = length(c, n["pitch"], "object.pitch");
    std::vector<cplx> values;
    if (n["amplitudes"] && n["pixels"]) c.fail(n, "give either pixels or amplitudes, not both");
    if (n["amplitudes"]) {
      const auto a = n["amplitudes"];
      if (!a.IsSequence()) c.fail(a, "object.amplitudes must be a list");
      for (std::size_t i = 0; i < a.size(); ++i) {
        values.push_back(complex_value(c, a[i], "object.amplitudes[" + std::to_string(i) + "]"));
      }
    } else if (n["pixels"]) {
      const auto count = parse_int(c, n["pixels"], "object.pixels");
      if (count < 1) c.fail(n["pixels"], "object.pixels must be >= 1");
      values.assign(static_cast<std::size_t>(count), cplx{1.0, 0.0});
    } else {
      c.fail(n, "slit object needs pixels or amplitudes");
    }
    SampledObject o;
    checked(c, n, [&] { o = SampledObject::slit(std::move(values), pitch); });
    return o;
  }
  if (type == "grid") {
    check_keys(c, n, "object", {"type", "pitch", "file", "nx", "ny", "values"});
    if (!n["pitch"]) c.fail(n, "grid object needs a pitch");
    const double pitch = length(c, n["pitch"], "object.pitch");
    std::size_t nx = 0, ny = 0;
    std::vector<cplx> values;
    if (n["file"]) {
      for (double v : read_grid_file(c, n["file"], nx, ny)) values.emplace_back(v, 0.0);
    } else if (n["values"] && n["nx"] && n["ny"]) {
      nx = static_cast<std::size_t>(parse_int(c, n["nx"], "object.nx"));
      ny = static_cast<std::size_t>(parse_int(c, n["ny"], "object.ny"));
      const auto a = n["values"];
      if (!a.IsSequence()) c.fail(a, "object.values must be a list");
      for (std::size_t i = 0; i < a.size(); ++i) {
        values.push_back(complex_value(c, a[i], "object.values[" + std::to_string(i) + "]"));
      }
    } else {
      c.fail(n, "grid object needs a file, or nx, ny and values");
    }
    SampledObject o;
    checked(c, n, [&] { o = SampledObject::grid(nx, ny, std::move(values), pitch); });
    return o;
  }
  c.fail(n["type"], "object.type must be two_point, slit or grid, got '" + type + "'");
}

void parse_detection(const Ctx& c, const YAML::Node& n, Scenario& scn) {
  if (!n.IsMap() || !n["type"]) c.fail(n, "detection needs a type (bucket or point)");
  const auto type = scalar(c, n["type"], "detection.type");
  if (n["ancilla_rho2"]) scn.ancilla_rho2 = length_pair(c, n["ancilla_rho2"], "detection.ancilla_rho2");
  if (type == "bucket") {
    check_keys(c, n, "detection", {"type", "width", "height", "center", "ancilla_rho2"});
    if (!n["width"] || !n["height"]) c.fail(n, "bucket detection needs width and height");
    BucketDetector b;
    b.extent.width = length(c, n["width"], "detection.width");
    b.extent.height = length(c, n["height"], "detection.height");
    if (n["center"]) b.extent.center = length_pair(c, n["center"], "detection.center");
    b.area = b.extent.area();
    scn.det = b;
  } else if (type == "point") {
    check_keys(c, n, "detection", {"type", "position", "ancilla_rho2"});
    PointDetector p;
    if (n["position"]) p.position = length_pair(c, n["position"], "detection.position");
    scn.det = p;
  } else {
    c.fail(n["type"], "detection.type must be bucket or point, got '" + type + "'");
  }
  checked(c, n, [&] { validate(scn.det); });
}

LineGrid parse_line_grid(const Ctx& c, const YAML::Node& n, const std::string& section) {
  check_keys(c, n, section, {"center", "half_width", "samples"});
  LineGrid g;
  if (n["center"]) g.center = length_pair(c, n["center"], section + ".center");
  if (n["half_width"]) {
    const auto hw = n["half_width"];
    if (!(hw.IsScalar() && hw.Scalar() == "auto")) {
      g.half_width = length(c, hw, section + ".half_width");
      if (!(g.half_width > 0.0)) c.fail(hw, section + ".half_width must be positive");
    }
  }
  if (n["samples"]) {
    const auto s = parse_int(c, n["samples"], section + ".samples");
    if (s < 2) c.fail(n["samples"], section + ".samples must be >= 2");
    g.samples = static_cast<std::size_t>(s);
  }
  return g;
}

QuadratureSpec parse_quadrature(const Ctx& c, const YAML::Node& n) {
  check_keys(c, n, "quadrature",
             {"lens_samples", "object_samples", "alpha_mode", "alpha_cutoff", "alpha_samples",
              "rim_subdivision", "check_convergence"});
  QuadratureSpec q;
  auto geti = [&](const char* key, int& out) {
    if (n[key]) out = static_cast<int>(parse_int(c, n[key], std::string("quadrature.") + key));
  };
  geti("lens_samples", q.lens_samples);
  geti("object_samples", q.object_samples);
  geti("alpha_samples", q.alpha_samples);
  geti("rim_subdivision", q.rim_subdivision);
  if (n["check_convergence"]) {
    q.check_convergence = parse_bool(c, n["check_convergence"], "quadrature.check_convergence");
  }
  if (n["alpha_mode"]) {
    const auto s = scalar(c, n["alpha_mode"], "quadrature.alpha_mode");
    if (s == "analytic") {
      q.alpha_mode = AlphaMode::AnalyticFresnel;
    } else if (s == "numeric") {
      q.alpha_mode = AlphaMode::NumericGrid;
    } else {
      c.fail(n["alpha_mode"], "quadrature.alpha_mode must be analytic or numeric");
    }
  }
  if (n["alpha_cutoff"]) {
    const auto s = scalar(c, n["alpha_cutoff"], "quadrature.alpha_cutoff");
    const auto sp = s.find(' ');
    if (sp == std::string::npos || s.substr(sp + 1) != "1/m") {
      c.fail(n["alpha_cutoff"], "quadrature.alpha_cutoff needs the unit suffix '1/m'");
    }
    YAML::Node num(s.substr(0, sp));
    q.alpha_cutoff = parse_number(c, num, "quadrature.alpha_cutoff");
  }
  checked(c, n, [&] { validate(q); });
  return q;
}

SweepParameter parse_sweep_parameter(const Ctx& c, const YAML::Node& n) {
  const auto s = scalar(c, n, "sweep.parameter");
  for (auto p : {SweepParameter::SeparationA, SweepParameter::NDegenerate,
                 SweepParameter::D1OverD2, SweepParameter::L1OverD2}) {
    if (s == to_string(p)) return p;
  }
  c.fail(n, "sweep.parameter must be separation_a, n_degenerate, d1_over_d2 or L1_over_d2");
}

SweepBlock parse_sweep(const Ctx& c, const YAML::Node& n, const Scenario& base) {
  check_keys(c, n, "sweep", {"parameter", "values", "measure", "tolerance"});
  if (!n["parameter"] || !n["values"]) c.fail(n, "sweep needs parameter and values");
  SweepBlock s;
  s.parameter = parse_sweep_parameter(c, n["parameter"]);
  const auto v = n["values"];
  if (!v.IsSequence()) c.fail(v, "sweep.values must be a list");
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string field = "sweep.values[" + std::to_string(i) + "]";
    s.values.push_back(s.parameter == SweepParameter::SeparationA ? length(c, v[i], field)
                                                                  : parse_number(c, v[i], field));
  }
  if (n["measure"]) s.measure = parse_bool(c, n["measure"], "sweep.measure");
  if (n["tolerance"]) {
    s.tolerance = parse_number(c, n["tolerance"], "sweep.tolerance");
    if (!(s.tolerance > 0.0 && s.tolerance < 1.0)) c.fail(n["tolerance"], "sweep.tolerance must be in (0, 1)");
  }
  checked(c, n, [&] { validate(SweepSpec{s.parameter, s.values, base}); });
  return s;
}

EnsembleBlock parse_ensemble(const Ctx& c, const YAML::Node& n) {
  check_keys(c, n, "ensemble", {"realizations", "detector_samples", "path", "analytic", "grid"});
  EnsembleBlock e;
  if (n["realizations"]) {
    const auto r = parse_int(c, n["realizations"], "ensemble.realizations");
    if (r < 2) c.fail(n["realizations"], "ensemble.realizations must be >= 2 (variance undefined)");
    e.realizations = static_cast<std::size_t>(r);
  }
  if (n["detector_samples"]) {
    e.detector_samples =
        static_cast<int>(parse_int(c, n["detector_samples"], "ensemble.detector_samples"));
  }
  if (n["path"]) {
    const auto s = scalar(c, n["path"], "ensemble.path");
    if (s == "auto") {
      e.path = McPath::Auto;
    } else if (s == "fast") {
      e.path = McPath::Fast;
    } else if (s == "brute_force") {
      e.path = McPath::BruteForce;
    } else {
      c.fail(n["path"], "ensemble.path must be auto, fast or brute_force");
    }
  }
  if (n["analytic"]) e.analytic = parse_bool(c, n["analytic"], "ensemble.analytic");
  if (n["grid"]) e.grid = parse_line_grid(c, n["grid"], "ensemble.grid");
  checked(c, n, [&] {
    EnsembleConfig ens;
    ens.realizations = e.realizations;
    ens.detector_samples = e.detector_samples;
    ens.bucket = BucketDetector{1.0, Rect{{}, 1.0, 1.0}};
    validate(ens);
  });
  return e;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string len(double v) { return fmt(v) + " m"; }

std::string pair(Vec2 v) { return "[" + len(v.x) + ", " + len(v.y) + "]"; }

std::string cval(cplx z) { return "[" + fmt(z.real()) + ", " + fmt(z.imag()) + "]"; }

void emit_line_grid(std::ostringstream& o, const LineGrid& g, const char* indent) {
  o << indent << "center: " << pair(g.center) << "\n";
  o << indent << "half_width: " << (g.half_width > 0.0 ? len(g.half_width) : "auto") << "\n";
  o << indent << "samples: " << g.samples << "\n";
}

}  // namespace

const char* to_string(Engine e) {
  switch (e) {
    case Engine::Analytic: return "analytic";
    case Engine::Numeric: return "numeric";
    case Engine::Both: return "both";
  }
  return "?";
}

Engine parse_engine(const std::string& s) {
  if (s == "analytic") return Engine::Analytic;
  if (s == "numeric") return Engine::Numeric;
  if (s == "both") return Engine::Both;
  throw ConfigError("engine must be analytic, numeric or both, got '" + s + "'");
}

double parse_length(const std::string& text, const std::string& field) {
  const auto sp = text.find_first_of(" \t");
  if (sp == std::string::npos) {
    throw ConfigError(field + ": '" + text + "' has no unit suffix (use m, cm, mm, um or nm)");
  }
  const std::string num = text.substr(0, sp);
  const auto ub = text.find_first_not_of(" \t", sp);
  const std::string unit = ub == std::string::npos ? "" : text.substr(ub);
  double scale = 0.0;
  if (unit == "m") {
    scale = 1.0;
  } else if (unit == "cm") {
    scale = 1e-2;
  } else if (unit == "mm") {
    scale = 1e-3;
  } else if (unit == "um") {
    scale = 1e-6;
  } else if (unit == "nm") {
    scale = 1e-9;
  } else {
    throw ConfigError(field + ": unknown length unit '" + unit + "' (use m, cm, mm, um or nm)");
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
  if (ec != std::errc{} || ptr != num.data() + num.size() || !std::isfinite(v)) {
    throw ConfigError(field + ": '" + num + "' is not a number");
  }
  return v * scale;
}

ScenarioConfig parse_config(const std::string& text, const std::string& origin,
                            const std::string& base_dir) {
  const Ctx c{origin, base_dir};
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(origin + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError(origin + ": top level must be a mapping");
  check_keys(c, root, "config",
             {"configuration", "geometry", "source", "object", "detection", "engine", "image",
              "quadrature", "sweep", "ensemble", "seed", "output"});
  for (const char* key : {"configuration", "geometry", "source", "object", "detection"}) {
    if (!root[key]) c.fail(root, std::string("missing required section '") + key + "'");
  }

  ScenarioConfig cfg;
  Scenario& scn = cfg.scenario;
  scn.cfg = parse_configuration(c, root["configuration"]);
  scn.src = parse_source(c, root["source"]);
  Geometry g = parse_geometry(c, root["geometry"], scn.cfg);
  solve_lens(c, root["geometry"], g, scn.src, scn.cfg);
  scn.geom = g.geom;
  cfg.object = parse_object(c, root["object"]);
  parse_detection(c, root["detection"], scn);
  checked(c, root["detection"], [&] { validate(scn); });

  if (root["engine"]) {
    try {
      cfg.engine = parse_engine(scalar(c, root["engine"], "engine"));
    } catch (const ConfigError& e) {
      c.fail(root["engine"], e.what());
    }
  }
  if (root["image"]) cfg.image = parse_line_grid(c, root["image"], "image");
  if (root["quadrature"]) cfg.quadrature = parse_quadrature(c, root["quadrature"]);
  if (root["sweep"]) cfg.sweep = parse_sweep(c, root["sweep"], scn);
  if (root["ensemble"]) cfg.ensemble = parse_ensemble(c, root["ensemble"]);
  if (root["seed"]) {
    const auto s = scalar(c, root["seed"], "seed");
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) c.fail(root["seed"], "seed must be an unsigned 64-bit integer");
    cfg.seed = v;
  }
  if (root["output"]) cfg.output_dir = scalar(c, root["output"], "output");
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path().string();
  return parse_config(ss.str(), path, dir.empty() ? "." : dir);
}

std::string canonical_yaml(const ScenarioConfig& cfg) {
  const Scenario& s = cfg.scenario;
  std::ostringstream o;
  o << "configuration: "
    << (s.cfg == Configuration::ObjectInDegenerateArm ? "degenerate_arm" : "ancilla_arm") << "\n";
  o << "geometry:\n";
  o << "  d1: " << len(s.geom.d1) << "\n";
  o << "  d2: " << len(s.geom.d2) << "\n";
  o << "  L1: " << len(s.geom.L1) << "\n";
  o << "  L2: " << len(s.geom.L2) << "\n";
  o << "  f: " << len(s.geom.f) << "\n";
  o << "  R: " << len(s.geom.R) << "\n";
  if (s.geom.d2_prime) o << "  d2_prime: " << len(*s.geom.d2_prime) << "\n";
  o << "source:\n";
  o << "  n_degenerate: " << s.src.n_degenerate << "\n";
  o << "  lambda1: " << len(s.src.lambda1) << "\n";
  o << "  lambda2: " << len(s.src.lambda2) << "\n";
  o << "object:\n";
  if (const auto* tp = std::get_if<TwoPointObject>(&cfg.object)) {
    o << "  type: two_point\n";
    o << "  separation: " << pair(tp->separation) << "\n";
    o << "  amp_origin: " << cval(tp->amp_origin) << "\n";
    o << "  amp_a: " << cval(tp->amp_a) << "\n";
  } else {
    const auto& so = std::get<SampledObject>(cfg.object);
    const bool slit = so.dimensionality == Dimensionality::Slit1D;
    o << "  type: " << (slit ? "slit" : "grid") << "\n";
    o << "  pitch: " << len(so.pixel_pitch) << "\n";
    if (!slit) o << "  nx: " << so.nx << "\n  ny: " << so.ny << "\n";
    o << "  " << (slit ? "amplitudes" : "values") << ":\n";
    for (const auto& v : so.values) o << "    - " << cval(v) << "\n";
  }
  o << "detection:\n";
  if (const auto* b = std::get_if<BucketDetector>(&s.det)) {
    o << "  type: bucket\n";
    o << "  width: " << len(b->extent.width) << "\n";
    o << "  height: " << len(b->extent.height) << "\n";
    o << "  center: " << pair(b->extent.center) << "\n";
  } else {
    o << "  type: point\n";
    o << "  position: " << pair(std::get<PointDetector>(s.det).position) << "\n";
  }
  o << "  ancilla_rho2: " << pair(s.ancilla_rho2) << "\n";
  o << "engine: " << to_string(cfg.engine) << "\n";
  o << "image:\n";
  emit_line_grid(o, cfg.image, "  ");
  const auto& q = cfg.quadrature;
  o << "quadrature:\n";
  o << "  lens_samples: " << q.lens_samples << "\n";
  o << "  object_samples: " << q.object_samples << "\n";
  o << "  alpha_mode: " << (q.alpha_mode == AlphaMode::AnalyticFresnel ? "analytic" : "numeric") << "\n";
  o << "  alpha_cutoff: " << fmt(q.alpha_cutoff) << " 1/m\n";
  o << "  alpha_samples: " << q.alpha_samples << "\n";
  o << "  rim_subdivision: " << q.rim_subdivision << "\n";
  o << "  check_convergence: " << (q.check_convergence ? "true" : "false") << "\n";
  if (cfg.sweep) {
    const auto& sw = *cfg.sweep;
    const bool lengths = sw.parameter == SweepParameter::SeparationA;
    o << "sweep:\n";
    o << "  parameter: " << to_string(sw.parameter) << "\n";
    o << "  values:\n";
    for (double v : sw.values) o << "    - " << (lengths ? len(v) : fmt(v)) << "\n";
    o << "  measure: " << (sw.measure ? "true" : "false") << "\n";
    o << "  tolerance: " << fmt(sw.tolerance) << "\n";
  }
  if (cfg.ensemble) {
    const auto& e = *cfg.ensemble;
    o << "ensemble:\n";
    o << "  realizations: " << e.realizations << "\n";
    o << "  detector_samples: " << e.detector_samples << "\n";
    o << "  path: "
      << (e.path == McPath::Auto ? "auto" : e.path == McPath::Fast ? "fast" : "brute_force") << "\n";
    o << "  analytic: " << (e.analytic ? "true" : "false") << "\n";
    o << "  grid:\n";
    emit_line_grid(o, e.grid, "    ");
  }
  o << "seed: " << cfg.seed << "\n";
  return o.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len_out = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len_out, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len_out);
  for (unsigned int i = 0; i < len_out; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

std::string config_hash(const ScenarioConfig& cfg) { return sha256_hex(canonical_yaml(cfg)); }

}  // namespace qgi::cli
