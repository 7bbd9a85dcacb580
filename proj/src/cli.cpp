#include "isostab/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "isostab/axisym.hpp"
#include "isostab/error.hpp"
#include "isostab/graph_geometry.hpp"
#include "isostab/harmonics.hpp"
#include "isostab/obstacle.hpp"
#include "isostab/quadrature.hpp"
#include "isostab/sharp_family.hpp"
#include "isostab/sphere_core.hpp"
#include "isostab/stability_suite.hpp"

namespace isostab::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string command;
  std::string set_text, spec_file, out;
  std::optional<int> grid_res, band_limit, jobs;
  std::optional<double> gtol, lambda;
  std::string estimate, family;
  std::optional<double> p, alpha;
  bool golden = false, update_golden = false, timing = false;
  std::string golden_dir;
  int n = 3;
  std::string K = "16";
  double r0 = 0.06, sigma = 3.9e-3;
  std::string t_decades = "1e-10:1e-8:6";
  int elements = 1024;
  std::optional<int> max_iter;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "io.read", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream o(path, std::ios::binary);
  if (!o) fail(ErrorKind::io, "io.write", "cannot write '" + path + "'");
  o << text;
  if (!o) fail(ErrorKind::io, "io.write", "write to '" + path + "' failed");
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::schema, what + ".json", e.what());
  }
}


double num(const Json& j, const std::string& key, std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    fail(ErrorKind::schema, "spec." + key, "missing field '" + key + "'");
  }
  if (!j[key].is_number()) fail(ErrorKind::schema, "spec." + key, "field '" + key + "' must be a number");
  return j[key].get<double>();
}

int integer(const Json& j, const std::string& key, std::optional<int> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    fail(ErrorKind::schema, "spec." + key, "missing field '" + key + "'");
  }
  if (!j[key].is_number_integer()) fail(ErrorKind::schema, "spec." + key, "field '" + key + "' must be an integer");
  return j[key].get<int>();
}

std::vector<double> num_array(const Json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_array()) {
    fail(ErrorKind::schema, "spec." + key, "field '" + key + "' must be an array of numbers");
  }
  std::vector<double> v;
  for (const auto& x : j[key]) {
    if (!x.is_number()) fail(ErrorKind::schema, "spec." + key, "field '" + key + "' must hold numbers only");
    v.push_back(x.get<double>());
  }
  return v;
}

std::string str(const Json& j, const std::string& key, std::optional<std::string> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    fail(ErrorKind::schema, "spec." + key, "missing field '" + key + "'");
  }
  if (!j[key].is_string()) fail(ErrorKind::schema, "spec." + key, "field '" + key + "' must be a string");
  return j[key].get<std::string>();
}

bool flag(const Json& j, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) fail(ErrorKind::schema, "spec." + key, "field '" + key + "' must be a boolean");
  return j[key].get<bool>();
}

void require_keys(const Json& j, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) fail(ErrorKind::schema, "spec.unknown_field", "unknown field '" + it.key() + "'");
  }
}


struct LoadedSet {
  Json spec;
  std::string kind;
  int n = 2;
  GridPtr grid;
  std::optional<NormalGraphSet> set;
  std::optional<AxisymProfile> profile;
  std::optional<PlanarRegion> region;
  std::optional<SharpSet> sharp;
};

Json grid_json(const GridPtr& g) {
  if (!g) return nullptr;
  Json j;
  j["n"] = g->dim();
  j["mode"] = g->mode() == GridMode::full ? "full" : "axisymmetric";
  j["resolution"] = g->resolution();
  j["band_limit"] = g->band_limit();
  j["nodes"] = g->size();
  return j;
}

GridPtr make_grid(const Json& spec, const Options& o, int n, bool prefer_axisym) {
  const std::string mode = str(spec, "mode", prefer_axisym || n >= 3 ? "axisymmetric" : "full");
  if (mode != "full" && mode != "axisymmetric") fail(ErrorKind::schema, "spec.mode", "mode must be full or axisymmetric");
  const GridMode gm = mode == "full" ? GridMode::full : GridMode::axisymmetric;
  const int fallback_res = gm == GridMode::axisymmetric ? 200 : (n == 1 ? 256 : 32);
  const int res = o.grid_res.value_or(integer(spec, "resolution", fallback_res));
  const int L = o.band_limit.value_or(integer(spec, "band_limit", 0));
  if (res < 8 || res > 4096) fail(ErrorKind::precondition, "grid.resolution", "resolution must lie in [8, 4096]");
  return SphereGrid::build(n, res, gm, L);
}

PlanarCurve planar_curve(const Json& c) {
  if (!c.is_object()) fail(ErrorKind::schema, "spec.curve", "curves are objects with 'circle' or 'x'/'y'");
  if (c.contains("circle")) {
    const auto v = num_array(c, "circle");
    if (v.size() != 3) fail(ErrorKind::schema, "spec.circle", "circle is [cx, cy, radius]");
    return PlanarCurve::circle(v[0], v[1], v[2], integer(c, "samples", 1024));
  }
  return PlanarCurve::from_samples(num_array(c, "x"), num_array(c, "y"));
}

ZonalFunction dented_jet(int n, double depth, double width, bool dilate) {
  const double s = dilate ? enforce_H_le_n(dented_sphere_profile(n, depth, width, 1025)).scale : 1.0;
  return [s, depth, width](double t) {
    const Jet b = dent_shape(t / width);
    return Jet{s * (1.0 - depth * b.f) - 1.0, -s * depth * b.df / width, -s * depth * b.d2f / (width * width)};
  };
}

LoadedSet load_set(const Json& spec, const Options& o) {
  if (!spec.is_object()) fail(ErrorKind::schema, "spec.object", "a set spec is a JSON object");
  LoadedSet L;
  L.spec = spec;
  L.kind = str(spec, "kind");
  L.n = integer(spec, "n", L.kind == "planar" ? 1 : 2);
  if (L.n < 1 || L.n > 16) fail(ErrorKind::precondition, "spec.n", "n must lie in [1, 16]");
  const auto& k = L.kind;
  if (k == "constant") {
    require_keys(spec, {"kind", "n", "t", "resolution", "band_limit", "mode"});
    const double t = num(spec, "t");
    L.grid = make_grid(spec, o, L.n, false);
    const ScalarField u = L.n == 1 ? ScalarField::band_limited(L.grid, std::vector<double>(L.grid->size(), t))
                                   : ScalarField::zonal(L.grid, [t](double) { return Jet{t, 0.0, 0.0}; });
    L.set = NormalGraphSet::build(u);
  } else if (k == "harmonic") {
    require_keys(spec, {"kind", "n", "bands", "resolution", "band_limit", "mode"});
    if (!spec.contains("bands") || !spec["bands"].is_array()) fail(ErrorKind::schema, "spec.bands", "bands must be an array");
    std::vector<BandTerm> bands;
    for (const auto& b : spec["bands"]) {
      if (!b.is_object()) fail(ErrorKind::schema, "spec.bands", "each band is an object");
      BandTerm t;
      t.degree = integer(b, "degree");
      t.coeff = num(b, "coeff");
      if (b.contains("order") && b["order"].is_string()) {
        if (b["order"].get<std::string>() != "zonal") fail(ErrorKind::schema, "spec.order", "order is an integer or \"zonal\"");
        t.zonal = true;
      } else if (b.contains("order")) {
        t.order = integer(b, "order");
        t.zonal = false;
      }
      bands.push_back(t);
    }
    L.grid = make_grid(spec, o, L.n, false);
    L.set = NormalGraphSet::build(synthesize(bands, L.grid));
  } else if (k == "samples") {
    require_keys(spec, {"kind", "n", "values", "resolution", "band_limit", "mode"});
    L.grid = make_grid(spec, o, L.n, false);
    auto values = num_array(spec, "values");
    if (values.size() != L.grid->size()) {
      fail(ErrorKind::schema, "spec.values", "expected " + std::to_string(L.grid->size()) + " values, got " +
                                                 std::to_string(values.size()));
    }
    L.set = NormalGraphSet::build(L.grid->spectral() ? ScalarField::band_limited(L.grid, std::move(values))
                                                     : ScalarField::from_values(L.grid, std::move(values)));
  } else if (k == "profile") {
    require_keys(spec, {"kind", "n", "name", "radius", "depth", "width", "samples", "enforce_H_le_n", "r", "z",
                        "resolution", "band_limit", "mode"});
    if (L.n < 2) fail(ErrorKind::capability, "spec.profile_dim", "surfaces of revolution need n >= 2");
    const int samples = integer(spec, "samples", 801);
    if (spec.contains("name")) {
      const std::string name = str(spec, "name");
      ZonalFunction jet;
      if (name == "sphere" || name == "sphere_radius") {
        const double R = name == "sphere" ? 1.0 : num(spec, "radius");
        if (!(R > 0.0)) fail(ErrorKind::precondition, "spec.radius", "radius must be positive");
        L.profile = sphere_profile(L.n, R, samples);
        jet = [R](double) { return Jet{R - 1.0, 0.0, 0.0}; };
      } else if (name == "dented_sphere") {
        const double depth = num(spec, "depth"), width = num(spec, "width");
        if (!(depth > 0.0 && depth < 0.9 && width > 0.0 && width < 3.0)) {
          fail(ErrorKind::precondition, "spec.dent", "need 0 < depth < 0.9 and 0 < width < 3");
        }
        const bool dilate = flag(spec, "enforce_H_le_n", true);
        auto prof = dented_sphere_profile(L.n, depth, width, samples);
        L.profile = dilate ? enforce_H_le_n(prof).profile : prof;
        jet = dented_jet(L.n, depth, width, dilate);
      } else {
        fail(ErrorKind::schema, "spec.name", "unknown profile '" + name + "'");
      }
      L.grid = make_grid(spec, o, L.n, true);
      L.set = NormalGraphSet::build(ScalarField::zonal(L.grid, jet));
    } else {
      L.profile = AxisymProfile::curve_samples(L.n, num_array(spec, "r"), num_array(spec, "z"));
    }
  } else if (k == "sharp_family") {
    require_keys(spec, {"kind", "n", "K", "r0", "sigma", "t", "nodes_per_panel"});
    const HProfile h = HProfile::build(
        derive_params(L.n, num(spec, "K", 16.0), num(spec, "r0", 0.06), num(spec, "t"), num(spec, "sigma", 3.9e-3)));
    const HValidation v = validate_h(h);
    if (!v.passed) fail(ErrorKind::precondition, "sharp.validation", "h fails " + v.first_failure);
    L.sharp = build_sharp_set(h, integer(spec, "nodes_per_panel", 16));
    L.set = *L.sharp->set;
    L.grid = L.sharp->u.grid_ptr();
    L.profile = L.sharp->profile;
  } else if (k == "planar") {
    require_keys(spec, {"kind", "n", "outer", "holes"});
    if (L.n != 1) fail(ErrorKind::capability, "spec.planar_dim", "planar regions have n = 1");
    if (!spec.contains("outer")) fail(ErrorKind::schema, "spec.outer", "missing field 'outer'");
    std::vector<PlanarCurve> holes;
    if (spec.contains("holes")) {
      if (!spec["holes"].is_array()) fail(ErrorKind::schema, "spec.holes", "holes must be an array");
      for (const auto& h : spec["holes"]) holes.push_back(planar_curve(h));
    }
    L.region = PlanarRegion::make(planar_curve(spec["outer"]), std::move(holes));
  } else {
    fail(ErrorKind::schema, "spec.kind", "unknown kind '" + k + "'");
  }
  return L;
}

Json load_spec_json(const Options& o) {
  if (!o.set_text.empty() && !o.spec_file.empty()) {
    fail(ErrorKind::schema, "cli.set", "give either --set or --spec-file");
  }
  if (!o.spec_file.empty()) return parse_json(read_file(o.spec_file), "spec");
  if (!o.set_text.empty()) return read_spec(o.set_text);
  fail(ErrorKind::schema, "cli.set", "this command needs --set or --spec-file");
}

const NormalGraphSet& need_set(const LoadedSet& L, const std::string& what) {
  if (!L.set) fail(ErrorKind::capability, "spec.normal_graph", what + " needs a normal-graph set, not kind '" + L.kind + "'");
  return *L.set;
}


Json vec_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

Json record_json(const InequalityRecord& r) {
  Json j;
  j["estimate_id"] = r.estimate_id;
  j["lhs"] = json_number(r.lhs);
  j["rhs_raw"] = json_number(r.rhs_raw);
  j["ratio"] = json_number(r.ratio);
  j["degenerate"] = r.degenerate;
  if (!r.family_tag.empty()) j["family_tag"] = r.family_tag;
  Json p = Json::object();
  for (const auto& [k, v] : r.params) p[k] = json_number(v);
  j["params"] = p;
  return j;
}

CsvTable record_table() { return CsvTable({"family_tag", "estimate_id", "lhs", "rhs_raw", "ratio", "degenerate", "params"}); }

void add_record_row(CsvTable& t, const InequalityRecord& r) {
  std::string params;
  for (const auto& [k, v] : r.params) {
    if (!params.empty()) params += ',';
    params += k + "=" + format_number(v);
  }
  t.add_row({r.family_tag, r.estimate_id, CsvTable::cell(r.lhs), CsvTable::cell(r.rhs_raw), CsvTable::cell(r.ratio),
             r.degenerate ? "true" : "false", params});
}

struct CommandOutput {
  Json spec;
  Json grid;
  Json results;
  std::optional<CsvTable> csv;
  /// Set when the command completed but its solver did not converge.
  std::optional<Error> deferred;
};

CommandOutput cmd_geometry(const Options& o) {
  const LoadedSet L = load_set(load_spec_json(o), o);
  CommandOutput c;
  c.spec = L.spec;
  c.grid = grid_json(L.grid);
  Json r;
  if (L.set) {
    const NormalGraphSet& s = *L.set;
    const DeficitReport d = deficits(s);
    r["perimeter"] = d.perimeter;
    r["volume"] = d.volume;
    r["delta"] = d.delta;
    r["delta_iso"] = d.delta_iso;
    r["delta_cmc"] = d.delta_cmc;
    r["H0"] = d.H0;
    r["sup_H"] = d.sup_H;
    r["fraenkel"] = d.fraenkel;
    r["fraenkel_center"] = vec_json(d.center_used);
    r["hausdorff_radial"] = d.hausdorff_radial;
    r["outer_gap"] = d.outer_gap;
    r["barycenter"] = vec_json(s.barycenter());
  } else if (L.profile) {
    const RevolutionFunctionals f = revolution_functionals(*L.profile);
    const auto H = revolution_mean_curvature(*L.profile);
    r["perimeter"] = f.perimeter;
    r["volume"] = f.volume;
    r["diameter"] = f.diameter;
    r["delta"] = f.perimeter - sphere_measure(L.n);
    r["sup_H"] = *std::max_element(H.begin(), H.end());
  } else {
    r["perimeter"] = L.region->perimeter();
    r["area"] = L.region->area();
    r["delta"] = L.region->perimeter() - sphere_measure(1);
  }
  c.results = r;
  return c;
}

CommandOutput cmd_decompose(const Options& o) {
  const LoadedSet L = load_set(load_spec_json(o), o);
  const NormalGraphSet& s = need_set(L, "decompose");
  if (!s.grid().spectral()) fail(ErrorKind::capability, "decompose.spectral", "decompose needs a grid with a spectral basis");
  const ScalarField& u = s.u();
  const HarmonicDecomposition d = decompose(u);
  CommandOutput c;
  c.spec = L.spec;
  c.grid = grid_json(L.grid);
  Json r;
  r["a"] = d.a;
  r["b"] = vec_json(d.b);
  const double R2 = norm(d.R, NormKind::L2);
  r["R_L2"] = R2;
  r["u_L2"] = norm(u, NormKind::L2);
  double recon = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double x = d.a + d.R[i];
    const auto w = s.grid().node(i);
    for (std::size_t k = 0; k < d.b.size(); ++k) x += d.b[k] * w[k];
    recon = std::max(recon, std::abs(x - u[i]));
  }
  r["reconstruction_error"] = recon;
  r["poincare_ratio"] = R2 > 0.0 ? Json(poincare_ratio(d.R)) : Json(nullptr);
  r["poincare_floor"] = 2.0 * (s.dim() + 1);
  const FugledeResult f = fuglede_bound(u.affine(1.0, -d.a));
  r["fuglede"] = {{"lhs", f.lhs}, {"rhs_raw", f.rhs_raw}, {"rhs", f.rhs}, {"constant", f.constant}, {"violated", f.violated}};
  c.results = r;
  return c;
}

Json almgren_json(const AlmgrenTerms& a) {
  Json r;
  r["lhs"] = a.lhs;
  r["t1"] = a.t1;
  r["t2"] = a.t2;
  r["t3"] = a.t3;
  r["residual"] = a.residual;
  r["perimeter"] = a.perimeter;
  r["sup_H"] = a.sup_H;
  r["H_le_n"] = a.h_le_n;
  r["contact_measure"] = a.envelope.contact_measure;
  r["off_contact_measure"] = a.envelope.off_contact_measure;
  r["vertex_mass"] = a.envelope.vertex_mass;
  r["gauss_total"] = a.envelope.gauss_total;
  r["hull_vertices"] = a.envelope.hull.size();
  return r;
}

CommandOutput cmd_almgren(const Options& o) {
  const LoadedSet L = load_set(load_spec_json(o), o);
  CommandOutput c;
  c.spec = L.spec;
  if (L.region) {
    c.results = almgren_json(almgren_identity_terms(*L.region));
  } else if (L.profile) {
    c.results = almgren_json(almgren_identity_terms(*L.profile));
  } else {
    fail(ErrorKind::capability, "almgren.kind", "almgren needs a planar region or a surface of revolution");
  }
  return c;
}

CommandOutput cmd_structure(const Options& o) {
  const LoadedSet L = load_set(load_spec_json(o), o);
  if (!L.region) fail(ErrorKind::capability, "structure.kind", "structure needs a planar region (n = 1)");
  const PlanarStructure s = planar_structure(*L.region);
  CommandOutput c;
  c.spec = L.spec;
  Json r;
  r["delta"] = s.delta;
  r["hole_perimeter"] = s.hole_perimeter;
  r["hole_area"] = s.hole_area;
  r["holes"] = L.region->holes().size();
  r["perimeter_ratio"] = s.perimeter_ratio;
  r["area_ratio"] = s.area_ratio;
  r["area_ratio_sq"] = s.area_ratio_sq;
  r["hypothesis_ok"] = s.hypothesis_ok;
  r["omega_star_perimeter"] = s.omega_star.perimeter();
  r["omega_star_area"] = s.omega_star.area();
  c.results = r;
  return c;
}

std::vector<double> parse_decades(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) fail(ErrorKind::schema, "cli.t_decades", "expected lo:hi:count");
  double lo = 0.0, hi = 0.0;
  int count = 0;
  try {
    lo = std::stod(parts[0]);
    hi = std::stod(parts[1]);
    count = std::stoi(parts[2]);
  } catch (const std::exception&) {
    fail(ErrorKind::schema, "cli.t_decades", "expected lo:hi:count with numbers");
  }
  if (!(lo > 0.0 && hi > lo && count >= 2)) fail(ErrorKind::precondition, "cli.t_decades", "need 0 < lo < hi and count >= 2");
  std::vector<double> ts;
  for (int i = 0; i < count; ++i) ts.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (count - 1)));
  ts.front() = lo;
  ts.back() = hi;
  return ts;
}

CommandOutput cmd_sharp_family(const Options& o) {
  const std::vector<double> ts = parse_decades(o.t_decades);
  double K = 0.0;
  if (o.K == "auto") {
    K = choose_K(o.n, o.r0, o.sigma, ts);
  } else {
    try {
      K = std::stod(o.K);
    } catch (const std::exception&) {
      fail(ErrorKind::schema, "cli.K", "K is a number or 'auto'");
    }
  }
  const SweepResult s = sharpness_sweep(o.n, K, o.r0, o.sigma, ts);
  CommandOutput c;
  c.spec = {{"n", o.n}, {"K", o.K}, {"r0", o.r0}, {"sigma", o.sigma}, {"t_decades", o.t_decades}};
  Json r;
  r["n"] = s.n;
  r["K"] = s.K;
  r["r0"] = s.r0;
  r["sigma"] = s.sigma;
  r["slope"] = s.slope;
  r["ratio_spread"] = s.ratio_spread;
  r["delta_over_t_spread"] = s.delta_over_t_spread;
  r["all_valid"] = s.all_valid;
  Json rows = Json::array();
  CsvTable t({"t", "delta", "u_c0", "ratio", "slope"});
  for (const auto& row : s.rows) {
    rows.push_back({{"t", row.t},
                    {"delta", row.delta},
                    {"u_c0", row.u_c0},
                    {"u_minus_c0", row.u_minus_c0},
                    {"ratio", row.ratio},
                    {"delta_over_t", row.delta_over_t},
                    {"sup_H", row.sup_H},
                    {"valid", row.valid}});
    t.add_row({CsvTable::cell(row.t), CsvTable::cell(row.delta), CsvTable::cell(row.u_c0), CsvTable::cell(row.ratio),
               CsvTable::cell(s.slope)});
  }
  r["rows"] = rows;
  Json validation = Json::array();
  for (double tv : ts) {
    const HValidation v = validate_h(HProfile::build(derive_params(o.n, K, o.r0, tv, o.sigma)));
    Json checks = Json::array();
    for (const auto& ch : v.checks) {
      checks.push_back({{"name", ch.name}, {"passed", ch.passed}, {"gating", ch.gating}, {"margin", json_number(ch.margin)}});
    }
    validation.push_back({{"t", tv}, {"passed", v.passed}, {"sup_H_scaled", v.sup_H_scaled}, {"checks", checks}});
  }
  r["validation"] = validation;
  c.results = r;
  c.csv = std::move(t);
  return c;
}

CommandOutput cmd_truncate(const Options& o) {
  const LoadedSet L = load_set(load_spec_json(o), o);
  const NormalGraphSet& s = need_set(L, "truncate");
  ObstacleOptions opts;
  opts.gtol = o.gtol.value_or(opts.gtol);
  opts.elements = o.elements;
  opts.max_iter = o.max_iter.value_or(opts.max_iter);
  const double lambda = o.lambda.value_or(static_cast<double>(s.dim()));
  const ObstacleSolveResult res = truncate_mean_curvature(s, lambda, opts);
  const TruncationReport rep = verify_truncation(res, s, opts);
  CommandOutput c;
  c.spec = L.spec;
  c.grid = grid_json(L.grid);
  Json r;
  r["lambda"] = lambda;
  r["elements"] = opts.elements;
  r["gtol"] = opts.gtol;
  r["max_iter"] = opts.max_iter;
  r["converged"] = res.converged;
  r["iterations"] = res.iterations;
  r["projected_gradient"] = res.projected_gradient;
  r["energy_initial"] = res.energy_history.front();
  r["energy_final"] = res.energy_history.back();
  Json v;
  v["delta"] = rep.delta;
  v["volume_gain"] = rep.volume_gain;
  v["free_area"] = rep.free_area;
  v["distance_lhs"] = rep.distance_lhs;
  v["sup_abs_H_E"] = rep.sup_abs_H_E;
  v["sup_H_Omega_plus"] = rep.sup_H_Omega_plus;
  v["H_bound"] = rep.H_bound;
  v["complementarity_residual"] = rep.complementarity_residual;
  v["contact_multiplier_min"] = json_number(rep.contact_multiplier_min);
  v["cmc_residual"] = rep.cmc_residual;
  v["free_nodes"] = rep.free_nodes;
  v["min_gap"] = rep.min_gap;
  v["energy_E"] = rep.energy_E;
  v["energy_Omega"] = rep.energy_Omega;
  v["diameter_E"] = rep.diameter_E;
  v["diameter_Omega"] = rep.diameter_Omega;
  v["distance_ok"] = rep.distance_ok;
  v["curvature_ok"] = rep.curvature_ok;
  v["cmc_ok"] = rep.cmc_ok;
  v["passed"] = rep.passed;
  r["verification"] = v;
  CsvTable t({"theta", "u", "v", "H_E", "contact"});
  for (std::size_t i = 0; i < res.theta.size(); ++i) {
    const bool contact = res.v_nodes[i] - res.u_nodes[i] <= res.contact_threshold;
    t.add_row({CsvTable::cell(res.theta[i]), CsvTable::cell(res.u_nodes[i]), CsvTable::cell(res.v_nodes[i]),
               CsvTable::cell(res.H_nodes[i]), contact ? "1" : "0"});
  }
  c.results = r;
  c.csv = std::move(t);
  if (!res.converged) {
    c.deferred = Error(ErrorKind::convergence, "obstacle.converged",
                       "projected gradient " + format_number(res.projected_gradient) + " above gtol");
  }
  return c;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Json sweep_json(const ConstantSweepResult& s) {
  Json j;
  j["estimate"] = s.estimate_id;
  j["family"] = s.family.tag();
  j["members"] = s.table.size();
  j["max_ratio"] = json_number(s.max_ratio);
  j["min_ratio"] = json_number(s.min_ratio);
  j["degenerate_count"] = s.degenerate_count;
  return j;
}

CommandOutput cmd_verify(const Options& o) {
  CommandOutput c;
  const double p = o.p.value_or(2.0), alpha = o.alpha.value_or(0.5);
  CsvTable t = record_table();
  if (!o.family.empty()) {
    if (o.estimate.empty()) fail(ErrorKind::schema, "cli.estimate", "verify --family needs --estimate");
    const FamilySpec fam = parse_family(o.family);
    const ConstantSweepResult s = constant_sweep(fam, o.estimate, p, alpha);
    c.spec = {{"family", fam.tag()}, {"estimate", o.estimate}, {"p", p}, {"alpha", alpha}};
    Json r = sweep_json(s);
    Json recs = Json::array();
    for (const auto& rec : s.table) {
      recs.push_back(record_json(rec));
      add_record_row(t, rec);
    }
    r["records"] = recs;
    c.results = r;
  } else {
    const LoadedSet L = load_set(load_spec_json(o), o);
    const NormalGraphSet& s = need_set(L, "verify");
    c.spec = L.spec;
    c.grid = grid_json(L.grid);
    std::vector<InequalityRecord> recs;
    const std::string e = o.estimate;
    if (e.empty() || e.rfind("sharp_", 0) == 0 || e == "sym_diff_L1" || e == "outer_gap_c0+") {
      for (auto& r : verify_sharp_u(s)) recs.push_back(r);
    }
    if (e.empty() || e == "main") recs.push_back(verify_main(s));
    if (e.empty() || e.rfind("alex_", 0) == 0) {
      for (auto& r : verify_alex(s, p, alpha)) recs.push_back(r);
    }
    Json arr = Json::array();
    for (const auto& r : recs) {
      if (!e.empty() && r.estimate_id != e) continue;
      arr.push_back(record_json(r));
      add_record_row(t, r);
    }
    if (arr.empty()) fail(ErrorKind::schema, "estimate.id", "unknown estimate '" + e + "'");
    c.results = {{"records", arr}};
  }
  c.csv = std::move(t);
  return c;
}

CommandOutput cmd_sweep(const Options& o) {
  if (o.family.empty()) fail(ErrorKind::schema, "cli.family", "sweep needs --family");
  const FamilySpec fam = parse_family(o.family);
  std::vector<std::string> ests = split_list(o.estimate);
  if (ests.empty()) ests = {"sharp_barycenter", "sharp_L1", "sharp_c0+", "sharp_c0", "sharp_w12", "main"};
  const double p = o.p.value_or(2.0), alpha = o.alpha.value_or(0.5);
  CommandOutput c;
  c.spec = {{"family", fam.tag()}, {"estimates", ests}, {"p", p}, {"alpha", alpha}};
  CsvTable t = record_table();
  Json arr = Json::array();
  for (const auto& e : ests) {
    const ConstantSweepResult s = constant_sweep(fam, e, p, alpha);
    arr.push_back(sweep_json(s));
    for (const auto& rec : s.table) add_record_row(t, rec);
  }
  c.results = {{"sweeps", arr}};
  c.csv = std::move(t);
  return c;
}


std::string csv_path_for(const std::string& out) {
  fs::path p(out);
  if (p.extension() == ".json") p.replace_extension(".csv");
  else p += ".csv";
  return p.string();
}

int emit(const Options& o, const CommandOutput& c, std::ostream& out, double seconds) {
  Json report;
  report["command"] = o.command;
  report["tool_version"] = tool_version;
  report["spec_hash"] = fnv1a_hex(dump_json(c.spec, -1));
  report["spec"] = c.spec;
  report["grid"] = c.grid;
  report["results"] = c.results;
  if (o.timing) report["wall_time"] = seconds;
  const std::string text = dump_json(report);
  if (o.out.empty()) {
    out << text;
    if (c.csv) out << c.csv->text();
  } else {
    write_file(o.out, text);
    if (c.csv) write_file(csv_path_for(o.out), c.csv->text());
  }
  if (c.deferred) throw *c.deferred;
  return 0;
}


void apply_config(Options& o) {
  const char* path = std::getenv("ISOSTAB_CONFIG");
  if (!path || !*path) return;
  const Json cfg = parse_json(read_file(path), "config");
  if (!cfg.is_object()) fail(ErrorKind::schema, "config.object", "config is a JSON object");
  require_keys(cfg, {"grid_res", "band_limit", "jobs", "gtol", "lambda", "golden_dir", "elements"});
  if (!o.grid_res && cfg.contains("grid_res")) o.grid_res = integer(cfg, "grid_res");
  if (!o.band_limit && cfg.contains("band_limit")) o.band_limit = integer(cfg, "band_limit");
  if (!o.jobs && cfg.contains("jobs")) o.jobs = integer(cfg, "jobs");
  if (!o.gtol && cfg.contains("gtol")) o.gtol = num(cfg, "gtol");
  if (!o.lambda && cfg.contains("lambda")) o.lambda = num(cfg, "lambda");
  if (o.golden_dir.empty() && cfg.contains("golden_dir")) o.golden_dir = str(cfg, "golden_dir");
  if (cfg.contains("elements")) o.elements = integer(cfg, "elements");
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) s.replace(pos, from.size(), to);
  return s;
}

int run_golden(const Options& o, std::ostream& out, std::ostream& err) {
  const fs::path dir = o.golden_dir.empty() ? fs::path(ISOSTAB_SOURCE_DIR) / "tests" / "golden" : fs::path(o.golden_dir);
  const Json corpus = parse_json(read_file((dir / "corpus.json").string()), "golden");
  if (!corpus.contains("entries") || !corpus["entries"].is_array()) {
    fail(ErrorKind::schema, "golden.entries", "corpus.json needs an 'entries' array");
  }
  const fs::path scratch = fs::temp_directory_path() / ("isostab_golden_" + std::to_string(::getpid()));
  fs::create_directories(scratch);
  const std::string data_dir = (fs::path(ISOSTAB_SOURCE_DIR) / "data").string();
  int failures = 0;
  for (const auto& e : corpus["entries"]) {
    const std::string name = str(e, "name");
    std::vector<std::string> args;
    for (const auto& a : e["args"]) args.push_back(replace_all(a.get<std::string>(), "${DATA}", data_dir));
    const fs::path target = (o.update_golden ? dir : scratch) / (name + ".json");
    args.push_back("--out");
    args.push_back(target.string());
    std::ostringstream sink, errs;
    const int code = run(args, sink, errs);
    const int expected = e.contains("exit") ? e["exit"].get<int>() : 0;
    bool ok = code == expected;
    std::string why = ok ? "" : "exit " + std::to_string(code) + " (expected " + std::to_string(expected) + ") " + errs.str();
    if (ok && !o.update_golden) {
      for (const std::string ext : {".json", ".csv"}) {
        const fs::path golden = dir / (name + ext), fresh = scratch / (name + ext);
        if (!fs::exists(golden) && !fs::exists(fresh)) continue;
        if (!fs::exists(golden) || !fs::exists(fresh) || read_file(golden.string()) != read_file(fresh.string())) {
          ok = false;
          why = name + ext + " differs from the stored report";
        }
      }
    }
    out << (ok ? "PASS " : "FAIL ") << name << (why.empty() ? "" : "  " + why) << "\n";
    failures += !ok;
  }
  std::error_code ec;
  fs::remove_all(scratch, ec);
  out << (failures == 0 ? "golden: all reports identical\n" : "golden: " + std::to_string(failures) + " mismatches\n");
  if (failures) err << "golden corpus mismatch\n";
  return failures == 0 ? 0 : 1;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--set", o.set_text, "set spec: inline JSON or a file path");
  app->add_option("--spec-file", o.spec_file, "set spec file");
  app->add_option("--out", o.out, "report path (CSV written next to it)");
  app->add_option("--grid-res", o.grid_res, "grid resolution");
  app->add_option("--band-limit", o.band_limit, "spectral band limit");
  app->add_option("--jobs", o.jobs, "worker threads");
  app->add_flag("--timing", o.timing, "include wall time in the report");
}

}  // namespace

Json read_spec(const std::string& text_or_path) {
  std::size_t i = text_or_path.find_first_not_of(" \t\r\n");
  if (i != std::string::npos && text_or_path[i] == '{') return parse_json(text_or_path, "spec");
  return parse_json(read_file(text_or_path), "spec");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app("Stability of Almgren's isoperimetric principle: geometry, estimates and extremal families", "isostab");
  app.set_version_flag("--version", std::string(tool_version));
  app.add_flag("--golden", o.golden, "re-run the golden corpus and compare reports byte by byte");
  app.add_flag("--update-golden", o.update_golden, "rewrite the stored golden reports");
  app.add_option("--golden-dir", o.golden_dir, "golden corpus directory");
  app.add_option("--jobs", o.jobs, "worker threads");

  auto* geometry = app.add_subcommand("geometry", "functionals, deficits and asymmetries of a set");
  auto* decompose_cmd = app.add_subcommand("decompose", "spherical-harmonic split u = a + b.x + R");
  auto* almgren = app.add_subcommand("almgren", "terms of the convex-envelope identity");
  auto* structure = app.add_subcommand("structure", "hole removal for planar regions");
  auto* sharp = app.add_subcommand("sharp-family", "sharpness sweep of the extremal family");
  auto* truncate = app.add_subcommand("truncate", "mean-curvature truncation by the obstacle problem");
  auto* verify = app.add_subcommand("verify", "both sides of the stability inequalities");
  auto* sweep = app.add_subcommand("sweep", "constant sweeps over a family for several estimates");
  for (auto* s : {geometry, decompose_cmd, almgren, structure, sharp, truncate, verify, sweep}) add_common(s, o);
  sharp->add_option("--n", o.n, "dimension");
  sharp->add_option("--K", o.K, "K or 'auto'");
  sharp->add_option("--r0", o.r0);
  sharp->add_option("--sigma", o.sigma);
  sharp->add_option("--t-decades", o.t_decades, "lo:hi:count, log-spaced");
  truncate->add_option("--lambda", o.lambda, "truncation level (default n)");
  truncate->add_option("--gtol", o.gtol, "projected-gradient tolerance");
  truncate->add_option("--elements", o.elements, "P1 elements on [0, pi]");
  truncate->add_option("--max-iter", o.max_iter, "iteration cap of the projected Newton solver");
  for (auto* s : {verify, sweep}) {
    s->add_option("--estimate", o.estimate, "estimate id (comma list for sweep)");
    s->add_option("--family", o.family, "family, e.g. sharp:n=3,count=10");
    s->add_option("--p", o.p, "Lp exponent of the C0 Alexandrov bound");
    s->add_option("--alpha", o.alpha, "Holder exponent");
  }
  app.require_subcommand(0, 1);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << tool_version << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: cli.parse: " << e.what() << "\n";
    return 1;
  }

  try {
    apply_config(o);
    if (o.jobs) {
      if (*o.jobs < 1) fail(ErrorKind::precondition, "cli.jobs", "--jobs must be positive");
      omp_set_num_threads(*o.jobs);
    }
    if (o.golden || o.update_golden) return run_golden(o, out, err);
    if (app.get_subcommands().empty()) {
      out << app.help();
      return 1;
    }
    o.command = app.get_subcommands().front()->get_name();
    const auto t0 = std::chrono::steady_clock::now();
    CommandOutput c;
    if (o.command == "geometry") c = cmd_geometry(o);
    else if (o.command == "decompose") c = cmd_decompose(o);
    else if (o.command == "almgren") c = cmd_almgren(o);
    else if (o.command == "structure") c = cmd_structure(o);
    else if (o.command == "sharp-family") c = cmd_sharp_family(o);
    else if (o.command == "truncate") c = cmd_truncate(o);
    else if (o.command == "verify") c = cmd_verify(o);
    else c = cmd_sweep(o);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return emit(o, c, out, secs);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const Json::exception& e) {
    err << "error: spec.schema: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace isostab::cli
