#include "isostab/stability_suite.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "isostab/error.hpp"
#include "isostab/harmonics.hpp"
#include "isostab/quadrature.hpp"
#include "isostab/sharp_family.hpp"
#include "isostab/sphere_core.hpp"

namespace isostab {

namespace {

constexpr double barycenter_tol = 1e-9;
constexpr double c1_small = 0.1;
constexpr double H_slack = 1e-8;

InequalityRecord make_record(const std::string& id, double lhs, double rhs, const SphereGrid& g) {
  InequalityRecord r;
  r.estimate_id = id;
  r.lhs = lhs;
  r.rhs_raw = rhs;
  const double tol = degenerate_tolerance * g.measure();
  if (std::abs(rhs) <= tol && std::abs(lhs) <= tol) {
    r.degenerate = true;
    r.ratio = 0.0;
  } else if (rhs <= tol) {
    r.ratio = std::numeric_limits<double>::infinity();
  } else {
    r.ratio = lhs / rhs;
  }
  return r;
}

double barycenter_norm(const NormalGraphSet& set) {
  double s = 0.0;
  for (double b : set.barycenter()) s += b * b;
  return std::sqrt(s);
}

void require_centered(const NormalGraphSet& set) {
  const double b = barycenter_norm(set);
  if (b > barycenter_tol) {
    fail(ErrorKind::precondition, "hyp.barycenter", "|int x| = " + std::to_string(b) + " exceeds 1e-9; recenter first");
  }
}

void require_c1_small(const NormalGraphSet& set) {
  const double c1 = norm(set.u(), NormKind::C1);
  if (c1 > c1_small) fail(ErrorKind::precondition, "hyp.c1_small", "||u||_C1 = " + std::to_string(c1) + " exceeds 0.1");
}

void require_H_le_n(const NormalGraphSet& set) {
  const double h = set.sup_mean_curvature();
  if (h > set.dim() + H_slack) {
    fail(ErrorKind::precondition, "hyp.H_le_n", "sup H = " + std::to_string(h) + " exceeds n + 1e-8; dilate first");
  }
}

/// Rate of the two-sided C0 estimate in dimension n.
double c0_rate(int n, double delta) {
  if (n == 1) return delta;
  if (n == 2) return delta * std::max(1.0, std::log(1.0 / delta));
  return std::pow(delta, 1.0 / (n - 1));
}

double boundary_Lp(const NormalGraphSet& set, double p) {
  const SphereGrid& g = set.grid();
  const int n = g.dim();
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = std::pow(std::abs(set.mean_curvature()[i] - n), p) * set.sqrt_det_g()[i];
  }
  return std::pow(integrate(g, f), 1.0 / p);
}

double delta_cmc(const NormalGraphSet& set) {
  const int n = set.dim();
  const double H0 = n * set.perimeter() / ((n + 1) * set.volume());
  double m = 0.0;
  for (double h : set.mean_curvature()) m = std::max(m, std::abs(h / H0 - 1.0));
  return m;
}

GridPtr default_grid(const FamilySpec& s) {
  const int n = s.n;
  if (n == 1) return SphereGrid::build(1, s.resolution > 0 ? s.resolution : 256, GridMode::full, s.band_limit > 0 ? s.band_limit : 32);
  if (n == 2 && s.kind != "ellipsoid") {
    return SphereGrid::build(2, s.resolution > 0 ? s.resolution : 32, GridMode::full, s.band_limit > 0 ? s.band_limit : 12);
  }
  return SphereGrid::build(n, s.resolution > 0 ? s.resolution : 200, GridMode::axisymmetric, s.band_limit);
}

ScalarField constant_field(const GridPtr& g, double t) {
  if (g->spectral()) return ScalarField::band_limited(g, std::vector<double>(g->size(), t));
  return ScalarField::zonal(g, [t](double) { return Jet{t, 0.0, 0.0}; });
}

/// Ellipsoid of revolution with polar semi-axis 1+e and unit equatorial radius.
ZonalFunction ellipsoid_jet(double e) {
  const double k = 1.0 / ((1.0 + e) * (1.0 + e)) - 1.0;
  return [k](double th) {
    const double c = std::cos(th), s = std::sin(th);
    const double g = 1.0 + k * c * c;
    const double g1 = -2.0 * k * c * s;
    const double g2 = -2.0 * k * (c * c - s * s);
    const double rho = 1.0 / std::sqrt(g);
    return Jet{std::expm1(-0.5 * std::log1p(k * c * c)), -0.5 * rho / g * g1,
               0.75 * rho / (g * g) * g1 * g1 - 0.5 * rho / g * g2};
  };
}

double log_spaced(double lo, double hi, int i, int count) {
  if (count == 1) return lo;
  return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (count - 1));
}

NormalGraphSet centered(const NormalGraphSet& set, double tol) {
  const RecenterResult r = recenter(set, tol, 40);
  if (r.iterations == 0) return set;
  return NormalGraphSet::build(r.u, set.margin());
}

bool is_sharp_estimate(const std::string& id) { return id.rfind("sharp_", 0) == 0 || id == "sym_diff_L1" || id == "outer_gap_c0+" || id == "main"; }

}  // namespace

std::vector<InequalityRecord> verify_sharp_u(const NormalGraphSet& set) {
  require_centered(set);
  require_H_le_n(set);
  require_c1_small(set);
  const SphereGrid& g = set.grid();
  const int n = g.dim();
  const ScalarField& u = set.u();
  const double delta = set.deficit();
  const double mean = integrate(u);
  const double c0 = norm(u, NormKind::sup);
  double c0_plus = 0.0;
  for (double v : u.values()) c0_plus = std::max(c0_plus, v);
  const double l1 = norm(u, NormKind::L1);
  std::vector<double> zero(g.ambient(), 0.0);
  std::vector<InequalityRecord> out;
  out.push_back(make_record("sharp_barycenter", mean, delta, g));
  out.push_back(make_record("sharp_barycenter_lower", delta, mean, g));
  out.push_back(make_record("sharp_L1", norm(u, NormKind::W11), delta, g));
  out.push_back(make_record("sharp_c0+", c0_plus, delta, g));
  out.push_back(make_record("sharp_c0", c0, delta > 0.0 ? c0_rate(n, delta) : 0.0, g));
  out.push_back(make_record("sharp_w12", norm(u, NormKind::W12), std::sqrt(c0 * std::max(delta, 0.0) + delta * delta), g));
  out.push_back(make_record("sym_diff_L1", symmetric_difference(set, zero, 1.0), l1, g));
  out.push_back(make_record("outer_gap_c0+", outer_inclusion_gap(set, zero), c0_plus, g));
  return out;
}

InequalityRecord verify_main(const NormalGraphSet& set) {
  require_H_le_n(set);
  const CenterSearch c = minimize_over_centers(set, 1.0, [&](const std::vector<double>& x) {
    return symmetric_difference(set, x, 1.0) + outer_inclusion_gap(set, x);
  });
  InequalityRecord r = make_record("main", c.value, set.deficit(), set.grid());
  for (std::size_t k = 0; k < c.center.size(); ++k) r.params.emplace_back("center_" + std::to_string(k), c.center[k]);
  return r;
}

std::vector<InequalityRecord> verify_alex(const NormalGraphSet& set, double p, double alpha) {
  const int n = set.dim();
  const bool p_ok = n <= 3 ? p >= 2.0 : p > 0.5 * n;
  if (!p_ok) fail(ErrorKind::precondition, "alex.p", "p must be >= 2 for n <= 3 and > n/2 for n >= 4");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::precondition, "alex.alpha", "alpha must lie in (0, 1)");
  require_centered(set);
  require_c1_small(set);
  const SphereGrid& g = set.grid();
  const ScalarField& u = set.u();
  const double c1alpha = norm(u, NormKind::C1) + holder_seminorm(gradient(u), alpha);
  std::vector<InequalityRecord> out;
  out.push_back(make_record("alex_L2", norm(u, NormKind::W12), boundary_Lp(set, 2.0), g));
  out.push_back(make_record("alex_C0_Lp", norm(u, NormKind::sup), boundary_Lp(set, p), g));
  out.push_back(make_record("alex_C1alpha", c1alpha, delta_cmc(set), g));
  out.back().params.emplace_back("holder_surrogate", 1.0);
  out.back().params.emplace_back("alpha", alpha);
  out[1].params.emplace_back("p", p);
  return out;
}

double FamilySpec::get(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

std::string FamilySpec::tag() const {
  std::ostringstream os;
  os.precision(17);
  os << kind << ":n=" << n << ",count=" << count << ",seed=" << seed;
  if (resolution > 0) os << ",resolution=" << resolution;
  if (band_limit > 0) os << ",band_limit=" << band_limit;
  for (const auto& [k, v] : params) os << "," << k << "=" << v;
  return os.str();
}

FamilySpec parse_family(const std::string& text) {
  FamilySpec s;
  const auto colon = text.find(':');
  s.kind = text.substr(0, colon);
  if (s.kind != "scaled_ball" && s.kind != "sharp" && s.kind != "band_limited" && s.kind != "ellipsoid") {
    fail(ErrorKind::schema, "family.kind", "unknown family '" + s.kind + "'");
  }
  if (colon == std::string::npos) return s;
  std::stringstream rest(text.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorKind::schema, "family.param", "expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorKind::schema, "family.param", "value of '" + key + "' is not a number");
    }
    if (key == "n") {
      s.n = static_cast<int>(value);
    } else if (key == "count") {
      s.count = static_cast<int>(value);
    } else if (key == "seed") {
      s.seed = static_cast<unsigned>(value);
    } else if (key == "resolution") {
      s.resolution = static_cast<int>(value);
    } else if (key == "band_limit") {
      s.band_limit = static_cast<int>(value);
    } else {
      s.params[key] = value;
    }
  }
  return s;
}

FamilyMember family_member(const FamilySpec& s, int i) {
  if (s.n < 1) fail(ErrorKind::precondition, "family.n", "n must be positive");
  FamilyMember m;
  m.tag = s.tag();
  if (s.kind == "scaled_ball") {
    const double t = log_spaced(s.get("t_min", 1e-4), s.get("t_max", 5e-2), i, s.count);
    m.set = NormalGraphSet::build(constant_field(default_grid(s), t));
    m.params = {{"t", t}};
  } else if (s.kind == "sharp") {
    if (s.n < 2) fail(ErrorKind::capability, "family.dim", "the sharp family needs n >= 2");
    const double t = log_spaced(s.get("t_min", 1e-10), s.get("t_max", 1e-8), i, s.count);
    const double K = s.get("K", 16.0);
    const HProfile h = HProfile::build(derive_params(s.n, K, s.get("r0", 0.06), t, s.get("sigma", 3.9e-3)));
    const HValidation v = validate_h(h);
    if (!v.passed) fail(ErrorKind::precondition, "sharp.validation", "h fails " + v.first_failure);
    const SharpSet sharp = build_sharp_set(h);
    m.set = centered(*sharp.set, 1e-14);
    m.params = {{"t", t}, {"K", K}, {"r0", h.params().r0}, {"sigma", h.params().sigma}};
  } else if (s.kind == "band_limited") {
    const GridPtr g = default_grid(s);
    if (!g->spectral()) fail(ErrorKind::capability, "family.dim", "band-limited families need n <= 2");
    const unsigned seed = s.seed + static_cast<unsigned>(i);
    const int lmax = static_cast<int>(s.get("max_degree", 6));
    const ScalarField raw = random_band_limited(g, seed, static_cast<int>(s.get("min_degree", 2)), lmax, 1.0);
    const double c1 = s.get("c1", 0.045);
    const ScalarField u = raw.affine(c1 / norm(raw, NormKind::C1), 0.0);
    m.set = centered(NormalGraphSet::build(u), 1e-12);
    m.params = {{"seed", static_cast<double>(seed)}, {"c1", c1}, {"max_degree", static_cast<double>(lmax)}};
  } else if (s.kind == "ellipsoid") {
    if (s.n < 2) fail(ErrorKind::capability, "family.dim", "the ellipsoid family needs n >= 2");
    const double e = log_spaced(s.get("e_min", 4e-3), s.get("e_max", 4e-2), i, s.count);
    m.set = NormalGraphSet::build(ScalarField::zonal(default_grid(s), ellipsoid_jet(e)));
    m.params = {{"e", e}};
  } else {
    fail(ErrorKind::schema, "family.kind", "unknown family '" + s.kind + "'");
  }
  return m;
}

std::vector<FamilyMember> generate_family(const FamilySpec& spec) {
  if (spec.count < 1) fail(ErrorKind::precondition, "family.empty", "the family has no members");
  std::vector<FamilyMember> out;
  for (int i = 0; i < spec.count; ++i) out.push_back(family_member(spec, i));
  return out;
}

const std::vector<std::string>& estimate_ids() {
  static const std::vector<std::string> ids = {
      "sharp_barycenter", "sharp_barycenter_lower", "sharp_L1", "sharp_c0+", "sharp_c0", "sharp_w12",
      "sym_diff_L1",      "outer_gap_c0+",          "main",     "alex_L2",   "alex_C0_Lp", "alex_C1alpha"};
  return ids;
}

ConstantSweepResult constant_sweep(const FamilySpec& family, const std::string& estimate_id, double p, double alpha) {
  const auto& ids = estimate_ids();
  if (std::find(ids.begin(), ids.end(), estimate_id) == ids.end()) {
    fail(ErrorKind::schema, "estimate.id", "unknown estimate '" + estimate_id + "'");
  }
  if (family.count < 1) fail(ErrorKind::precondition, "family.empty", "the family has no members");
  if (family.count < 10) fail(ErrorKind::precondition, "family.count", "constant sweeps need at least 10 members");
  ConstantSweepResult res;
  res.estimate_id = estimate_id;
  res.family = family;
  res.table.resize(family.count);
  std::vector<std::exception_ptr> errors(family.count);
  const bool sharp = is_sharp_estimate(estimate_id);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < family.count; ++i) {
    try {
      FamilyMember m = family_member(family, i);
      NormalGraphSet set = m.set;
      if (sharp && set.sup_mean_curvature() > set.dim() + H_slack) {
        const ScaledSet scaled = enforce_H_le_n(set);
        set = NormalGraphSet::build(scaled.u, set.margin());
        m.params.emplace_back("dilation", scaled.scale);
      }
      std::vector<InequalityRecord> recs;
      if (estimate_id == "main") {
        recs.push_back(verify_main(set));
      } else if (sharp) {
        recs = verify_sharp_u(set);
      } else {
        recs = verify_alex(set, p, alpha);
      }
      for (auto& r : recs) {
        if (r.estimate_id != estimate_id) continue;
        r.family_tag = m.tag;
        r.params.insert(r.params.begin(), m.params.begin(), m.params.end());
        r.params.emplace_back("index", i);
        res.table[i] = r;
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  res.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& r : res.table) {
    if (r.degenerate) {
      ++res.degenerate_count;
      continue;
    }
    res.max_ratio = std::max(res.max_ratio, r.ratio);
    res.min_ratio = std::min(res.min_ratio, r.ratio);
  }
  if (res.degenerate_count == res.table.size()) res.min_ratio = 0.0;
  return res;
}

}  // namespace isostab
