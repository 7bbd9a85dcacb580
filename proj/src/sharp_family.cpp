#include "isostab/sharp_family.hpp"

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>

#include "isostab/error.hpp"
#include "isostab/quadrature.hpp"

namespace isostab {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

/// Geometric partition of [a, b] into `count` panels.
std::vector<double> geometric(double a, double b, int count) {
  std::vector<double> x(count + 1);
  const double q = std::log(b / a);
  for (int i = 0; i <= count; ++i) x[i] = a * std::exp(q * i / count);
  x.front() = a;
  x.back() = b;
  return x;
}

struct CapGeometry {
  double r1, phi1, mu, c, c_minus_one, rho_c;
};

double phi0(double r) { return std::sqrt(1.0 - r * r); }
double dphi0(double r) { return -r / std::sqrt(1.0 - r * r); }
double d2phi0(double r) { return -1.0 / std::pow(1.0 - r * r, 1.5); }

CapGeometry cap_geometry(const HProfile& h) {
  const auto& p = h.params();
  CapGeometry g;
  g.r1 = p.r1;
  g.phi1 = phi0(p.r1) - p.t * h.h(p.r1);
  g.mu = p.mu;
  g.c = g.phi1 + p.r1 / g.mu;
  g.c_minus_one = -p.r1 * p.r1 / (1.0 + phi0(p.r1)) - p.t * h.h(p.r1) + p.r1 / g.mu;
  g.rho_c = p.r1 * std::sqrt(1.0 + 1.0 / (g.mu * g.mu));
  return g;
}

/// Profile value and derivatives at r in [0, r0].
Jet profile_jet(const HProfile& h, const CapGeometry& g, double r) {
  const double t = h.params().t;
  if (r <= g.r1) {
    const double s2 = g.rho_c * g.rho_c - r * r;
    const double s = std::sqrt(s2);
    return {g.c - s, r / s, g.rho_c * g.rho_c / (s2 * s)};
  }
  if (r >= h.params().r0) return {phi0(r), dphi0(r), d2phi0(r)};
  return {phi0(r) - t * h.h(r), dphi0(r) - t * h.dh(r), d2phi0(r) - t * h.d2h(r)};
}

/// Mean curvature of the revolution graph z = phi(r), set below.
double graph_H(int n, double r, const Jet& phi) {
  const double q = 1.0 + phi.df * phi.df;
  return -phi.d2f / (q * std::sqrt(q)) - (n - 1) * phi.df / (r * std::sqrt(q));
}

/// rho(theta) - 1, rho', rho'' from a profile point.
Jet polar_jet(double r, const Jet& phi, double rho, double rho_minus_one) {
  const double d = phi.f - r * phi.df;
  const double drho = rho * (r + phi.f * phi.df) / d;
  const double kappa = -phi.d2f / std::pow(1.0 + phi.df * phi.df, 1.5);
  const double a = rho * rho + drho * drho;
  const double d2rho = (rho * rho + 2.0 * drho * drho - kappa * a * std::sqrt(a)) / rho;
  return {rho_minus_one, drho, d2rho};
}

double solve_radius(const HProfile& h, double theta) {
  const auto& p = h.params();
  const double ct = std::cos(theta), st = std::sin(theta);
  auto f = [&](double r) { return r * ct - (phi0(r) - p.t * h.h(r)) * st; };
  double a = p.r1, b = p.r0;
  const double fa = f(a), fb = f(b);
  if (fa >= 0.0) return a;
  if (fb <= 0.0) return b;
  std::uintmax_t iters = 200;
  const auto res = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52),
                                                      iters);
  return 0.5 * (res.first + res.second);
}

}  // namespace

SharpFamilyParams derive_params(int n, double K, double r0, double t, double sigma) {
  auto window = [](const std::string& which, const std::string& detail) {
    fail(ErrorKind::precondition, "sharp.window." + which, detail);
  };
  if (n < 2) window("n", "need n >= 2, got " + std::to_string(n));
  if (!(K > 0.0)) window("K", "need K > 0, got " + num(K));
  if (!(t > 0.0)) window("t_positive", "need t > 0, got " + num(t));
  if (!(r0 > 0.0 && r0 < 1.0 / K)) window("r0_lt_inv_K", "need 0 < r0 < 1/K, got r0 = " + num(r0));
  if (!(sigma < 1.0 / (K * K))) window("sigma_lt_inv_K2", "need sigma < 1/K^2, got sigma = " + num(sigma));
  if (!(t / r0 < sigma)) window("t_over_r0_lt_sigma", "need t/r0 < sigma, got t/r0 = " + num(t / r0));
  if (!(t < 1.0 / K)) window("t_lt_inv_K", "need t < 1/K, got t = " + num(t));
  SharpFamilyParams p;
  p.n = n;
  p.K = K;
  p.r0 = r0;
  p.t = t;
  p.sigma = sigma;
  p.r1 = std::pow(t / sigma, 1.0 / (n - 1)) * std::pow(r0, static_cast<double>(n) / (n - 1));
  if (!(p.r1 > 0.0 && p.r1 < r0)) window("r1_in_0_r0", "need 0 < r1 < r0, got r1 = " + num(p.r1));
  return p;
}

double HProfile::X(double r) const {
  const int n = p_.n;
  const double r0 = p_.r0, t = p_.t, K = p_.K;
  const double q = r0 / r;
  if (n == 2) {
    const double L = std::log(q);
    return r0 * q - r - 7.0 * t * K * K * r0 * r0 * r0 * q * L -
           1.5 * t * t * K * K * K * r0 * r0 * r0 * (q * q * q - q);
  }
  const double A = (n + 5.0) / (n - 2.0) * t * K * K;
  const double B = (n + 1.0) / (2.0 * n - 2.0) * t * t * K * K * K;
  const double r03 = r0 * r0 * r0;
  const double qn1 = std::pow(q, n - 1);
  return r0 * qn1 - r - A * r03 * (std::pow(q, 2 * n - 3) - qn1) - B * r03 * (std::pow(q, 3 * n - 3) - qn1);
}

double HProfile::dX(double r) const {
  const int n = p_.n;
  const double r0 = p_.r0, t = p_.t, K = p_.K;
  const double q = r0 / r;
  if (n == 2) {
    const double L = std::log(q);
    return -q * q - 1.0 + 7.0 * t * K * K * r0 * r0 * q * q * (1.0 + L) -
           1.5 * t * t * K * K * K * r0 * r0 * (-3.0 * q * q * q * q + q * q);
  }
  const double A = (n + 5.0) / (n - 2.0) * t * K * K;
  const double B = (n + 1.0) / (2.0 * n - 2.0) * t * t * K * K * K;
  const double r02 = r0 * r0;
  const double qn = std::pow(q, n);
  return (1.0 - n) * qn - 1.0 - A * r02 * ((3.0 - 2 * n) * std::pow(q, 2 * n - 2) - (1.0 - n) * qn) -
         B * r02 * ((3.0 - 3 * n) * std::pow(q, 3 * n - 2) - (1.0 - n) * qn);
}

double HProfile::dh(double r) const {
  const double w = 1.0 - r * r;
  if (form_ == HDerivativeForm::derived) return -X(r) / (w * std::sqrt(w));
  return -w * std::sqrt(w) * X(r);
}

double HProfile::d2h(double r) const {
  const double w = 1.0 - r * r;
  const double sw = std::sqrt(w);
  if (form_ == HDerivativeForm::derived) return -(3.0 * r * X(r) / (w * w * sw) + dX(r) / (w * sw));
  return -(-3.0 * r * sw * X(r) + w * sw * dX(r));
}

HProfile HProfile::build(SharpFamilyParams params, HDerivativeForm form, int panels) {
  if (panels < 1) fail(ErrorKind::precondition, "sharp.panels", "need at least one panel");
  HProfile h;
  h.p_ = params;
  h.form_ = form;
  h.r_ = geometric(params.r1, params.r0, panels);
  h.h_.assign(h.r_.size(), 0.0);
  const auto integrand = [&h](double s) { return -h.dh(s); };
  double acc = 0.0;
  for (int i = panels - 1; i >= 0; --i) {
    const AdaptiveResult q = integrate_adaptive(integrand, h.r_[i], h.r_[i + 1], 1e-13, 12);
    if (!std::isfinite(q.value)) fail(ErrorKind::convergence, "sharp.h_quadrature", "non-finite panel integral");
    const double width = h.r_[i + 1] - h.r_[i];
    const double scale = width * std::pow(params.r0, params.n) / std::pow(h.r_[i], params.n - 1);
    if (q.error > 1e-12 * std::max(std::abs(q.value), scale)) {
      fail(ErrorKind::convergence, "sharp.h_quadrature",
           "panel error " + num(q.error) + " exceeds tolerance at r = " + num(h.r_[i]));
    }
    h.qerr_ = std::max(h.qerr_, q.error);
    acc += q.value;
    h.h_[i] = acc;
  }
  h.p_.mu = dphi0(params.r1) - params.t * h.dh(params.r1);
  return h;
}

double HProfile::h(double r) const {
  if (r >= p_.r0) return 0.0;
  if (r < p_.r1) r = p_.r1;
  const auto it = std::upper_bound(r_.begin(), r_.end(), r);
  const std::size_t j = static_cast<std::size_t>(it - r_.begin());
  if (j >= r_.size()) return 0.0;
  if (r == r_[j - 1]) return h_[j - 1];
  return h_[j] + integrate_adaptive([this](double s) { return -dh(s); }, r, r_[j], 1e-13, 12).value;
}

std::vector<double> HProfile::derivatives() const {
  std::vector<double> d(r_.size());
  for (std::size_t i = 0; i < r_.size(); ++i) d[i] = dh(r_[i]);
  return d;
}

std::vector<double> HProfile::second_derivatives() const {
  std::vector<double> d(r_.size());
  for (std::size_t i = 0; i < r_.size(); ++i) d[i] = d2h(r_[i]);
  return d;
}

const ValidationCheck* HValidation::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

HValidation validate_h(const HProfile& hp, int samples) {
  const auto& p = hp.params();
  const int n = p.n;
  const double t = p.t, K = p.K, r0 = p.r0;
  HValidation v;
  auto add = [&v](std::string name, double margin, double worst_r, bool gating = true, double tol = 0.0) {
    ValidationCheck c;
    c.name = std::move(name);
    c.margin = margin;
    c.worst_r = worst_r;
    c.gating = gating;
    c.passed = margin >= -tol;
    v.checks.push_back(c);
  };
  add("h_at_r0", 1e-10 - std::max(std::abs(hp.h(r0)), std::abs(hp.dh(r0))), r0);
  const double slope1 = t * std::abs(hp.dh(p.r1));
  add("ny3", 1.0 / K - slope1, p.r1);
  add("ny3_three_sigma", 3.0 * p.sigma - slope1, p.r1);

  const std::vector<double> rs = geometric(p.r1, r0, samples + 1);
  struct Worst {
    double m = std::numeric_limits<double>::infinity();
    double r = 0.0;
    void see(double margin, double at) {
      if (margin < m) m = margin, r = at;
    }
  } ny4_lo, ny4_hi, ny5_lo, ny5_hi, dec, cvx, fund, small, adm, unit;
  double sup_H = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < rs.size(); ++i) {
    const double r = rs[i];
    const double d1 = hp.dh(r), d2 = hp.d2h(r);
    const double scale = std::pow(r0, n) / std::pow(r, n - 1);
    ny4_lo.see((d1 + scale) / scale, r);
    ny4_hi.see((-(1.0 - r / r0) * scale / 2.0 - d1) / scale, r);
    ny5_lo.see(d2 > 0.0 ? d2 * r / scale : -1.0, r);
    ny5_hi.see((K * scale / r - d2) * r / scale, r);
    dec.see(-d1, r);
    cvx.see(d2, r);
    fund.see((K * scale - std::max(std::abs(d1), r * std::abs(d2))) / scale, r);
    small.see(slope1 - t * std::abs(d1), r);
    const Jet phi{0.0, dphi0(r) - t * d1, d2phi0(r) - t * d2};
    const double H = graph_H(n, r, phi);
    sup_H = std::max(sup_H, H);
    adm.see(n * (1.0 + t) - H, r);
  }
  for (std::size_t i = 0; i < hp.values().size(); ++i) {
    const double hval = hp.values()[i];
    unit.see(std::min(hval, 1.0 - hval), hp.radii()[i]);
  }
  add("ny4_lower", ny4_lo.m, ny4_lo.r);
  add("ny4_upper", ny4_hi.m, ny4_hi.r);
  add("ny5_lower", ny5_lo.m, ny5_lo.r);
  add("ny5_upper", ny5_hi.m, ny5_hi.r);
  add("h_decreasing", dec.m, dec.r);
  add("h_convex", cvx.m, cvx.r);
  add("h_fund_soln", fund.m, fund.r);
  add("h_prime_small", small.m, small.r);
  add("admissible", adm.m, adm.r, true, 1e-14 * n);
  add("h_unit_range", unit.m, unit.r, false);
  v.sup_H_scaled = sup_H / (1.0 + t);
  for (const auto& c : v.checks) {
    if (c.gating && !c.passed) {
      v.passed = false;
      v.first_failure = c.name;
      break;
    }
  }
  return v;
}

double sharp_polar_angle(const HProfile& h, double r) {
  const CapGeometry g = cap_geometry(h);
  const Jet phi = profile_jet(h, g, r);
  return std::atan2(r, phi.f);
}

ZonalFunction sharp_radial_jet(const HProfile& hp) {
  const auto& p = hp.params();
  const CapGeometry g = cap_geometry(hp);
  const double theta0 = std::asin(p.r0);
  const double theta1 = std::atan2(g.r1, g.phi1);
  const double t = p.t;
  return [hp, g, theta0, theta1, t](double theta) -> Jet {
    if (theta >= theta0) return {t, 0.0, 0.0};
    Jet rj;
    if (theta <= theta1) {
      const double ct = std::cos(theta), st = std::sin(theta);
      const double root = std::sqrt(g.rho_c * g.rho_c - g.c * g.c * st * st);
      const double sh = std::sin(0.5 * theta);
      const double s_minus_one = g.c_minus_one * ct - 2.0 * sh * sh - root;
      const double s = 1.0 + s_minus_one;
      const double r = s * st;
      const Jet phi = profile_jet(hp, g, r);
      rj = polar_jet(r, {s * ct, phi.df, phi.d2f}, s, s_minus_one);
    } else {
      const double r = solve_radius(hp, theta);
      const double hr = hp.h(r);
      const double f0 = phi0(r);
      const double rho = std::sqrt(r * r + (f0 - t * hr) * (f0 - t * hr));
      const double rm1 = (-2.0 * t * f0 * hr + t * t * hr * hr) / (rho + 1.0);
      const Jet phi{f0 - t * hr, dphi0(r) - t * hp.dh(r), d2phi0(r) - t * hp.d2h(r)};
      rj = polar_jet(r, phi, rho, rm1);
    }
    const double s = 1.0 + t;
    return {t * (1.0 + rj.f) + rj.f, s * rj.df, s * rj.d2f};
  };
}

double sharp_phi_at_zero(const HProfile& h) {
  const CapGeometry g = cap_geometry(h);
  return g.c - g.rho_c;
}

double sharp_u_c0(const HProfile& h) {
  const double t = h.params().t;
  return std::max(t, 1.0 - (1.0 + t) * sharp_phi_at_zero(h));
}

double sharp_deficit(const HProfile& hp) {
  const auto& p = hp.params();
  const int n = p.n;
  const double t = p.t;
  const CapGeometry g = cap_geometry(hp);
  auto weight = [n](double r) { return std::pow(r, n - 1); };
  auto cap = [&](double r) {
    const double s2 = g.rho_c * g.rho_c - r * r;
    const double d2 = r * r / s2 - r * r / (1.0 - r * r);
    const double a = r * r / s2, b = r * r / (1.0 - r * r);
    return d2 / (std::sqrt(1.0 + a) + std::sqrt(1.0 + b)) * weight(r);
  };
  auto mid = [&](double r) {
    const double d0 = dphi0(r);
    const double e = -t * hp.dh(r);
    const double d = d0 + e;
    return e * (2.0 * d0 + e) / (std::sqrt(1.0 + d * d) + std::sqrt(1.0 + d0 * d0)) * weight(r);
  };
  CompensatedSum I;
  I.add(integrate_adaptive(cap, 0.0, g.r1, 1e-13, 12).value);
  const std::vector<double> br = geometric(p.r1, p.r0, 64);
  for (std::size_t i = 0; i + 1 < br.size(); ++i) I.add(integrate_adaptive(mid, br[i], br[i + 1], 1e-13, 12).value);
  const double scale = std::exp(n * std::log1p(t));
  return std::expm1(n * std::log1p(t)) * sphere_measure(n) + scale * sphere_measure(n - 1) * I.value();
}

GridPtr sharp_grid(const HProfile& hp, int nodes_per_panel) {
  const auto& p = hp.params();
  const CapGeometry g = cap_geometry(hp);
  const double theta0 = std::asin(p.r0);
  const double theta1 = std::atan2(g.r1, g.phi1);
  std::vector<double> breaks{0.0};
  const int count = std::max(4, static_cast<int>(std::ceil(std::log(theta0 / theta1) / std::log(1.5))));
  for (double b : geometric(theta1, theta0, count)) breaks.push_back(b);
  breaks.push_back(0.5 * std::numbers::pi);
  breaks.push_back(std::numbers::pi);
  return SphereGrid::axisymmetric_panels(p.n, breaks, nodes_per_panel);
}

SharpSet build_sharp_set(const HProfile& hp, int nodes_per_panel, bool with_set) {
  const auto& p = hp.params();
  const int n = p.n;
  const double t = p.t;
  const CapGeometry g = cap_geometry(hp);
  SharpSet s;
  s.params = p;
  s.mu_expansion = p.sigma - (n + 1.0) / (2.0 * n - 2.0) * std::pow(p.K, 3) * std::pow(p.sigma, 3);

  const double cap_value = g.c - std::sqrt(g.rho_c * g.rho_c - g.r1 * g.r1);
  const double cap_slope = g.r1 / std::sqrt(g.rho_c * g.rho_c - g.r1 * g.r1);
  s.seam_r1_value = std::abs(cap_value - g.phi1);
  s.seam_r1_slope = std::abs(cap_slope - (dphi0(g.r1) - t * hp.dh(g.r1)));
  s.seam_r0_value = std::abs(hp.h(p.r0)) * t;
  s.seam_r0_slope = std::abs(hp.dh(p.r0)) * t;
  const double seam = std::max({s.seam_r1_value, s.seam_r1_slope, s.seam_r0_value, s.seam_r0_slope});
  if (!(seam <= 1e-9)) {
    fail(ErrorKind::precondition, "sharp.seam",
         "C1 mismatch: r1 value " + num(s.seam_r1_value) + ", r1 slope " + num(s.seam_r1_slope) + ", r0 value " +
             num(s.seam_r0_value) + ", r0 slope " + num(s.seam_r0_slope));
  }

  std::vector<double> rr, f, df, d2f;
  auto push = [&](double r) {
    const Jet j = profile_jet(hp, g, r);
    rr.push_back((1.0 + t) * r);
    f.push_back((1.0 + t) * j.f);
    df.push_back(j.df);
    d2f.push_back(j.d2f / (1.0 + t));
  };
  for (int i = 0; i < 64; ++i) push(g.r1 * i / 64.0);
  const std::vector<double> mids = geometric(p.r1, p.r0, 256);
  for (std::size_t i = 0; i + 1 < mids.size(); ++i) push(mids[i]);
  for (int i = 0; i <= 64; ++i) push(p.r0 * (1.0 + i / 64.0));
  s.profile = AxisymProfile::graph(n, rr, f, df, d2f);

  double sup = -n / g.rho_c;
  for (double r : geometric(p.r1, p.r0, 10000)) {
    if (r <= g.r1 || r >= p.r0) continue;
    sup = std::max(sup, graph_H(n, r, profile_jet(hp, g, r)));
  }
  s.sup_H = std::max(sup, static_cast<double>(n)) / (1.0 + t);

  s.delta = sharp_deficit(hp);
  s.phi_at_zero = g.c - g.rho_c;
  s.u_minus_c0 = 1.0 - (1.0 + t) * s.phi_at_zero;
  s.u_c0 = std::max(t, s.u_minus_c0);
  s.u_plus_c0 = t;
  if (with_set) {
    s.u = ScalarField::zonal(sharp_grid(hp, nodes_per_panel), sharp_radial_jet(hp));
    s.set = NormalGraphSet::build(s.u);
    s.sup_H = std::max(s.sup_H, s.set->sup_mean_curvature());
  }
  return s;
}

SweepResult sharpness_sweep(int n, double K, double r0, double sigma, const std::vector<double>& ts,
                            HDerivativeForm form) {
  if (ts.size() < 5) fail(ErrorKind::precondition, "sweep.count", "need at least 5 values of t");
  const auto [tmin, tmax] = std::minmax_element(ts.begin(), ts.end());
  if (!(*tmin > 0.0) || !(*tmax >= 100.0 * *tmin)) {
    fail(ErrorKind::precondition, "sweep.span", "values of t must span at least two decades");
  }
  std::vector<SharpFamilyParams> params;
  for (double t : ts) params.push_back(derive_params(n, K, r0, t, sigma));

  SweepResult out;
  out.n = n;
  out.K = K;
  out.r0 = r0;
  out.sigma = sigma;
  out.rows.resize(ts.size());
  std::vector<std::exception_ptr> errors(ts.size());
  const long count = static_cast<long>(ts.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      const HProfile h = HProfile::build(params[i], form);
      const HValidation v = validate_h(h);
      const SharpSet s = build_sharp_set(h, 16, false);
      SweepRow row;
      row.t = params[i].t;
      row.delta = s.delta;
      row.u_c0 = s.u_c0;
      row.u_minus_c0 = s.u_minus_c0;
      row.ratio = n == 2 ? s.u_c0 / (s.delta * std::log(1.0 / s.delta)) : s.u_c0 / std::pow(s.delta, 1.0 / (n - 1));
      row.delta_over_t = s.delta / row.t;
      row.sup_H = s.sup_H;
      row.valid = v.passed;
      out.rows[i] = row;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
  for (const auto& r : out.rows) {
    const double x = std::log(r.delta), y = std::log(r.u_c0);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    rmin = std::min(rmin, r.ratio), rmax = std::max(rmax, r.ratio);
    dmin = std::min(dmin, r.delta_over_t), dmax = std::max(dmax, r.delta_over_t);
    out.all_valid = out.all_valid && r.valid;
  }
  const double m = static_cast<double>(out.rows.size());
  out.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  out.ratio_spread = rmax / rmin;
  out.delta_over_t_spread = dmax / dmin;
  return out;
}

double choose_K(int n, double r0, double sigma, const std::vector<double>& ts) {
  for (double K = 16.0;; K *= 2.0) {
    bool ok = true;
    for (double t : ts) {
      SharpFamilyParams p;
      try {
        p = derive_params(n, K, r0, t, sigma);
      } catch (const Error& e) {
        fail(ErrorKind::precondition, "sharp.choose_K",
             "window closed at K = " + num(K) + " before validation passed (" + e.invariant() + ")");
      }
      const HProfile h = HProfile::build(p);
      if (!validate_h(h).passed) {
        ok = false;
        break;
      }
    }
    if (ok) return K;
  }
}

}  // namespace isostab
