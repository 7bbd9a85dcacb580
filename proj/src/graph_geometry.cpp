#include "isostab/graph_geometry.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

#include "isostab/error.hpp"
#include "isostab/optimize.hpp"
#include "isostab/quadrature.hpp"
#include "isostab/sphere_core.hpp"

namespace isostab {

namespace {

double dotv(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double weight_sum(const SphereGrid& g) {
  CompensatedSum s;
  for (double w : g.weights()) s.add(w);
  return s.value();
}

template <class F>
double solve_bracketed(F f, double lo, double hi) {
  boost::uintmax_t it = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(52);
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, it);
  return 0.5 * (r.first + r.second);
}

}  // namespace

double zonal_mean_curvature(int n, double theta, const Jet& u) {
  const double p = 1.0 + u.f;
  const double q = u.df;
  const double W = std::sqrt(p * p + q * q);
  const double dW = (p * q + q * u.d2f) / W;
  const double g = 1.0 / (p * W);
  const double dg = -(q * W + p * dW) / ((p * W) * (p * W));
  const double div = dg * q + g * u.d2f + (n - 1) * std::cos(theta) / std::sin(theta) * g * q;
  return -div + (n - q * q / (p * p)) / W;
}

NormalGraphSet NormalGraphSet::build(ScalarField u, double margin) {
  const SphereGrid& g = u.grid();
  const int n = g.dim();
  const int a = g.ambient();
  double umin = std::numeric_limits<double>::infinity();
  for (double v : u.values()) umin = std::min(umin, 1.0 + v);
  if (!(umin > margin)) {
    fail(ErrorKind::precondition, "set.star_shaped_margin",
         "min(1+u) = " + std::to_string(umin) + " is not above the margin " + std::to_string(margin));
  }
  NormalGraphSet s;
  s.margin_ = margin;
  const TangentField du = gradient(u);
  s.grad_ = du.data();
  const std::size_t N = g.size();
  s.grad_sq_.resize(N);
  s.sqrt_det_g_.resize(N);
  std::vector<double> excess(N), vol(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double ui = u[i];
    const double q2 = du.norm2(i);
    s.grad_sq_[i] = q2;
    const double p = 1.0 + ui;
    s.sqrt_det_g_[i] = std::pow(p, n - 1) * std::sqrt(p * p + q2);
    excess[i] = std::expm1((n - 1) * std::log1p(ui) + 0.5 * std::log1p(ui * (2.0 + ui) + q2));
    vol[i] = std::pow(p, n + 1) / (n + 1);
  }
  s.perimeter_ = integrate(g, s.sqrt_det_g_);
  s.deficit_ = integrate(g, excess) + (weight_sum(g) - g.measure());
  s.volume_ = integrate(g, vol);
  s.barycenter_.assign(a, 0.0);
  for (int c = 0; c < a; ++c) {
    if (g.mode() == GridMode::axisymmetric && c != n) continue;
    std::vector<double> m(N);
    for (std::size_t i = 0; i < N; ++i) m[i] = (1.0 + u[i]) * g.node(i)[c] * s.sqrt_det_g_[i];
    s.barycenter_[c] = integrate(g, m);
  }

  s.h_.resize(N);
  if (u.is_zonal()) {
    for (std::size_t i = 0; i < N; ++i) {
      const double t = polar_angle(g.node(i));
      s.h_[i] = zonal_mean_curvature(n, t, u.jet()(t));
    }
  } else {
    const ScalarField lap = laplace_beltrami(u);
    std::vector<double> gv(N), W(N);
    for (std::size_t i = 0; i < N; ++i) {
      const double p = 1.0 + u[i];
      W[i] = std::sqrt(p * p + s.grad_sq_[i]);
      gv[i] = 1.0 / (p * W[i]);
    }
    const ScalarField gf = u.has_coeffs() ? ScalarField::band_limited(u.grid_ptr(), gv)
                                          : ScalarField::from_values(u.grid_ptr(), gv);
    const TangentField dg = gradient(gf);
    for (std::size_t i = 0; i < N; ++i) {
      const double p = 1.0 + u[i];
      const double div = gv[i] * lap[i] + dg.dot(i, du);
      s.h_[i] = -div + (n - s.grad_sq_[i] / (p * p)) / W[i];
    }
  }
  s.u_ = std::move(u);
  return s;
}

double NormalGraphSet::sup_mean_curvature() const { return *std::max_element(h_.begin(), h_.end()); }

ScalarField mean_curvature(const NormalGraphSet& set) {
  return ScalarField::from_values(set.u().grid_ptr(), set.mean_curvature());
}

double comparison_radius(const NormalGraphSet& set) {
  const double ball = weight_sum(set.grid()) / (set.dim() + 1);
  return std::pow(set.volume() / ball, 1.0 / (set.dim() + 1));
}

double ball_radial(const std::vector<double>& center, double radius, std::span<const double> w) {
  const double xw = dotv(center, w);
  const double xx = dotv(center, center);
  return xw + std::sqrt(radius * radius - xx + xw * xw);
}

double symmetric_difference(const NormalGraphSet& set, const std::vector<double>& center, double radius) {
  const SphereGrid& g = set.grid();
  const int n = g.dim();
  std::vector<double> d(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double rb = ball_radial(center, radius, g.node(i));
    d[i] = std::abs(std::pow(1.0 + set.u()[i], n + 1) - std::pow(rb, n + 1)) / (n + 1);
  }
  return integrate(g, d);
}

std::vector<std::vector<double>> fraenkel_starts(const SphereGrid& g) {
  const int a = g.ambient();
  std::vector<std::vector<double>> starts;
  if (g.mode() == GridMode::axisymmetric) {
    for (double s : {0.0, 0.1, -0.1, 0.05, -0.05, 0.2, -0.2, 0.15}) {
      std::vector<double> x(a, 0.0);
      x[a - 1] = s;
      starts.push_back(x);
    }
    return starts;
  }
  starts.emplace_back(a, 0.0);
  for (int c = 0; c < a; ++c) {
    for (double sgn : {1.0, -1.0}) {
      std::vector<double> x(a, 0.0);
      x[c] = 0.1 * sgn;
      starts.push_back(x);
    }
  }
  for (int k = 0; starts.size() < 8; ++k) {
    std::vector<double> x(a, 0.1 / std::sqrt(static_cast<double>(a)));
    if (k < a) x[k] = -x[k];
    if (k == a) x.assign(a, -0.1 / std::sqrt(static_cast<double>(a)));
    starts.push_back(x);
  }
  return starts;
}

CenterSearch minimize_over_centers(const NormalGraphSet& set, double radius,
                                   const std::function<double(const std::vector<double>&)>& objective) {
  const SphereGrid& g = set.grid();
  const int a = g.ambient();
  const bool axis = g.mode() == GridMode::axisymmetric;
  auto to_center = [&](const std::vector<double>& p) {
    if (!axis) return p;
    std::vector<double> x(a, 0.0);
    x[a - 1] = p[0];
    return x;
  };
  auto f = [&](const std::vector<double>& p) {
    const auto x = to_center(p);
    if (std::sqrt(dotv(x, x)) >= radius * (1.0 - 1e-9)) return std::numeric_limits<double>::infinity();
    return objective(x);
  };
  CenterSearch best;
  best.value = std::numeric_limits<double>::infinity();
  NelderMeadOptions opts;
  opts.max_iter = 500;
  opts.ftol = 1e-10;
  for (const auto& s : fraenkel_starts(g)) {
    if (std::sqrt(dotv(s, s)) >= 0.99 * radius) continue;
    std::vector<double> p = axis ? std::vector<double>{s[a - 1]} : s;
    const NelderMeadResult r = nelder_mead(f, p, opts);
    if (r.f < best.value) {
      best.value = r.f;
      best.center = to_center(r.x);
    }
  }
  if (!std::isfinite(best.value) || std::sqrt(dotv(best.center, best.center)) > 0.99 * radius) {
    fail(ErrorKind::convergence, "fraenkel.center_bound", "optimizer reached the center bound |x| < r");
  }
  return best;
}

FraenkelResult fraenkel_asymmetry(const NormalGraphSet& set) {
  FraenkelResult res;
  res.radius = comparison_radius(set);
  const double V = set.volume();
  const CenterSearch c = minimize_over_centers(
      set, res.radius, [&](const std::vector<double>& x) { return symmetric_difference(set, x, res.radius) / V; });
  res.alpha = c.value;
  res.center = c.center;
  return res;
}

double hausdorff_radial(const NormalGraphSet& set, const std::vector<double>& center) {
  const SphereGrid& g = set.grid();
  const double r = comparison_radius(set);
  const double cn = std::sqrt(dotv(center, center));
  double rmin = std::numeric_limits<double>::infinity();
  for (double v : set.u().values()) rmin = std::min(rmin, 1.0 + v);
  if (cn >= rmin || cn >= r) fail(ErrorKind::precondition, "hausdorff.center_inside", "center lies outside the set");
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    m = std::max(m, std::abs(1.0 + set.u()[i] - ball_radial(center, r, g.node(i))));
  }
  return m / r;
}

double outer_inclusion_gap(const NormalGraphSet& set, const std::vector<double>& center) {
  const SphereGrid& g = set.grid();
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto w = g.node(i);
    const double rho = 1.0 + set.u()[i];
    double d2 = 0.0;
    for (int c = 0; c < g.ambient(); ++c) {
      const double y = rho * w[c] - (c < static_cast<int>(center.size()) ? center[c] : 0.0);
      d2 += y * y;
    }
    m = std::max(m, std::sqrt(d2) - 1.0);
  }
  return std::max(m, 0.0);
}

DeficitReport deficits(const NormalGraphSet& set) {
  const int n = set.dim();
  const SphereGrid& g = set.grid();
  DeficitReport r;
  r.delta = set.deficit();
  r.perimeter = set.perimeter();
  r.volume = set.volume();
  const double S = g.measure();
  const double ball = S / (n + 1);
  /// delta_iso = (P/P(B1)) / (V/|B1|)^{n/(n+1)} - 1, without cancellation
  std::vector<double> vex(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) vex[i] = std::expm1((n + 1) * std::log1p(set.u()[i])) / (n + 1);
  const double vrel = (integrate(g, vex) + (weight_sum(g) - S) / (n + 1)) / ball;
  const double prel = r.delta / S;
  double iso = std::expm1(std::log1p(prel) - n / (n + 1.0) * std::log1p(vrel));
  if (iso < 0.0 && iso > -1e-13) iso = 0.0;
  r.delta_iso = iso;
  r.H0 = n * r.perimeter / ((n + 1) * r.volume);
  double cmc = 0.0, hs = -std::numeric_limits<double>::infinity();
  for (double h : set.mean_curvature()) {
    cmc = std::max(cmc, std::abs(h / r.H0 - 1.0));
    hs = std::max(hs, h);
  }
  r.delta_cmc = cmc;
  r.sup_H = hs;
  const FraenkelResult fr = fraenkel_asymmetry(set);
  r.fraenkel = fr.alpha;
  r.center_used = fr.center;
  r.hausdorff_radial = hausdorff_radial(set, fr.center);
  r.outer_gap = outer_inclusion_gap(set, fr.center);
  return r;
}

namespace {

/// Radial distance from `center` to the boundary along direction w.
double ray_intersection(const ScalarField& u, double umax, const std::vector<double>& center,
                        std::span<const double> w) {
  const std::size_t a = w.size();
  std::vector<double> y(a);
  auto F = [&](double s) {
    double r2 = 0.0;
    for (std::size_t c = 0; c < a; ++c) {
      y[c] = center[c] + s * w[c];
      r2 += y[c] * y[c];
    }
    const double r = std::sqrt(r2);
    for (std::size_t c = 0; c < a; ++c) y[c] /= r;
    return r - 1.0 - u.evaluate(y);
  };
  const double cn = std::sqrt(dotv(center, center));
  const double hi = 1.0 + umax + cn + 1.0;
  if (!(F(0.0) < 0.0)) fail(ErrorKind::precondition, "recenter.star_shaped", "center lies outside the set");
  return solve_bracketed(F, 0.0, hi);
}

ZonalFunction shifted_jet(const ZonalFunction& jet, double s) {
  return [jet, s](double theta) {
    auto G = [&](double tp) {
      const double rho = 1.0 + jet(tp).f;
      return std::atan2(rho * std::sin(tp), rho * std::cos(tp) - s) - theta;
    };
    double tp;
    if (theta <= 0.0) {
      tp = 0.0;
    } else if (theta >= M_PI) {
      tp = M_PI;
    } else {
      tp = solve_bracketed(G, 0.0, M_PI);
    }
    const Jet j = jet(tp);
    const double rho = 1.0 + j.f, d1 = j.df, d2 = j.d2f;
    const double x = rho * std::sin(tp), z = rho * std::cos(tp) - s;
    const double dx = d1 * std::sin(tp) + rho * std::cos(tp);
    const double dz = d1 * std::cos(tp) - rho * std::sin(tp);
    const double kappa = (rho * rho + 2.0 * d1 * d1 - rho * d2) / std::pow(rho * rho + d1 * d1, 1.5);
    const double R = std::hypot(x, z);
    const double denom = z * dx - x * dz;
    const double R1 = denom == 0.0 ? 0.0 : R * (x * dx + z * dz) / denom;
    const double R2 = (R * R + 2.0 * R1 * R1 - kappa * std::pow(R * R + R1 * R1, 1.5)) / R;
    return Jet{R - 1.0, R1, R2};
  };
}

}  // namespace

ScalarField radial_function_about(const ScalarField& u, const std::vector<double>& center) {
  const SphereGrid& g = u.grid();
  const int a = g.ambient();
  bool on_axis = true;
  for (int c = 0; c + 1 < a; ++c) on_axis = on_axis && center[c] == 0.0;
  if (u.is_zonal() && on_axis) return ScalarField::zonal(u.grid_ptr(), shifted_jet(u.jet(), center[a - 1]));
  if (!u.evaluable()) {
    fail(ErrorKind::capability, "recenter.evaluable", "radial re-extraction needs coefficients or an analytic form");
  }
  if (g.mode() == GridMode::axisymmetric && !on_axis) {
    fail(ErrorKind::precondition, "recenter.axis", "axisymmetric sets can only move along the axis");
  }
  double umax = 0.0;
  for (double v : u.values()) umax = std::max(umax, std::abs(v));
  std::vector<double> rho(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) rho[i] = ray_intersection(u, 2.0 * umax, center, g.node(i)) - 1.0;
  if (g.spectral()) return ScalarField::band_limited(u.grid_ptr(), std::move(rho));
  return ScalarField::from_values(u.grid_ptr(), std::move(rho));
}

RecenterResult recenter(const NormalGraphSet& set, double tol, int max_iter) {
  const int a = set.grid().ambient();
  RecenterResult res;
  res.shift.assign(a, 0.0);
  res.u = set.u();
  NormalGraphSet cur = set;
  for (int it = 0; it <= max_iter; ++it) {
    const auto& b = cur.barycenter();
    res.barycenter_norm = std::sqrt(dotv(b, b));
    res.iterations = it;
    if (res.barycenter_norm <= tol) return res;
    if (it == max_iter) break;
    for (int c = 0; c < a; ++c) res.shift[c] += b[c] / cur.perimeter();
    res.u = radial_function_about(set.u(), res.shift);
    cur = NormalGraphSet::build(res.u, set.margin());
  }
  fail(ErrorKind::convergence, "recenter.barycenter",
       "barycenter norm " + std::to_string(res.barycenter_norm) + " above tolerance after max iterations");
}

ScaledSet enforce_H_le_n(const NormalGraphSet& set) {
  const double s = std::max(set.sup_mean_curvature() / set.dim(), 1.0);
  return ScaledSet{set.u().affine(s, s - 1.0), s};
}

}  // namespace isostab
