#include <cmath>
#include <numbers>

#include "doctest.h"
#include "isostab/error.hpp"
#include "isostab/graph_geometry.hpp"
#include "isostab/quadrature.hpp"
#include "isostab/sharp_family.hpp"

using namespace isostab;

namespace {

std::string invariant_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.invariant();
  }
  return "";
}

std::vector<double> decades(double lo, double hi, int count) {
  std::vector<double> ts;
  for (int i = 0; i < count; ++i) ts.push_back(lo * std::pow(hi / lo, i / (count - 1.0)));
  return ts;
}

double central(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("derived radius r1") {
  const auto p3 = derive_params(3, 20, 0.04, 5e-5, 2e-3);
  CHECK(p3.r1 == doctest::Approx(std::sqrt(0.025) * std::pow(0.04, 1.5)).epsilon(1e-14));
  CHECK(p3.r1 == doctest::Approx(1.2649e-3).epsilon(1e-4));
  const auto p2 = derive_params(2, 20, 0.04, 5e-5, 2e-3);
  CHECK(p2.r1 == doctest::Approx(4e-5).epsilon(1e-13));
  CHECK(std::isnan(p2.mu));
}

TEST_CASE("parameter window") {
  CHECK(invariant_of([] { derive_params(3, 20, 0.06, 5e-5, 2e-3); }) == "sharp.window.r0_lt_inv_K");
  CHECK(invariant_of([] { derive_params(3, 20, 0.04, 5e-5, 3e-3); }) == "sharp.window.sigma_lt_inv_K2");
  CHECK(invariant_of([] { derive_params(3, 20, 0.04, 8e-5, 2e-3); }) == "sharp.window.t_over_r0_lt_sigma");
  CHECK(invariant_of([] { derive_params(1, 20, 0.04, 5e-5, 2e-3); }) == "sharp.window.n");
  CHECK(invariant_of([] { derive_params(3, 20, 0.04, 0.0, 2e-3); }) == "sharp.window.t_positive");
  CHECK(invariant_of([] { derive_params(3, 20, 0.04, 2e-3 * 0.04, 2e-3); }) == "sharp.window.t_over_r0_lt_sigma");
  /// At the boundary t = sigma r0 the radius r1 tends to r0^{(n+1)/(n-1)}, still inside (0, r0).
  for (int n : {2, 3, 5}) {
    const auto near = derive_params(n, 20, 0.04, (1.0 - 1e-12) * 2e-3 * 0.04, 2e-3);
    CHECK(near.r1 == doctest::Approx(std::pow(0.04, (n + 1.0) / (n - 1.0))).epsilon(1e-10));
    CHECK(near.r1 < near.r0);
  }
}

TEST_CASE("h profile") {
  for (int n : {2, 3, 4}) {
    const auto p = derive_params(n, 20, 0.04, 5e-5, 2e-3);
    const HProfile h = HProfile::build(p);
    CHECK(h.h(p.r0) == 0.0);
    CHECK(std::abs(h.dh(p.r0)) <= 1e-10);
    CHECK(h.analytic_second_derivative());
    CHECK(h.quadrature_error() <= 1e-12 * h.values().front());
    CHECK(h.values().size() == h.radii().size());
    /// h is the integral of h'; h'' is the derivative of h'.
    for (double f : {0.002, 0.05, 0.3, 0.9}) {
      const double r = p.r1 + f * (p.r0 - p.r1);
      const double step = 1e-4 * r;
      const auto H = [&h](double x) { return h.h(x); };
      const auto D = [&h](double x) { return h.dh(x); };
      CHECK(central(H, r, step) == doctest::Approx(h.dh(r)).epsilon(1e-7));
      CHECK(central(D, r, step) == doctest::Approx(h.d2h(r)).epsilon(1e-7));
    }
    const auto d1 = h.derivatives(), d2 = h.second_derivatives();
    for (std::size_t i = 0; i + 1 < d1.size(); ++i) {
      CHECK(d1[i] < 0.0);
      CHECK(d2[i] > 0.0);
      CHECK(h.values()[i] > h.values()[i + 1]);
    }
  }
}

TEST_CASE("h leading behaviour") {
  const int n = 3;
  const double K = 20, r0 = 0.04, t = 5e-5, sigma = 2e-3;
  const HProfile h = HProfile::build(derive_params(n, K, r0, t, sigma));
  const double A = (n + 5.0) / (n - 2.0) * t * K * K;
  const double B = (n + 1.0) / (2.0 * n - 2.0) * t * t * K * K * K;
  for (double r : {2e-3, 4e-3, 1e-2}) {
    const double lead = -std::pow(r0, n) / std::pow(r, n - 1);
    const double bound = std::pow(r / r0, n) + A * std::pow(r0, n) / std::pow(r, n - 2) +
                         B * std::pow(r0, 2 * n) / std::pow(r, 2 * n - 2) + 2.0 * r * r;
    CHECK(std::abs(h.dh(r) / lead - 1.0) <= bound);
  }
  /// n = 2 carries the logarithmic correction.
  const auto p2 = derive_params(2, K, r0, t, sigma);
  const HProfile h2 = HProfile::build(p2);
  for (double r : {1e-4, 1e-3, 1e-2}) {
    const double w = std::pow(1.0 - r * r, 1.5);
    const double base = r0 * r0 / r - r - 1.5 * t * t * K * K * K * (std::pow(r0, 6) / std::pow(r, 3) - std::pow(r0, 4) / r);
    const double log_term = 7.0 * t * K * K * std::pow(r0, 4) / r * std::log(r0 / r);
    CHECK(h2.dh(r) == doctest::Approx(-(base - log_term) / w).epsilon(1e-13));
    CHECK(std::abs(h2.dh(r) + base / w) >= 0.5 * log_term);
  }
}

TEST_CASE("validation gate") {
  const auto p = derive_params(3, 20, 0.04, 5e-5, 2e-3);
  const HValidation v = validate_h(HProfile::build(p));
  CHECK(v.passed);
  CHECK(v.first_failure.empty());
  for (const char* name : {"h_at_r0", "ny3", "ny3_three_sigma", "ny4_lower", "ny4_upper", "ny5_lower", "ny5_upper",
                           "h_decreasing", "h_convex", "h_fund_soln", "h_prime_small", "admissible"}) {
    const auto* c = v.find(name);
    REQUIRE(c != nullptr);
    CHECK(c->passed);
    CHECK(c->gating);
  }
  CHECK(v.sup_H_scaled <= 3.0 + 1e-8);
  for (double t : decades(1e-10, 1e-8, 6)) {
    for (int n : {2, 3}) CHECK(validate_h(HProfile::build(derive_params(n, 16, 0.06, t, 3.9e-3))).passed);
  }
  const HValidation printed = validate_h(HProfile::build(p, HDerivativeForm::as_printed));
  CHECK_FALSE(printed.passed);
  CHECK(printed.first_failure == "admissible");
  CHECK(printed.sup_H_scaled > 3.0 + 1e-8);
}

TEST_CASE("validation reports the first failing inequality") {
  /// Admissible window, but t |h'(r1)| exceeds 3 sigma once sigma is close to 1/K^2.
  const auto p = derive_params(3, 4, 0.2, 0.01, 0.06);
  const HValidation v = validate_h(HProfile::build(p));
  CHECK_FALSE(v.passed);
  CHECK_FALSE(v.first_failure.empty());
  const auto* c = v.find(v.first_failure);
  REQUIRE(c != nullptr);
  CHECK(c->margin < 0.0);
  bool earlier_ok = true;
  for (const auto& k : v.checks) {
    if (k.name == v.first_failure) break;
    earlier_ok = earlier_ok && (k.passed || !k.gating);
  }
  CHECK(earlier_ok);
}

TEST_CASE("sharp set geometry") {
  for (int n : {2, 3}) {
    for (double t : {1e-10, 1e-8}) {
      const auto p = derive_params(n, 16, 0.06, t, 3.9e-3);
      const HProfile h = HProfile::build(p);
      const SharpSet s = build_sharp_set(h);
      CAPTURE(n);
      CAPTURE(t);
      CHECK(std::max({s.seam_r1_value, s.seam_r1_slope, s.seam_r0_value, s.seam_r0_slope}) <= 1e-9);
      CHECK(s.sup_H <= n + 1e-8);
      CHECK(s.u_plus_c0 == t);
      CHECK(s.u_c0 == std::max(t, 1.0 - (1.0 + t) * s.phi_at_zero));
      CHECK(std::abs(s.params.mu - s.mu_expansion) <= 10.0 * std::pow(t / p.sigma, 1.0 / (n - 1)));
      /// Deficit from the profile integrals agrees with the normal-graph quadrature.
      CHECK(std::abs(s.delta - s.set->deficit()) <= 1e-6 * s.delta);
      double umax = -1.0, umin = 1.0;
      for (double v : s.u.values()) umax = std::max(umax, v), umin = std::min(umin, v);
      CHECK(umax == doctest::Approx(t).epsilon(1e-14));
      const ZonalFunction& jet = s.u.jet();
      CHECK(jet(0.0).f == doctest::Approx(-s.u_minus_c0).epsilon(1e-12));
      CHECK(umin >= jet(0.0).f - 1e-18);
      if (n == 3) CHECK(s.u_c0 == doctest::Approx(s.u_minus_c0).epsilon(1e-15));
    }
  }
}

TEST_CASE("radial jet of the sharp set") {
  for (int n : {2, 3}) {
    const double t = 1e-8;
    const auto p = derive_params(n, 16, 0.06, t, 3.9e-3);
    const HProfile h = HProfile::build(p);
    const ZonalFunction jet = sharp_radial_jet(h);
    const double theta0 = std::asin(p.r0);
    const double theta1 = sharp_polar_angle(h, p.r1);
    /// Continuity of value and slope across the seams.
    for (double th : {theta0, theta1}) {
      const double e = 1e-9 * th;
      const Jet a = jet(th - e), b = jet(th + e);
      CHECK(std::abs(a.f - b.f) <= 1e-15);
      CHECK(std::abs(a.df - b.df) <= 1e-6 * std::max(std::abs(a.df), t));
    }
    /// Derivatives against differences, and curvature against the profile formula.
    for (double th : {0.3 * theta1, 0.8 * theta1, 2.0 * theta1, std::sqrt(theta1 * theta0), 0.7 * theta0}) {
      const double e = 1e-4 * th;
      const auto F = [&jet](double x) { return jet(x).f; };
      const auto D = [&jet](double x) { return jet(x).df; };
      const Jet j = jet(th);
      CHECK(central(F, th, e) == doctest::Approx(j.df).epsilon(1e-6));
      CHECK(central(D, th, e) == doctest::Approx(j.d2f).epsilon(1e-6));
    }
    for (double f : {0.01, 0.2, 0.7}) {
      const double r = p.r1 + f * (p.r0 - p.r1);
      const double phi1 = -r / std::sqrt(1.0 - r * r) - t * h.dh(r);
      const double phi2 = -std::pow(1.0 - r * r, -1.5) - t * h.d2h(r);
      const double q = 1.0 + phi1 * phi1;
      const double H = -phi2 / std::pow(q, 1.5) - (n - 1) * phi1 / (r * std::sqrt(q));
      const double th = sharp_polar_angle(h, r);
      CHECK(zonal_mean_curvature(n, th, jet(th)) == doctest::Approx(H / (1.0 + t)).epsilon(1e-9));
    }
    /// The spherical part has H = n after scaling by 1 + t.
    for (double th : {1.1 * theta0, 1.0, 2.5}) CHECK(zonal_mean_curvature(n, th, jet(th)) == doctest::Approx(n / (1.0 + t)));
    /// The cap has constant negative curvature.
    CHECK(zonal_mean_curvature(n, 0.5 * theta1, jet(0.5 * theta1)) < 0.0);
  }
}

TEST_CASE("deficit in the small-t limit") {
  for (int n : {2, 3}) {
    const double t = 1e-10;
    const HProfile h = HProfile::build(derive_params(n, 16, 0.06, t, 3.9e-3));
    const double d = sharp_deficit(h);
    CHECK(d > 0.0);
    CHECK(d / t == doctest::Approx(n * sphere_measure(n)).epsilon(1e-6));
    CHECK(d < std::expm1(n * std::log1p(t)) * sphere_measure(n));
  }
}

TEST_CASE("sharpness sweep n = 3") {
  const auto ts = decades(1e-10, 1e-8, 6);
  const SweepResult r = sharpness_sweep(3, 16, 0.06, 3.9e-3, ts);
  CHECK(r.all_valid);
  REQUIRE(r.rows.size() == ts.size());
  CHECK(r.slope >= 0.40);
  CHECK(r.slope <= 0.60);
  CHECK(r.delta_over_t_spread <= 3.0);
  CHECK(r.ratio_spread <= 3.0);
  for (const auto& row : r.rows) {
    CHECK(row.valid);
    CHECK(row.sup_H <= 3.0 + 1e-8);
    CHECK(row.ratio > 0.0);
  }
}

TEST_CASE("sharpness sweep n = 2") {
  const auto ts = decades(1e-10, 1e-8, 6);
  const SweepResult r = sharpness_sweep(2, 16, 0.06, 3.9e-3, ts);
  CHECK(r.all_valid);
  CHECK(r.ratio_spread <= 3.0);
  CHECK(r.delta_over_t_spread <= 3.0);
  /// The dimple depth relative to t grows like log(1/t).
  for (std::size_t i = 0; i + 1 < r.rows.size(); ++i) {
    CHECK(r.rows[i].u_minus_c0 / r.rows[i].t > r.rows[i + 1].u_minus_c0 / r.rows[i + 1].t);
  }
}

TEST_CASE("sweep preconditions and choice of K") {
  CHECK(invariant_of([] { sharpness_sweep(3, 16, 0.06, 3.9e-3, decades(1e-10, 1e-8, 4)); }) == "sweep.count");
  CHECK(invariant_of([] { sharpness_sweep(3, 16, 0.06, 3.9e-3, decades(1e-10, 1e-9, 6)); }) == "sweep.span");
  CHECK(invariant_of([] { sharpness_sweep(3, 16, 0.06, 3.9e-3, decades(1e-6, 1e-3, 6)); }) ==
        "sharp.window.t_over_r0_lt_sigma");
  CHECK(choose_K(3, 0.06, 3.9e-3, decades(1e-10, 1e-8, 6)) == 16.0);
  CHECK(choose_K(3, 0.02, 1e-4, decades(1e-10, 1e-8, 6)) >= 16.0);
  CHECK(invariant_of([] { choose_K(3, 0.06, 3.9e-3, decades(1e-12, 1e-10, 6)); }) == "sharp.choose_K");
}
