#include <cmath>
#include <numbers>

#include "doctest.h"
#include "isostab/axisym.hpp"
#include "isostab/error.hpp"
#include "isostab/graph_geometry.hpp"
#include "isostab/quadrature.hpp"

using namespace isostab;
constexpr double pi = std::numbers::pi;

namespace {

double sup_dev(const std::vector<double>& v, double c, std::size_t skip_ends = 0) {
  double m = 0.0;
  for (std::size_t i = skip_ends; i + skip_ends < v.size(); ++i) m = std::max(m, std::abs(v[i] - c));
  return m;
}

AxisymProfile cap(int n, double rho, double r_max, int samples) {
  return AxisymProfile::graph_function(
      n,
      [rho](double r) {
        const double q = std::sqrt(rho * rho - r * r);
        return Jet{q, -r / q, -rho * rho / (q * q * q)};
      },
      r_max, samples);
}

std::function<Jet(double)> dented_circle(double depth, double width) {
  return [=](double t) {
    const Jet b = dent_shape((t - 0.5 * pi) / width);
    return Jet{1.0 - depth * b.f, -depth * b.df / width, -depth * b.d2f / (width * width)};
  };
}

}  // namespace

TEST_CASE("revolution mean curvature examples") {
  for (int n : {1, 2, 3, 5}) {
    CHECK(sup_dev(revolution_mean_curvature(cap(n, 1.0, 0.9, 200)), n) <= 1e-12);
    CHECK(sup_dev(revolution_mean_curvature(cap(n, 1.7, 1.5, 200)), n / 1.7) <= 1e-12);
    const auto flat = AxisymProfile::graph_function(n, [](double) { return Jet{0.3, 0.0, 0.0}; }, 1.0, 50);
    CHECK(sup_dev(revolution_mean_curvature(flat), 0.0) == 0.0);
    CHECK(sup_dev(revolution_mean_curvature(sphere_profile(n, 0.8, 301)), n / 0.8) <= 1e-12);
  }
  const auto cone = AxisymProfile::graph_function(2, [](double r) { return Jet{1.0 - r, -1.0, 0.0}; }, 1.0, 20);
  CHECK_THROWS_AS(revolution_mean_curvature(cone), Error);
}

TEST_CASE("graph and curve forms round trip") {
  const auto g = cap(3, 1.2, 1.0, 101);
  const auto c = g.to_curve();
  CHECK(c.form() == AxisymProfile::Form::curve);
  const auto back = c.to_graph();
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(back.points()[i].r - g.points()[i].r) <= 1e-12);
    CHECK(std::abs(back.points()[i].z - g.points()[i].z) <= 1e-12);
    CHECK(std::abs(back.points()[i].dz - g.points()[i].dz) <= 1e-9);
    CHECK(std::abs(back.points()[i].ddz - g.points()[i].ddz) <= 1e-9);
  }
  const auto hg = revolution_mean_curvature(g), hc = revolution_mean_curvature(c);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(hg[i] - hc[g.size() - 1 - i]) <= 1e-12);
  CHECK_THROWS_AS(sphere_profile(2, 1.0, 64).to_graph(), Error);
}

TEST_CASE("revolution functionals") {
  const auto s2 = revolution_functionals(sphere_profile(2, 1.0, 129));
  CHECK(s2.perimeter == doctest::Approx(4.0 * pi).epsilon(1e-12));
  CHECK(s2.volume == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-12));
  CHECK(s2.diameter == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s2.perimeter_error <= 1e-10 * s2.perimeter);
  const auto s3 = revolution_functionals(sphere_profile(3, 1.0, 129));
  CHECK(s3.perimeter == doctest::Approx(2.0 * pi * pi).epsilon(1e-12));
  CHECK(s3.volume == doctest::Approx(pi * pi / 2.0).epsilon(1e-12));
  for (double t : {1e-3, 0.1}) {
    for (int n : {2, 3, 4}) {
      const auto f = revolution_functionals(sphere_profile(n, 1.0 + t, 129));
      CHECK(f.perimeter == doctest::Approx(std::pow(1.0 + t, n) * sphere_measure(n)).epsilon(1e-12));
    }
  }
  /// samples only: Gregory-corrected trapezoid
  std::vector<double> r, z;
  for (int i = 0; i <= 400; ++i) {
    const double s = pi * i / 400;
    r.push_back(std::sin(s));
    z.push_back(-std::cos(s));
  }
  r.front() = r.back() = 0.0;
  const auto samp = AxisymProfile::curve_samples(2, r, z);
  CHECK(revolution_functionals(samp).perimeter == doctest::Approx(4.0 * pi).epsilon(1e-8));
  CHECK(sup_dev(revolution_mean_curvature(samp), 2.0) <= 1e-6);
  CHECK_THROWS_AS(revolution_functionals(cap(2, 1.0, 0.9, 50)), Error);
}

TEST_CASE("cross-module curvature consistency") {
  auto jet = [](double t) {
    const double x = std::cos(t), s = std::sin(t);
    const double f = 0.02 * (1.5 * x * x - 0.5) + 0.01 * x;
    const double dfdx = 0.06 * x + 0.01;
    return Jet{f, -s * dfdx, s * s * 0.06 - x * dfdx};
  };
  for (int n : {2, 3}) {
    const auto p = zonal_profile(n, jet, 301);
    const auto H = revolution_mean_curvature(p);
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
      const double theta = pi - p.params()[i];
      m = std::max(m, std::abs(H[i] - zonal_mean_curvature(n, theta, jet(theta))));
    }
    CHECK(m <= 1e-6);
    auto g = SphereGrid::build(n, 200, GridMode::axisymmetric);
    const auto set = NormalGraphSet::build(ScalarField::zonal(g, jet));
    const auto f = revolution_functionals(p);
    CHECK(f.perimeter == doctest::Approx(set.perimeter()).epsilon(1e-10));
    CHECK(f.volume == doctest::Approx(set.volume()).epsilon(1e-10));
  }
}

TEST_CASE("convex envelope of convex sets") {
  const auto circle = PlanarRegion::make(PlanarCurve::circle(0.2, -0.1, 1.0, 256));
  const auto e = convex_envelope(circle);
  for (char c : e.contact_mask) CHECK(c == 1);
  CHECK(e.off_contact_measure == 0.0);
  CHECK(std::abs(e.gauss_total - 2.0 * pi) <= 1e-6);
  for (int n : {1, 2, 3}) {
    const auto s = convex_envelope(sphere_profile(n, 1.3, 257));
    CHECK(s.off_contact_measure == 0.0);
    CHECK(std::abs(s.gauss_total - sphere_measure(n)) <= 1e-3 * sphere_measure(n));
  }
  CHECK_THROWS_AS(convex_envelope(PlanarRegion::make(PlanarCurve::circle(0, 0, 1, 32))), Error);
}

TEST_CASE("convex envelope of dented sets") {
  const auto coarse = convex_envelope(PlanarRegion::make(PlanarCurve::polar(dented_circle(0.2, 0.6), 512)));
  const auto fine = convex_envelope(PlanarRegion::make(PlanarCurve::polar(dented_circle(0.2, 0.6), 5120)));
  CHECK(coarse.off_contact_measure > 0.0);
  CHECK(coarse.off_contact_measure == doctest::Approx(fine.off_contact_measure).epsilon(1e-3));
  CHECK(std::abs(coarse.gauss_total - 2.0 * pi) <= 1e-3 * 2.0 * pi);
  /// dented sphere: the off-contact band is a ring
  for (int n : {2, 3}) {
    const auto d = convex_envelope(dented_sphere_profile(n, 0.1, 0.5, 801));
    CHECK(d.off_contact_measure > 0.0);
    CHECK(std::abs(d.gauss_total - sphere_measure(n)) <= 1e-3 * sphere_measure(n));
  }
  const auto axis_total = convex_envelope(dented_sphere_profile(1, 0.1, 0.5, 801)).gauss_total;
  CHECK(std::abs(axis_total - 2.0 * pi) <= 1e-3 * 2.0 * pi);
}

TEST_CASE("self-intersecting input is rejected") {
  const auto eight = PlanarCurve::from_function(
      [](double t) {
        return CurvePoint{std::sin(t), std::sin(t) * std::cos(t), std::cos(t), std::cos(2 * t), -std::sin(t),
                          -2 * std::sin(2 * t)};
      },
      256);
  CHECK_THROWS_AS(PlanarRegion::make(eight), Error);
  CHECK_THROWS_AS(PlanarRegion::make(PlanarCurve::circle(0, 0, 1, 128), {PlanarCurve::circle(0.9, 0, 0.3, 128)}),
                  Error);
  CHECK_THROWS_AS(PlanarRegion::make(PlanarCurve::circle(0, 0, 1, 128), {PlanarCurve::circle(3, 0, 0.3, 128)}),
                  Error);
}

TEST_CASE("Almgren identity: closed forms") {
  const auto disk = almgren_identity_terms(PlanarRegion::make(PlanarCurve::circle(0, 0, 1.5, 1024)));
  CHECK(disk.t1 == 0.0);
  CHECK(std::abs(disk.t2 - pi) <= 1e-6);
  CHECK(std::abs(disk.t3) <= 1e-6);
  CHECK(std::abs(disk.lhs - pi) <= 1e-6);
  CHECK(std::abs(disk.residual) <= 1e-6);
  for (int n : {2, 3}) {
    const auto b = almgren_identity_terms(sphere_profile(n, 1.0, 401));
    CHECK(std::abs(b.lhs) <= 1e-10);
    CHECK(b.t1 == 0.0);
    CHECK(std::abs(b.t2) <= 1e-10);
    CHECK(std::abs(b.t3) <= 1e-10);
    CHECK(std::abs(b.residual) <= 1e-6);
  }
}

TEST_CASE("Almgren identity: dented sphere") {
  const auto base = dented_sphere_profile(2, 0.1, 0.5, 801);
  const auto sc = enforce_H_le_n(base);
  CHECK(sc.scale > 1.0);
  const auto a = almgren_identity_terms(sc.profile);
  CHECK(a.h_le_n);
  CHECK(a.t1 > 0.0);
  CHECK(std::abs(a.residual) <= 1e-3 * a.lhs);
  CHECK(a.t2 >= -1e-6 * a.perimeter);
  CHECK(a.t3 >= -1e-6 * a.perimeter);
  const auto f = almgren_identity_terms(enforce_H_le_n(dented_sphere_profile(2, 0.1, 0.5, 1601)).profile);
  CHECK(std::abs(f.residual) <= 0.5 * std::abs(a.residual));
  CHECK(f.lhs == doctest::Approx(a.lhs).epsilon(1e-12));
  /// AM-GM on the contact set
  const auto H = revolution_mean_curvature(sc.profile);
  double worst = 0.0;
  for (std::size_t i = 0; i < H.size(); ++i) {
    if (a.envelope.contact_share[i] > 0.0) {
      worst = std::min(worst, std::pow(H[i] / 2.0, 2) - a.envelope.gauss_curvature[i]);
    }
  }
  CHECK(worst >= -1e-9);
  /// n = 3 sign structure
  const auto a3 = almgren_identity_terms(enforce_H_le_n(dented_sphere_profile(3, 0.1, 0.5, 801)).profile);
  CHECK(a3.t2 >= -1e-6 * a3.perimeter);
  CHECK(a3.t3 >= -1e-6 * a3.perimeter);
  CHECK(std::abs(a3.residual) <= 1e-3 * a3.lhs);
}

TEST_CASE("enforce H <= n on profiles") {
  const auto same = enforce_H_le_n(sphere_profile(2, 1.0, 101));
  CHECK(same.scale == doctest::Approx(1.0).epsilon(1e-14));
  const auto small = enforce_H_le_n(sphere_profile(3, 0.9, 101));
  CHECK(small.scale == doctest::Approx(1.0 / 0.9).epsilon(1e-12));
  CHECK(sup_dev(revolution_mean_curvature(small.profile), 3.0) <= 1e-10);
}

TEST_CASE("planar structure") {
  const auto plain = planar_structure(PlanarRegion::make(PlanarCurve::circle(0, 0, 1, 512)));
  CHECK(plain.hole_area == 0.0);
  CHECK(plain.perimeter_ratio == 0.0);
  CHECK(plain.area_ratio_sq == 0.0);
  const double rho = 0.05;
  const auto one = planar_structure(
      PlanarRegion::make(PlanarCurve::circle(0, 0, 1, 512), {PlanarCurve::circle(0.3, 0.2, rho, 256)}));
  CHECK(std::abs(one.hole_perimeter - 2.0 * pi * rho) <= 1e-12);
  CHECK(std::abs(one.hole_area - pi * rho * rho) <= 1e-12);
  CHECK(std::abs(one.delta - 2.0 * pi * rho) <= 1e-12);
  CHECK(std::abs(one.area_ratio_sq - 1.0 / (4.0 * pi)) <= 1e-6);
  CHECK(one.hypothesis_ok);
  CHECK(one.omega_star.holes().empty());
  const auto three = planar_structure(PlanarRegion::make(
      PlanarCurve::circle(0, 0, 1, 512), {PlanarCurve::circle(0.5, 0, 0.1, 128), PlanarCurve::circle(-0.4, 0.3, 0.05, 128),
                                          PlanarCurve::circle(0, -0.5, 0.2, 128)}));
  CHECK(std::abs(three.hole_perimeter - three.delta) <= 1e-9);
  CHECK(three.perimeter_ratio == doctest::Approx(1.0).epsilon(1e-12));
  const double area = pi * (0.01 + 0.0025 + 0.04), per = 2.0 * pi * 0.35;
  CHECK(std::abs(three.area_ratio_sq - area / (per * per)) <= 1e-6);
}
