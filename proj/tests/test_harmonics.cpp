#include <cmath>
#include <numbers>

#include "doctest.h"
#include "isostab/error.hpp"
#include "isostab/harmonics.hpp"
#include "isostab/sphere_core.hpp"
#include "test_helpers.hpp"

using namespace isostab;
using testing_support::sup_diff;
constexpr double pi = std::numbers::pi;

namespace {

double int_sq(const ScalarField& f) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f[i] * f[i];
  return integrate(f.grid(), v);
}

double int_grad_sq(const ScalarField& f) {
  const TangentField g = gradient(f);
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = g.norm2(i);
  return integrate(f.grid(), v);
}

}  // namespace

TEST_CASE("decompose a constant plus a linear term") {
  auto g = SphereGrid::build(2, 32, GridMode::full);
  auto u = synthesize({{0, 0, true, 0.05}, {1, 0, true, 0.02}}, g);
  const auto d = decompose(u);
  CHECK(d.a == doctest::Approx(0.05).epsilon(1e-13));
  CHECK(std::abs(d.b[0]) <= 1e-14);
  CHECK(std::abs(d.b[1]) <= 1e-14);
  CHECK(d.b[2] == doctest::Approx(0.02).epsilon(1e-13));
  CHECK(norm(d.R, NormKind::sup) <= 1e-14);
}

TEST_CASE("degree-2 zonal is all remainder") {
  auto g = SphereGrid::build(2, 32, GridMode::full);
  auto u = synthesize({{2, 0, true, 0.01}}, g);
  /// natural zonal P_2(z) = (3z^2 - 1)/2
  double worst = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double z = g->node(i)[2];
    worst = std::max(worst, std::abs(u[i] - 0.01 * (1.5 * z * z - 0.5)));
  }
  CHECK(worst <= 1e-15);
  const auto d = decompose(u);
  CHECK(std::abs(d.a) <= 1e-15);
  for (double b : d.b) CHECK(std::abs(b) <= 1e-15);
  CHECK(sup_diff(d.R.values(), u.values()) <= 1e-15);
}

TEST_CASE("synthesize natural bands") {
  auto g = SphereGrid::build(2, 16, GridMode::full);
  auto c = synthesize({{0, 0, true, 0.1}}, g);
  CHECK(sup_diff(c.values(), std::vector<double>(g->size(), 0.1)) <= 1e-15);
  auto z = synthesize({{1, 0, false, 0.02}}, g);
  auto x = synthesize({{1, 1, false, 1.0}}, g);
  auto y = synthesize({{1, -1, false, 1.0}}, g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(z[i] == doctest::Approx(0.02 * g->node(i)[2]).epsilon(1e-13));
    CHECK(std::abs(x[i] - g->node(i)[0]) <= 1e-14);
    CHECK(std::abs(y[i] - g->node(i)[1]) <= 1e-14);
  }
  CHECK_THROWS_AS(synthesize({{40, 0, true, 1.0}}, g), Error);
  /// circle: zonal about e_2 is Chebyshev T_k(x_2)
  auto c1 = SphereGrid::build(1, 64, GridMode::full);
  auto t3 = synthesize({{3, 0, true, 1.0}}, c1);
  for (std::size_t i = 0; i < c1->size(); ++i) {
    const double s = c1->node(i)[1];
    CHECK(t3[i] == doctest::Approx(4 * s * s * s - 3 * s).epsilon(1e-12));
  }
  /// axisymmetric n=4: zonal degree 2 is the Gegenbauer ratio C_2(x)/C_2(1) = ((n+1) x^2 - 1)/n
  auto a = SphereGrid::build(4, 64, GridMode::axisymmetric);
  auto p2 = synthesize({{2, 0, true, 1.0}}, a);
  for (std::size_t i = 0; i < a->size(); ++i) {
    const double xx = a->node(i)[4];
    CHECK(p2[i] == doctest::Approx((5 * xx * xx - 1) / 4).epsilon(1e-12));
  }
}

TEST_CASE("decompose reconstructs random fields and satisfies the averages") {
  for (auto [n, mode, res] : {std::tuple{1, GridMode::full, 128}, std::tuple{2, GridMode::full, 32},
                              std::tuple{3, GridMode::axisymmetric, 96}}) {
    auto g = SphereGrid::build(n, res, mode);
    for (unsigned s = 0; s < 5; ++s) {
      const ScalarField u = random_band_limited(g, 100 + s, 0, 10, 0.1);
      const auto d = decompose(u);
      std::vector<double> rec(g->size());
      for (std::size_t i = 0; i < rec.size(); ++i) {
        double bx = 0.0;
        for (int c = 0; c < g->ambient(); ++c) bx += d.b[c] * g->node(i)[c];
        rec[i] = d.a + bx + d.R[i];
      }
      CHECK(sup_diff(rec, u.values()) <= 1e-9);
      CHECK(std::abs(integrate(d.R)) <= 1e-9);
      for (int c = mode == GridMode::axisymmetric ? n : 0; c < g->ambient(); ++c) {
        std::vector<double> xr(g->size());
        for (std::size_t i = 0; i < xr.size(); ++i) xr[i] = g->node(i)[c] * d.R[i];
        CHECK(std::abs(integrate(*g, xr)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("poincare ratios of pure bands") {
  auto g = SphereGrid::build(2, 32, GridMode::full);
  CHECK(poincare_ratio(synthesize({{2, 1, false, 0.3}}, g)) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(poincare_ratio(synthesize({{3, -2, false, 0.3}, {3, 0, true, 0.1}}, g)) ==
        doctest::Approx(12.0).epsilon(1e-12));
  auto c = SphereGrid::build(1, 128, GridMode::full);
  auto mix = synthesize({{2, 2, false, 0.7}, {5, -5, false, 0.2}}, c);
  /// Rayleigh quotient of the band energies: orthonormal energies are c^2 * pi
  const double e2 = 0.49 * pi, e5 = 0.04 * pi;
  const double r = poincare_ratio(mix);
  CHECK(r == doctest::Approx((4.0 * e2 + 25.0 * e5) / (e2 + e5)).epsilon(1e-12));
  CHECK(r >= 4.0);
  CHECK(r <= 25.0);
  CHECK_THROWS_AS(poincare_ratio(synthesize({{1, 0, true, 0.3}, {2, 0, true, 0.1}}, g)), Error);
  CHECK_THROWS_AS(poincare_ratio(synthesize({}, g)), Error);
}

TEST_CASE("spectral identities on random fields") {
  for (auto [n, mode, res] : {std::tuple{1, GridMode::full, 128}, std::tuple{2, GridMode::full, 32},
                              std::tuple{3, GridMode::axisymmetric, 96}}) {
    auto g = SphereGrid::build(n, res, mode);
    const double S = g->measure();
    for (unsigned s = 0; s < 10; ++s) {
      const ScalarField u = random_band_limited(g, 300 + s, 0, 10, 0.1);
      const auto d = decompose(u);
      double b2 = 0.0;
      for (double b : d.b) b2 += b * b;
      const double u2 = int_sq(u), r2 = int_sq(d.R);
      CHECK(std::abs(u2 - (S * (d.a * d.a + b2 / (n + 1)) + r2)) <= 1e-9 * u2);
      /// |b - (b.x)x|^2 integrates to n |b|^2 S / (n+1)
      const double du2 = int_grad_sq(u), dr2 = int_grad_sq(d.R);
      CHECK(std::abs(du2 - (n * b2 * S / (n + 1) + dr2)) <= 1e-9 * du2);
      CHECK(std::abs((n * u2 - du2) - (n * S * d.a * d.a + n * r2 - dr2)) <= 1e-9 * du2);
      CHECK(poincare_ratio(d.R) >= 2.0 * (n + 1) - 1e-6);
    }
  }
}

TEST_CASE("fuglede bound on the circle and for zero") {
  auto c = SphereGrid::build(1, 256, GridMode::full);
  const double eps = 0.01;
  auto v = synthesize({{1, 1, false, eps}}, c);
  const auto r = fuglede_bound(v);
  CHECK(r.lhs == doctest::Approx(eps).epsilon(1e-12));
  CHECK(r.rhs_raw == doctest::Approx(eps * std::sqrt(pi)).epsilon(1e-12));
  CHECK_FALSE(r.violated);
  CHECK(r.constant >= 1.0 / std::sqrt(pi));
  const auto z = fuglede_bound(synthesize({}, c));
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK_FALSE(z.violated);
  CHECK_THROWS_AS(fuglede_bound(synthesize({{0, 0, true, 0.1}}, c)), Error);
}

TEST_CASE("fuglede calibration is reproducible and holds on fresh samples") {
  for (auto [n, mode, res] : {std::tuple{1, GridMode::full, 256}, std::tuple{2, GridMode::full, 64},
                              std::tuple{3, GridMode::axisymmetric, 200}}) {
    auto g = SphereGrid::build(n, res, mode);
    CHECK(calibrate_fuglede_constant(g, 2024, 100, 8) == doctest::Approx(default_fuglede_constant(n)).epsilon(1e-12));
  }
  auto g = SphereGrid::build(2, 64, GridMode::full);
  int violations = 0;
  for (unsigned s = 0; s < 100; ++s) {
    const auto r = fuglede_bound(random_band_limited(g, 9000 + s, 1, 8, 0.01));
    violations += r.violated ? 1 : 0;
  }
  CHECK(violations == 0);
}
