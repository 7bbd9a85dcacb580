#include <cmath>
#include <numbers>

#include "doctest.h"
#include "isostab/error.hpp"
#include "isostab/kernels.hpp"
#include "isostab/quadrature.hpp"
#include "isostab/sphere_core.hpp"
#include "test_helpers.hpp"

using namespace isostab;
using testing_support::random_coeffs;
using testing_support::sup_diff;
constexpr double pi = std::numbers::pi;

namespace {
double sum(const std::vector<double>& v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  return s.value();
}

ScalarField coordinate(const GridPtr& g, int c) {
  return ScalarField::from_function(g, [c](std::span<const double> x) { return x[c]; });
}
}  // namespace

TEST_CASE("gauss legendre integrates polynomials") {
  const GaussRule r = gauss_legendre(12);
  double s = 0.0;
  for (int i = 0; i < 12; ++i) s += r.weights[i] * std::pow(r.nodes[i], 22);
  CHECK(s == doctest::Approx(2.0 / 23.0).epsilon(1e-14));
  CHECK(sphere_measure(3) == doctest::Approx(2.0 * pi * pi).epsilon(1e-15));
  CHECK(ball_volume(3) == doctest::Approx(pi * pi / 2.0).epsilon(1e-15));
}

TEST_CASE("grid weights sum to the sphere measure") {
  auto g1 = SphereGrid::build(1, 256, GridMode::full);
  CHECK(g1->size() == 256);
  CHECK(std::abs(sum(g1->weights()) - 2.0 * pi) / (2.0 * pi) <= 1e-12);
  auto g2 = SphereGrid::build(2, 64, GridMode::full);
  CHECK(g2->size() == 64 * 128);
  CHECK(std::abs(sum(g2->weights()) - 4.0 * pi) / (4.0 * pi) <= 1e-10);
  auto g3 = SphereGrid::build(3, 200, GridMode::axisymmetric);
  CHECK(std::abs(sum(g3->weights()) - 2.0 * pi * pi) / (2.0 * pi * pi) <= 1e-10);
  for (const auto& g : {g1, g2, g3}) {
    double worst = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      double s = 0.0;
      for (double c : g->node(i)) s += c * c;
      worst = std::max(worst, std::abs(std::sqrt(s) - 1.0));
    }
    CHECK(worst <= 1e-14);
    CHECK(g->band_limit() >= 2);
  }
}

TEST_CASE("unsupported grids are rejected") {
  CHECK_THROWS_AS(SphereGrid::build(3, 32, GridMode::full), Error);
  CHECK_THROWS_AS(SphereGrid::build(2, 4, GridMode::full), Error);
  try {
    SphereGrid::build(3, 32, GridMode::full);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::capability);
  }
}

TEST_CASE("integrate simple functions") {
  auto g = SphereGrid::build(2, 32, GridMode::full);
  CHECK(integrate(ScalarField::from_values(g, std::vector<double>(g->size(), 1.0))) ==
        doctest::Approx(4.0 * pi).epsilon(1e-12));
  auto z = coordinate(g, 2);
  std::vector<double> z2(g->size());
  for (std::size_t i = 0; i < z2.size(); ++i) z2[i] = z[i] * z[i];
  CHECK(integrate(*g, z2) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-12));
  CHECK(std::abs(integrate(z)) <= 1e-12);
}

TEST_CASE("quadrature exactness for polynomials up to design degree") {
  auto g = SphereGrid::build(2, 20, GridMode::full);
  for (int k = 0; k <= 19; ++k) {
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(g->node(i)[2], 2 * k);
    CHECK(integrate(*g, v) == doctest::Approx(4.0 * pi / (2 * k + 1)).epsilon(1e-10));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(g->node(i)[0], 2 * k);
    CHECK(integrate(*g, v) == doctest::Approx(4.0 * pi / (2 * k + 1)).epsilon(1e-10));
  }
  auto c = SphereGrid::build(1, 64, GridMode::full);
  for (int k = 0; k <= 20; ++k) {
    std::vector<double> v(c->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(c->node(i)[0], 2 * k);
    const double exact = 2.0 * pi * std::exp(std::lgamma(2 * k + 1.0) - 2 * std::lgamma(k + 1.0)) / std::pow(4.0, k);
    CHECK(integrate(*c, v) == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("gradient of linear and constant fields") {
  auto g = SphereGrid::build(2, 32, GridMode::full);
  const double e[3] = {0.3, -0.5, 0.8};
  auto u = ScalarField::band_limited(
      g, ScalarField::from_function(g, [&](std::span<const double> x) { return e[0] * x[0] + e[1] * x[1] + e[2] * x[2]; })
             .values());
  const TangentField du = gradient(u);
  double worst = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto x = g->node(i);
    const double xe = e[0] * x[0] + e[1] * x[1] + e[2] * x[2];
    for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(du.at(i)[c] - (e[c] - xe * x[c])));
  }
  CHECK(worst <= 1e-9);
  CHECK(du.max_normal_component() <= 1e-10);
  auto k = ScalarField::band_limited(g, std::vector<double>(g->size(), 0.7));
  const TangentField dk = gradient(k);
  double m = 0.0;
  for (double v : dk.data()) m = std::max(m, std::abs(v));
  CHECK(m <= 1e-12);
}

TEST_CASE("degree-2 zonal harmonic energy") {
  auto g = SphereGrid::build(2, 32, GridMode::full);
  auto u = ScalarField::band_limited(g, ScalarField::from_function(g, [](std::span<const double> x) {
                                          return 1.5 * x[2] * x[2] - 0.5;
                                        }).values());
  const TangentField du = gradient(u);
  std::vector<double> g2(g->size()), u2(g->size());
  for (std::size_t i = 0; i < g->size(); ++i) {
    g2[i] = du.norm2(i);
    u2[i] = u[i] * u[i];
  }
  CHECK(integrate(*g, g2) == doctest::Approx(6.0 * integrate(*g, u2)).epsilon(1e-12));
  /// closed form: int P2^2 = 4 pi / 5
  CHECK(integrate(*g, u2) == doctest::Approx(4.0 * pi / 5.0).epsilon(1e-12));
}

TEST_CASE("laplace-beltrami eigenfunctions") {
  for (auto [n, mode, res] : {std::tuple{1, GridMode::full, 64}, std::tuple{2, GridMode::full, 24},
                              std::tuple{3, GridMode::axisymmetric, 40}, std::tuple{5, GridMode::axisymmetric, 40}}) {
    auto g = SphereGrid::build(n, res, mode);
    auto u = ScalarField::band_limited(g, coordinate(g, n).values());
    const ScalarField lu = laplace_beltrami(u);
    std::vector<double> expect(g->size());
    for (std::size_t i = 0; i < expect.size(); ++i) expect[i] = -n * g->node(i)[n];
    CHECK(sup_diff(lu.values(), expect) <= 1e-8);
    auto c = ScalarField::band_limited(g, std::vector<double>(g->size(), 2.0));
    CHECK(sup_diff(laplace_beltrami(c).values(), std::vector<double>(g->size(), 0.0)) <= 1e-10);
  }
  auto g = SphereGrid::build(2, 24, GridMode::full);
  auto u = ScalarField::band_limited(g, ScalarField::from_function(g, [](std::span<const double> x) {
                                          return x[0] * x[1] + 0.2 * (x[2] * x[2] - x[0] * x[0]);
                                        }).values());
  std::vector<double> expect(g->size());
  for (std::size_t i = 0; i < expect.size(); ++i) expect[i] = -6.0 * u[i];
  CHECK(sup_diff(laplace_beltrami(u).values(), expect) <= 1e-10);
}

TEST_CASE("norms on simple fields") {
  auto g = SphereGrid::build(2, 32, GridMode::full);
  auto c = ScalarField::band_limited(g, std::vector<double>(g->size(), 0.05));
  CHECK(norm(c, NormKind::L1) == doctest::Approx(0.05 * 4.0 * pi).epsilon(1e-12));
  CHECK(norm(c, NormKind::sup) == doctest::Approx(0.05).epsilon(1e-12));
  auto z = ScalarField::band_limited(g, coordinate(g, 2).values());
  const double l2 = norm(z, NormKind::L2);
  CHECK(l2 * l2 == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-12));
  const double w = norm(z, NormKind::W12);
  CHECK(w * w == doctest::Approx(4.0 * pi).epsilon(1e-12));
  CHECK(norm(z, NormKind::C1) == doctest::Approx(2.0).epsilon(1e-2));
  /// W11 of a constant is its L1
  CHECK(norm(c, NormKind::W11) == doctest::Approx(0.05 * 4.0 * pi).epsilon(1e-10));
}

TEST_CASE("holder surrogate of a linear field on the circle") {
  auto g = SphereGrid::build(1, 128, GridMode::full);
  auto u = coordinate(g, 0);
  const double h1 = holder_seminorm(u, 1.0);
  CHECK(h1 <= 1.0 + 1e-12);
  CHECK(h1 >= 0.99);
  CHECK(holder_seminorm(u, 0.5) < h1);
  CHECK_THROWS_AS(holder_seminorm(u, 0.5, 1e-6), Error);
}

TEST_CASE("spectral round trip and kernel agreement") {
  for (auto [n, mode, res] : {std::tuple{1, GridMode::full, 64}, std::tuple{2, GridMode::full, 20},
                              std::tuple{3, GridMode::axisymmetric, 48}, std::tuple{1, GridMode::axisymmetric, 48}}) {
    auto g = SphereGrid::build(n, res, mode);
    const auto c = random_coeffs(*g, 7u + n, g->band_limit());
    const auto v_par = kernels::parallel::synthesize(*g, c);
    const auto v_ref = kernels::reference::synthesize(*g, c);
    CHECK(sup_diff(v_par, v_ref) <= 1e-12);
    const auto c_par = kernels::parallel::analyze(*g, v_par);
    const auto c_ref = kernels::reference::analyze(*g, v_par);
    CHECK(sup_diff(c_par, c) <= 1e-9);
    CHECK(sup_diff(c_ref, c) <= 1e-9);
    const auto g_par = kernels::parallel::synthesize_gradient(*g, c);
    const auto g_ref = kernels::reference::synthesize_gradient(*g, c);
    CHECK(sup_diff(g_par, g_ref) <= 1e-11);
    auto f = ScalarField::from_coeffs(g, c);
    CHECK(sup_diff(kernels::parallel::synthesize(*g, f.coeffs()), f.values()) <= 1e-9);
  }
}

TEST_CASE("integration by parts for band-limited fields") {
  for (auto [n, mode, res] : {std::tuple{1, GridMode::full, 64}, std::tuple{2, GridMode::full, 24},
                              std::tuple{4, GridMode::axisymmetric, 48}}) {
    auto g = SphereGrid::build(n, res, mode);
    const int L = g->band_limit() / 2;
    auto f = ScalarField::from_coeffs(g, random_coeffs(*g, 11, L));
    auto h = ScalarField::from_coeffs(g, random_coeffs(*g, 12, L));
    const ScalarField lh = laplace_beltrami(h);
    const TangentField df = gradient(f), dh = gradient(h);
    std::vector<double> a(g->size()), b(g->size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = f[i] * lh[i];
      b[i] = df.dot(i, dh);
    }
    const double lhs = integrate(*g, a), rhs = -integrate(*g, b);
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(rhs));
  }
}

TEST_CASE("spectral gradient agrees with fourth-order finite differences") {
  for (auto [n, mode, r0] : {std::tuple{1, GridMode::full, 64}, std::tuple{2, GridMode::full, 24},
                             std::tuple{3, GridMode::axisymmetric, 48}}) {
    double err[2];
    for (int pass = 0; pass < 2; ++pass) {
      auto g = SphereGrid::build(n, r0 << pass, mode, 6);
      auto u = ScalarField::from_coeffs(g, random_coeffs(*g, 5, 6));
      const TangentField s = gradient(u);
      const TangentField f = fd_gradient(u);
      err[pass] = sup_diff(s.data(), f.data());
    }
    /// fourth order: doubling resolution cuts the error by ~16
    INFO(n, " ", err[0], " ", err[1]);
    CHECK(err[1] < err[0] / 10.0);
    CHECK(err[1] < 1e-3);
  }
}

TEST_CASE("zonal analytic fields match their spectral projection") {
  auto g = SphereGrid::build(3, 64, GridMode::axisymmetric);
  auto jet = [](double t) {
    const double c = std::cos(t), s = std::sin(t);
    return Jet{c * c, -2.0 * c * s, 2.0 * (s * s - c * c)};
  };
  auto z = ScalarField::zonal(g, jet);
  auto p = ScalarField::band_limited(g, z.values());
  CHECK(sup_diff(gradient(z).data(), gradient(p).data()) <= 1e-10);
  CHECK(sup_diff(laplace_beltrami(z).values(), laplace_beltrami(p).values()) <= 1e-9);
  CHECK(sup_diff(fd_laplace_beltrami(p).values(), laplace_beltrami(p).values()) <= 1e-4);
  /// evaluation at an arbitrary point
  std::vector<double> x = {std::sin(0.3), 0.0, 0.0, std::cos(0.3)};
  CHECK(p.evaluate(x) == doctest::Approx(std::cos(0.3) * std::cos(0.3)).epsilon(1e-12));
  CHECK(z.evaluate(x) == doctest::Approx(std::cos(0.3) * std::cos(0.3)).epsilon(1e-15));
}

TEST_CASE("natural scale turns coordinates into degree-one coefficients") {
  auto g = SphereGrid::build(2, 16, GridMode::full);
  const auto& b = g->basis();
  auto x = ScalarField::band_limited(g, coordinate(g, 0).values());
  const long i = b.index(1, 1);
  REQUIRE(i >= 0);
  CHECK(x.coeffs()[i] / b.natural_scale(i) == doctest::Approx(1.0).epsilon(1e-12));
  auto a = SphereGrid::build(4, 32, GridMode::axisymmetric);
  auto z = ScalarField::band_limited(a, coordinate(a, 4).values());
  CHECK(z.coeffs()[1] / a->basis().natural_scale(1) == doctest::Approx(1.0).epsilon(1e-12));
}
