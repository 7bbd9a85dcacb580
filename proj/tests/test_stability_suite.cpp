#include <cmath>
#include <functional>
#include <string>

#include "doctest.h"
#include "isostab/error.hpp"
#include "isostab/quadrature.hpp"
#include "isostab/stability_suite.hpp"

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

GridPtr grid_for(int n) {
  if (n == 1) return SphereGrid::build(1, 256, GridMode::full, 32);
  if (n == 2) return SphereGrid::build(2, 32, GridMode::full, 12);
  return SphereGrid::build(n, 200, GridMode::axisymmetric);
}

NormalGraphSet constant_set(int n, double t) {
  const GridPtr g = grid_for(n);
  if (g->spectral()) return NormalGraphSet::build(ScalarField::band_limited(g, std::vector<double>(g->size(), t)));
  return NormalGraphSet::build(ScalarField::zonal(g, [t](double) { return Jet{t, 0.0, 0.0}; }));
}

const InequalityRecord& find(const std::vector<InequalityRecord>& recs, const std::string& id) {
  for (const auto& r : recs) {
    if (r.estimate_id == id) return r;
  }
  FAIL("missing record " << id);
  return recs.front();
}

}  // namespace

TEST_CASE("scaled balls match the closed forms") {
  for (int n : {1, 2, 3}) {
    const double S = sphere_measure(n);
    for (double t : {1e-3, 1e-2, 5e-2}) {
      CAPTURE(n);
      CAPTURE(t);
      const auto set = constant_set(n, t);
      const double delta = std::expm1(n * std::log1p(t)) * S;
      const auto recs = verify_sharp_u(set);
      CHECK(find(recs, "sharp_barycenter").ratio == doctest::Approx(t * S / delta).epsilon(1e-9));
      CHECK(find(recs, "sharp_L1").ratio == doctest::Approx(t * S / delta).epsilon(1e-9));
      CHECK(find(recs, "sharp_c0+").ratio == doctest::Approx(t / delta).epsilon(1e-9));
      CHECK(find(recs, "sym_diff_L1").ratio == doctest::Approx(std::expm1((n + 1) * std::log1p(t)) / ((n + 1) * t)).epsilon(1e-9));
      CHECK(find(recs, "outer_gap_c0+").ratio == doctest::Approx(1.0).epsilon(1e-9));
      for (const auto& r : recs) {
        CHECK(std::isfinite(r.ratio));
        CHECK_FALSE(r.degenerate);
      }

      const auto main = verify_main(set);
      const double lhs = std::expm1((n + 1) * std::log1p(t)) * S / (n + 1) + t;
      CHECK(main.lhs == doctest::Approx(lhs).epsilon(1e-8));
      CHECK(main.rhs_raw == doctest::Approx(delta).epsilon(1e-9));

      const auto alex = verify_alex(set);
      const double w12 = t * std::sqrt(S);
      const double l2 = n * t / (1.0 + t) * std::sqrt(S * std::pow(1.0 + t, n));
      CHECK(find(alex, "alex_L2").lhs == doctest::Approx(w12).epsilon(1e-9));
      CHECK(find(alex, "alex_L2").rhs_raw == doctest::Approx(l2).epsilon(1e-7));
    }
  }
}

TEST_CASE("barycenter ratio tends to 1/n and main ratio to its limit") {
  for (int n : {2, 3}) {
    const double S = sphere_measure(n);
    const auto set = constant_set(n, 1e-6);
    CHECK(find(verify_sharp_u(set), "sharp_barycenter").ratio == doctest::Approx(1.0 / n).epsilon(1e-5));
    const double limit = (ball_volume(n) * (n + 1) + 1.0) / (n * S);
    CHECK(verify_main(set).ratio == doctest::Approx(limit).epsilon(1e-4));
  }
}

TEST_CASE("unit sphere records are degenerate") {
  for (int n : {1, 2, 3}) {
    const auto set = constant_set(n, 0.0);
    for (const auto& r : verify_sharp_u(set)) CHECK(r.degenerate);
    CHECK(verify_main(set).degenerate);
    for (const auto& r : verify_alex(set)) CHECK(r.degenerate);
  }
}

TEST_CASE("hypotheses are gated") {
  const GridPtr g = grid_for(3);
  const auto shifted = NormalGraphSet::build(ScalarField::zonal(g, [](double th) {
    return Jet{0.01 * std::cos(th), -0.01 * std::sin(th), -0.01 * std::cos(th)};
  }));
  CHECK(invariant_of([&] { verify_sharp_u(shifted); }) == "hyp.barycenter");
  CHECK(invariant_of([&] { verify_alex(shifted); }) == "hyp.barycenter");
  const auto shrunk = constant_set(3, -0.01);
  CHECK(invariant_of([&] { verify_sharp_u(shrunk); }) == "hyp.H_le_n");
  CHECK(invariant_of([&] { verify_main(shrunk); }) == "hyp.H_le_n");
  const auto big = constant_set(3, 0.2);
  CHECK(invariant_of([&] { verify_sharp_u(big); }) == "hyp.c1_small");
  CHECK(invariant_of([&] { verify_alex(big); }) == "hyp.c1_small");
  const auto small = constant_set(2, 0.01);
  CHECK(invariant_of([&] { verify_alex(small, 1.5); }) == "alex.p");
  CHECK(invariant_of([&] { verify_alex(small, 2.0, 1.0); }) == "alex.alpha");
  CHECK(invariant_of([&] { verify_alex(constant_set(5, 0.01), 2.5); }) == "alex.p");
  CHECK(invariant_of([&] { verify_alex(constant_set(5, 0.01), 2.6); }).empty());
}

TEST_CASE("sharp family records") {
  FamilySpec spec = parse_family("sharp:n=3,count=2");
  const auto m = family_member(spec, 0);
  double b = 0.0;
  for (double x : m.set.barycenter()) b += x * x;
  CHECK(std::sqrt(b) <= 1e-12);
  const auto recs = verify_sharp_u(m.set);
  CHECK(recs.size() == 8);
  for (const auto& r : recs) {
    CAPTURE(r.estimate_id);
    CHECK(std::isfinite(r.ratio));
    CHECK(r.ratio > 0.0);
    CHECK_FALSE(r.degenerate);
  }
  CHECK(find(recs, "sharp_barycenter").ratio == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("constant sweeps") {
  const auto c0 = constant_sweep(parse_family("sharp:n=3"), "sharp_c0");
  CHECK(c0.table.size() == 10);
  CHECK(c0.min_ratio > 0.0);
  CHECK(c0.max_ratio / c0.min_ratio <= 3.0);

  const auto again = constant_sweep(parse_family("sharp:n=3"), "sharp_c0");
  CHECK(again.max_ratio == c0.max_ratio);

  for (const char* fam : {"sharp:n=3", "sharp:n=2", "scaled_ball:n=2", "scaled_ball:n=3"}) {
    CAPTURE(fam);
    const auto lower = constant_sweep(parse_family(fam), "sharp_barycenter_lower");
    CHECK(lower.degenerate_count == 0);
    CHECK(std::isfinite(lower.max_ratio));
    for (const auto& r : lower.table) CHECK(r.rhs_raw > 0.0);
  }

  const auto alex = constant_sweep(parse_family("band_limited:n=2"), "alex_L2");
  CHECK(alex.min_ratio > 0.0);
  CHECK(alex.max_ratio / alex.min_ratio <= 10.0);
  const auto ell = constant_sweep(parse_family("ellipsoid:n=2"), "alex_L2");
  CHECK(ell.max_ratio / ell.min_ratio <= 10.0);
  CHECK(ell.table.front().params.front().first == "e");
}

TEST_CASE("family parsing and sweep preconditions") {
  const FamilySpec s = parse_family("sharp:n=3,count=12,K=16,r0=0.06");
  CHECK(s.kind == "sharp");
  CHECK(s.n == 3);
  CHECK(s.count == 12);
  CHECK(s.get("r0", 0.0) == 0.06);
  CHECK(parse_family(s.tag()).tag() == s.tag());
  CHECK(invariant_of([] { parse_family("torus:n=2"); }) == "family.kind");
  CHECK(invariant_of([] { parse_family("sharp:n=x"); }) == "family.param");
  CHECK(invariant_of([] { constant_sweep(parse_family("scaled_ball:n=2,count=5"), "sharp_L1"); }) == "family.count");
  CHECK(invariant_of([] { constant_sweep(parse_family("scaled_ball:n=2,count=0"), "sharp_L1"); }) == "family.empty");
  CHECK(invariant_of([] { constant_sweep(parse_family("scaled_ball:n=2"), "nope"); }) == "estimate.id");
}
