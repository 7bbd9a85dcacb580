#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "doctest.h"
#include "isostab/error.hpp"
#include "isostab/obstacle.hpp"

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

GridPtr zonal_grid(int n) { return SphereGrid::build(n, 200, GridMode::axisymmetric); }

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("round sphere is its own truncation") {
  for (int n : {2, 3}) {
    auto grid = zonal_grid(n);
    const auto set = NormalGraphSet::build(ScalarField::zonal(grid, [](double) { return Jet{0.0, 0.0, 0.0}; }));
    const auto r = truncate_mean_curvature(set, n);
    CHECK(r.converged);
    CHECK(max_diff(r.v_nodes, r.u_nodes) == 0.0);
    const auto rep = verify_truncation(r, set);
    CHECK(rep.free_nodes == 0);
    CHECK(rep.distance_lhs == 0.0);
    CHECK(rep.sup_abs_H_E == doctest::Approx(n).epsilon(1e-4));
    CHECK(rep.passed);
  }
}

TEST_CASE("dimple family") {
  for (int n : {2, 3}) {
    auto grid = zonal_grid(n);
    int with_free = 0;
    for (double depth : {0.05, 0.1, 0.2}) {
      CAPTURE(n);
      CAPTURE(depth);
      const auto set = NormalGraphSet::build(dimple_field(grid, depth, 0.5));
      CHECK(set.sup_mean_curvature() <= n + 1e-9);
      const auto r = truncate_mean_curvature(set, n);
      CHECK(r.converged);
      const auto rep = verify_truncation(r, set);
      CHECK(rep.min_gap >= 0.0);
      CHECK(rep.complementarity_residual <= 1e-3);
      CHECK(rep.cmc_residual <= 1e-3);
      CHECK(rep.contact_multiplier_min >= -1e-3);
      CHECK(rep.distance_lhs <= rep.delta);
      CHECK(rep.sup_abs_H_E <= rep.H_bound + 1e-3);
      CHECK(rep.energy_E <= rep.energy_Omega);
      CHECK(rep.diameter_E == doctest::Approx(rep.diameter_Omega).epsilon(1e-8));
      CHECK(rep.passed);
      with_free += rep.free_nodes > 0;
      for (std::size_t i = 1; i < r.energy_history.size(); ++i) {
        CHECK(r.energy_history[i] <= r.energy_history[i - 1] + 1e-13 * std::abs(r.energy_history[0]));
      }
    }
    CHECK(with_free >= 2);
  }
}

TEST_CASE("truncation shrinks as lambda grows") {
  auto grid = zonal_grid(2);
  const auto set = NormalGraphSet::build(dimple_field(grid, 0.2, 0.5));
  std::vector<double> prev;
  double prev_gain = std::numeric_limits<double>::infinity();
  for (double lambda : {1.0, 2.0, 4.0}) {
    const auto r = truncate_mean_curvature(set, lambda);
    REQUIRE(r.converged);
    if (!prev.empty()) {
      for (std::size_t i = 0; i < prev.size(); ++i) CHECK(r.v_nodes[i] <= prev[i] + 1e-9);
    }
    const auto rep = verify_truncation(r, set);
    CHECK(rep.volume_gain <= prev_gain);
    prev_gain = rep.volume_gain;
    prev = r.v_nodes;
  }
  const auto large = truncate_mean_curvature(set, 50.0);
  CHECK(max_diff(large.v_nodes, large.u_nodes) <= 1e-12);
}

TEST_CASE("minimizer does not depend on the starting point") {
  auto grid = zonal_grid(2);
  const auto set = NormalGraphSet::build(dimple_field(grid, 0.2, 0.5));
  const auto base = truncate_mean_curvature(set, 2.0);
  REQUIRE(base.converged);

  ObstacleOptions lifted;
  lifted.initial = base.u_nodes;
  for (double& x : lifted.initial) x += 0.1;
  const auto a = truncate_mean_curvature(set, 2.0, lifted);
  REQUIRE(a.converged);
  CHECK(max_diff(a.v_nodes, base.v_nodes) <= 1e-6);

  ObstacleOptions smoothed;
  smoothed.initial = base.u_nodes;
  const auto& u = base.u_nodes;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) smoothed.initial[i] = std::max(u[i], 0.25 * (u[i - 1] + 2 * u[i] + u[i + 1]) + 0.01);
  const auto b = truncate_mean_curvature(set, 2.0, smoothed);
  REQUIRE(b.converged);
  CHECK(max_diff(b.v_nodes, base.v_nodes) <= 1e-6);
}

TEST_CASE("fields on the output grid") {
  auto grid = zonal_grid(2);
  const auto set = NormalGraphSet::build(dimple_field(grid, 0.2, 0.5));
  const auto r = truncate_mean_curvature(set, 2.0);
  const auto& th = r.v.grid().theta();
  REQUIRE(th.size() + 2 == r.theta.size());
  const auto jet = r.v.jet();
  for (std::size_t i = 0; i < th.size(); ++i) CHECK(jet(th[i]).f == doctest::Approx(r.v_nodes[i + 1]).epsilon(1e-14));
  CHECK(r.H_E.values().size() == th.size());
  CHECK(r.contact_mask.size() == th.size());
  CHECK(std::count(r.contact_mask.begin(), r.contact_mask.end(), 0) > 0);
}

TEST_CASE("obstacle preconditions") {
  auto grid = zonal_grid(2);
  const auto set = NormalGraphSet::build(dimple_field(grid, 0.1, 0.5));
  CHECK(invariant_of([&] { truncate_mean_curvature(set, 0.0); }) == "obstacle.lambda");
  ObstacleOptions bad;
  bad.initial = {0.0, 1.0};
  CHECK(invariant_of([&] { truncate_mean_curvature(set, 1.0, bad); }) == "obstacle.initial");
  auto full = SphereGrid::build(2, 8, GridMode::full, 4);
  const auto nonzonal = NormalGraphSet::build(ScalarField::from_values(full, std::vector<double>(full->size(), 0.01)));
  CHECK(invariant_of([&] { truncate_mean_curvature(nonzonal, 1.0); }) == "obstacle.zonal");
}
