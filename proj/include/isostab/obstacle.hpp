#pragma once

#include <vector>

#include "isostab/field.hpp"
#include "isostab/graph_geometry.hpp"

namespace isostab {

struct ObstacleOptions {
  /// Uniform P1 elements on [0, pi] in the polar angle.
  int elements = 1024;
  /// Projected-gradient tolerance in mean-curvature units.
  double gtol = 1e-9;
  int max_iter = 50000;
  /// Free-node threshold is contact_tol * (1 + sup|u|).
  double contact_tol = 1e-7;
  double cmc_tol = 1e-3;
  /// Starting iterate; defaults to the obstacle itself.
  std::vector<double> initial;
};

struct ObstacleSolveResult {
  int dim = 2;
  double lambda = 0.0;
  /// Mesh angles (poles included) with nodal solution, obstacle and discrete weak mean curvature.
  std::vector<double> theta, v_nodes, u_nodes, H_nodes;
  /// Per interior mesh node: v - u <= threshold.
  std::vector<char> contact_mask;
  /// Interior nodes of the mesh; v is a clamped cubic spline of the nodal values.
  ScalarField v;
  ScalarField H_E;
  std::vector<double> energy_history;
  bool converged = false;
  int iterations = 0;
  double projected_gradient = 0.0;
  double contact_threshold = 0.0;
};

/// Minimizes P(E) + lambda |E| over radial graphs v >= u by projected Newton with an Armijo search.
ObstacleSolveResult truncate_mean_curvature(const NormalGraphSet& set, double lambda,
                                            const ObstacleOptions& opts = {});

struct TruncationReport {
  double delta = 0.0;
  double volume_gain = 0.0;
  double free_area = 0.0;
  /// lambda |E \ Omega| + H^n(dE \ dOmega)
  double distance_lhs = 0.0;
  double sup_abs_H_E = 0.0;
  double sup_H_Omega_plus = 0.0;
  double H_bound = 0.0;
  /// max |H + lambda| of the discrete weak curvature over free nodes.
  double complementarity_residual = 0.0;
  /// min (H + lambda) over contact nodes; nonnegative at a minimizer.
  double contact_multiplier_min = 0.0;
  /// max |H + lambda| of the spline curvature over free nodes eight cells from contact and M/32 cells from the poles.
  double cmc_residual = 0.0;
  std::size_t free_nodes = 0;
  double min_gap = 0.0;
  double energy_E = 0.0;
  double energy_Omega = 0.0;
  double diameter_E = 0.0;
  double diameter_Omega = 0.0;
  bool distance_ok = false;
  bool curvature_ok = false;
  bool cmc_ok = false;
  bool passed = false;
};

/// Checks the conclusions of the truncation against the original set; report only.
TruncationReport verify_truncation(const ObstacleSolveResult& result, const NormalGraphSet& original,
                                   const ObstacleOptions& opts = {});

/// Unit sphere with a dent of relative depth `depth` and half-width `width` at the north pole, dilated so H <= n.
ScalarField dimple_field(GridPtr grid, double depth, double width);

}  // namespace isostab
