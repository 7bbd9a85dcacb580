#pragma once

#include <functional>
#include <vector>

#include "isostab/field.hpp"

namespace isostab {

/// Omega with boundary {(1 + u(x)) x : x in S^n}.
class NormalGraphSet {
 public:
  static NormalGraphSet build(ScalarField u, double margin = 0.05);

  const ScalarField& u() const { return u_; }
  const SphereGrid& grid() const { return u_.grid(); }
  int dim() const { return u_.grid().dim(); }
  double margin() const { return margin_; }
  /// |grad u|^2 per node.
  const std::vector<double>& grad_sq() const { return grad_sq_; }
  const std::vector<double>& grad() const { return grad_; }
  const std::vector<double>& sqrt_det_g() const { return sqrt_det_g_; }
  /// Mean curvature at (1+u(x))x with respect to the outer normal.
  const std::vector<double>& mean_curvature() const { return h_; }
  double perimeter() const { return perimeter_; }
  double volume() const { return volume_; }
  /// int over the boundary of the position vector.
  const std::vector<double>& barycenter() const { return barycenter_; }
  /// P(Omega) - P(B_1), summed without cancellation.
  double deficit() const { return deficit_; }
  double sup_mean_curvature() const;

 private:
  ScalarField u_;
  double margin_ = 0.05;
  std::vector<double> grad_, grad_sq_, sqrt_det_g_, h_, barycenter_;
  double perimeter_ = 0.0, volume_ = 0.0, deficit_ = 0.0;
};

/// Mean curvature of a normal graph from u alone.
ScalarField mean_curvature(const NormalGraphSet& set);

/// Exact mean curvature of a zonal radial graph given the jet of u.
double zonal_mean_curvature(int n, double theta, const Jet& u);

struct FraenkelResult {
  double alpha = 0.0;
  std::vector<double> center;
  double radius = 0.0;
};

struct DeficitReport {
  double delta = 0.0;
  double delta_iso = 0.0;
  double delta_cmc = 0.0;
  double H0 = 0.0;
  double fraenkel = 0.0;
  double hausdorff_radial = 0.0;
  double outer_gap = 0.0;
  std::vector<double> center_used;
  double perimeter = 0.0;
  double volume = 0.0;
  double sup_H = 0.0;
};

/// Radius of the ball with the same discrete volume as the set.
double comparison_radius(const NormalGraphSet& set);
/// |Omega Delta B_r(x)| via the radial functions.
double symmetric_difference(const NormalGraphSet& set, const std::vector<double>& center, double radius);
/// Radial function of B_r(x) in direction w; requires |x| < r.
double ball_radial(const std::vector<double>& center, double radius, std::span<const double> w);

/// Centers searched: the whole ambient space on full grids, the polar axis on axisymmetric grids.
std::vector<std::vector<double>> fraenkel_starts(const SphereGrid& grid);
struct CenterSearch {
  std::vector<double> center;
  double value = 0.0;
};
/// Multi-start Nelder-Mead over centers |x| < radius from fraenkel_starts.
CenterSearch minimize_over_centers(const NormalGraphSet& set, double radius,
                                   const std::function<double(const std::vector<double>&)>& objective);
FraenkelResult fraenkel_asymmetry(const NormalGraphSet& set);
double hausdorff_radial(const NormalGraphSet& set, const std::vector<double>& center);
double outer_inclusion_gap(const NormalGraphSet& set, const std::vector<double>& center);
DeficitReport deficits(const NormalGraphSet& set);

struct RecenterResult {
  ScalarField u;
  std::vector<double> shift;
  int iterations = 0;
  double barycenter_norm = 0.0;
};

/// Radial function of the same set about the point `center`.
ScalarField radial_function_about(const ScalarField& u, const std::vector<double>& center);
RecenterResult recenter(const NormalGraphSet& set, double tol = 1e-9, int max_iter = 20);

struct ScaledSet {
  ScalarField u;
  double scale = 1.0;
};
/// Dilate so that sup H <= n.
ScaledSet enforce_H_le_n(const NormalGraphSet& set);

}  // namespace isostab
