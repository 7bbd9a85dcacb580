#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "isostab/axisym.hpp"
#include "isostab/graph_geometry.hpp"

namespace isostab {

struct SharpFamilyParams {
  int n = 3;
  double K = 16.0;
  double r0 = 0.0;
  double t = 0.0;
  double sigma = 0.0;
  double r1 = 0.0;
  /// Slope of the profile at r1; NaN until h is built.
  double mu = std::numeric_limits<double>::quiet_NaN();
};

/// Checks t/r0 < sigma < 1/K^2, r0 < 1/K, t < 1/K and 0 < r1 < r0.
SharpFamilyParams derive_params(int n, double K, double r0, double t, double sigma);

/// Prefactor of h': (1 - r^2)^{-3/2} follows from integrating the ODE; (1 - r^2)^{+3/2} is the printed variant.
enum class HDerivativeForm { derived, as_printed };

class HProfile {
 public:
  static HProfile build(SharpFamilyParams params, HDerivativeForm form = HDerivativeForm::derived,
                        int panels = 400);

  const SharpFamilyParams& params() const { return p_; }
  HDerivativeForm form() const { return form_; }
  double h(double r) const;
  double dh(double r) const;
  double d2h(double r) const;
  /// Geometric sample radii on [r1, r0] with h, h', h''.
  const std::vector<double>& radii() const { return r_; }
  const std::vector<double>& values() const { return h_; }
  std::vector<double> derivatives() const;
  std::vector<double> second_derivatives() const;
  /// h'' comes from differentiating h' in closed form, not by differencing.
  bool analytic_second_derivative() const { return true; }
  /// Largest adaptive-quadrature error estimate over the panels.
  double quadrature_error() const { return qerr_; }

 private:
  double X(double r) const;
  double dX(double r) const;

  SharpFamilyParams p_;
  HDerivativeForm form_ = HDerivativeForm::derived;
  std::vector<double> r_, h_;
  double qerr_ = 0.0;
};

struct ValidationCheck {
  std::string name;
  bool passed = true;
  /// Gating checks decide `passed` of the whole report; others are informational.
  bool gating = true;
  /// Worst margin (positive = satisfied).
  double margin = 0.0;
  double worst_r = 0.0;
};

struct HValidation {
  std::vector<ValidationCheck> checks;
  bool passed = true;
  std::string first_failure;
  double sup_H_scaled = 0.0;
  const ValidationCheck* find(const std::string& name) const;
};

HValidation validate_h(const HProfile& h, int samples = 10000);

struct SharpSet {
  SharpFamilyParams params;
  /// Graph of the dimpled cap of Omega = (1+t) Omega* over graded radii.
  AxisymProfile profile;
  ScalarField u;
  std::optional<NormalGraphSet> set;
  double delta = 0.0;
  double u_c0 = 0.0;
  double u_plus_c0 = 0.0;
  /// Dimple depth 1 - (1+t) phi(0).
  double u_minus_c0 = 0.0;
  double phi_at_zero = 0.0;
  double sup_H = 0.0;
  /// sigma - (n+1)/(2n-2) K^3 sigma^3, the small-t limit of mu.
  double mu_expansion = 0.0;
  double seam_r1_value = 0.0, seam_r1_slope = 0.0, seam_r0_value = 0.0, seam_r0_slope = 0.0;
};

/// Radial-graph jet of (1+t) Omega* minus one, as a function of the polar angle.
ZonalFunction sharp_radial_jet(const HProfile& h);
/// Polar angle of the profile point at radius r.
double sharp_polar_angle(const HProfile& h, double r);
/// delta(Omega_t) from the profile integrals, cancellation-free.
double sharp_deficit(const HProfile& h);
/// ||u||_{C^0} = max(t, 1 - (1+t) phi(0)).
double sharp_u_c0(const HProfile& h);
double sharp_phi_at_zero(const HProfile& h);
/// Composite Gauss-Legendre grid graded towards the dimple.
GridPtr sharp_grid(const HProfile& h, int nodes_per_panel = 16);
SharpSet build_sharp_set(const HProfile& h, int nodes_per_panel = 16, bool with_set = true);

struct SweepRow {
  double t = 0.0;
  double delta = 0.0;
  double u_c0 = 0.0;
  double u_minus_c0 = 0.0;
  /// n > 2: u_c0 / delta^{1/(n-1)}; n = 2: u_c0 / (delta log(1/delta)).
  double ratio = 0.0;
  double delta_over_t = 0.0;
  double sup_H = 0.0;
  bool valid = true;
};

struct SweepResult {
  int n = 3;
  double K = 0.0, r0 = 0.0, sigma = 0.0;
  std::vector<SweepRow> rows;
  /// Least-squares slope of log u_c0 against log delta.
  double slope = 0.0;
  double ratio_spread = 0.0;
  double delta_over_t_spread = 0.0;
  bool all_valid = true;
};

SweepResult sharpness_sweep(int n, double K, double r0, double sigma, const std::vector<double>& ts,
                            HDerivativeForm form = HDerivativeForm::derived);
/// Smallest power of two >= 16 for which every t validates; fails if the window closes first.
double choose_K(int n, double r0, double sigma, const std::vector<double>& ts);

}  // namespace isostab
