#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "isostab/field.hpp"

namespace isostab {

/// Position and first two parameter derivatives of a meridian (r, z) or planar curve (x, y).
struct CurvePoint {
  double r = 0.0, z = 0.0, dr = 0.0, dz = 0.0, ddr = 0.0, ddz = 0.0;
};
using CurveFunction = std::function<CurvePoint(double)>;

/// Uniformly sampled meridian; curve form runs from the south pole to the north pole with r >= 0.
class AxisymProfile {
 public:
  enum class Form { graph, curve };

  /// z = phi(r) over ascending r >= 0, outer normal pointing up.
  static AxisymProfile graph(int n, std::vector<double> r, std::vector<double> phi, std::vector<double> dphi,
                             std::vector<double> d2phi);
  static AxisymProfile graph_function(int n, const std::function<Jet(double)>& phi, double r_max, int samples);
  static AxisymProfile curve(int n, CurveFunction f, double s0, double s1, int samples, bool closed);
  /// Samples only; derivatives by 5-point differences with reflection through the axis.
  static AxisymProfile curve_samples(int n, std::vector<double> r, std::vector<double> z);
  /// Radial function rho(theta) about the origin, theta the angle from e_{n+1}.
  static AxisymProfile polar(int n, const std::function<Jet(double)>& rho, int samples);

  int dim() const { return n_; }
  Form form() const { return form_; }
  bool closed() const { return closed_; }
  std::size_t size() const { return pts_.size(); }
  const std::vector<CurvePoint>& points() const { return pts_; }
  const std::vector<double>& params() const { return s_; }
  /// Quadrature weights in the parameter (trapezoid with Gregory end corrections).
  std::vector<double> weights() const;
  const std::optional<CurveFunction>& function() const { return f_; }

  AxisymProfile to_curve() const;
  AxisymProfile to_graph() const;
  AxisymProfile scaled(double s) const;
  AxisymProfile resampled(int samples) const;

  /// Curvature of the meridian with respect to the outer normal.
  std::vector<double> meridian_curvature() const;
  /// Radial component of the outer unit normal.
  std::vector<double> normal_r() const;
  std::vector<double> normal_z() const;
  std::vector<double> speed() const;
  /// Boundary measure element per sample (weight times |S^{n-1}| r^{n-1} |gamma'|).
  std::vector<double> area_weights() const;

 private:
  int n_ = 2;
  Form form_ = Form::curve;
  bool closed_ = false;
  std::vector<double> s_;
  std::vector<CurvePoint> pts_;
  std::optional<CurveFunction> f_;
};

/// Closed curve sampled uniformly over a periodic parameter of period 2 pi.
class PlanarCurve {
 public:
  static PlanarCurve circle(double cx, double cy, double radius, int samples);
  static PlanarCurve from_function(const CurveFunction& f, int samples);
  /// Polar curve rho(t) (cos t, sin t) about (cx, cy).
  static PlanarCurve polar(const std::function<Jet(double)>& rho, int samples, double cx = 0.0, double cy = 0.0);
  /// Samples only; derivatives by periodic 5-point differences.
  static PlanarCurve from_samples(std::vector<double> x, std::vector<double> y);

  std::size_t size() const { return pts_.size(); }
  /// r, z hold x, y.
  const std::vector<CurvePoint>& points() const { return pts_; }
  double step() const;
  double length() const;
  double signed_area() const;
  std::vector<double> curvature() const;
  std::vector<double> speed() const;
  PlanarCurve reversed() const;

 private:
  std::vector<CurvePoint> pts_;
};

class PlanarRegion {
 public:
  /// Orients outer counterclockwise and holes clockwise; checks simplicity and nesting.
  static PlanarRegion make(PlanarCurve outer, std::vector<PlanarCurve> holes = {});
  const PlanarCurve& outer() const { return outer_; }
  const std::vector<PlanarCurve>& holes() const { return holes_; }
  double perimeter() const;
  double area() const;

 private:
  PlanarCurve outer_;
  std::vector<PlanarCurve> holes_;
};

std::vector<double> revolution_mean_curvature(const AxisymProfile& profile);

struct RevolutionFunctionals {
  double perimeter = 0.0;
  double volume = 0.0;
  double diameter = 0.0;
  double perimeter_error = 0.0;
  double volume_error = 0.0;
};
RevolutionFunctionals revolution_functionals(const AxisymProfile& profile);

struct EnvelopeResult {
  std::vector<std::array<double, 2>> hull;
  std::vector<char> contact_mask;
  /// Fraction of each sample's boundary measure lying on the contact set.
  std::vector<double> contact_share;
  std::vector<double> gauss_curvature;
  double off_contact_measure = 0.0;
  double contact_measure = 0.0;
  /// Curvature concentrated at the ends of hull segments absent from the boundary.
  double vertex_mass = 0.0;
  /// Smooth part plus vertex mass.
  double gauss_total = 0.0;
};

EnvelopeResult convex_envelope(const PlanarRegion& region);
EnvelopeResult convex_envelope(const AxisymProfile& profile);

struct AlmgrenTerms {
  double lhs = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double residual = 0.0;
  double perimeter = 0.0;
  double sup_H = 0.0;
  bool h_le_n = true;
  EnvelopeResult envelope;
};

AlmgrenTerms almgren_identity_terms(const PlanarRegion& region);
AlmgrenTerms almgren_identity_terms(const AxisymProfile& profile);

struct PlanarStructure {
  PlanarRegion omega_star;
  double delta = 0.0;
  double hole_area = 0.0;
  double hole_perimeter = 0.0;
  double perimeter_ratio = 0.0;
  double area_ratio = 0.0;
  double area_ratio_sq = 0.0;
  /// delta < P(B_1)
  bool hypothesis_ok = true;
};
PlanarStructure planar_structure(const PlanarRegion& region);

struct ScaledProfile {
  AxisymProfile profile;
  double scale = 1.0;
};
/// Dilation making sup H <= n, with the sup taken on a fixed dense sampling of the analytic meridian.
ScaledProfile enforce_H_le_n(const AxisymProfile& profile);

/// exp(1 - 1/(1 - x^2)) on |x| < 1, zero outside, with two derivatives.
Jet smooth_bump(double x);
/// (1 - x^2)^4 on |x| < 1, zero outside, with two derivatives.
Jet dent_shape(double x);
AxisymProfile sphere_profile(int n, double radius, int samples);
/// Unit sphere with a smooth inward dent of relative depth `depth` and angular half-width `width` at the north pole.
AxisymProfile dented_sphere_profile(int n, double depth, double width, int samples);
/// Meridian of the normal graph of a zonal u.
AxisymProfile zonal_profile(int n, const std::function<Jet(double)>& u, int samples);

}  // namespace isostab
