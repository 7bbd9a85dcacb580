#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "isostab/grid.hpp"

namespace isostab {

/// Value and first two polar-angle derivatives of a zonal function.
struct Jet {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
};

/// Zonal function of the polar angle measured from e_{n+1}.
using ZonalFunction = std::function<Jet(double theta)>;

class ScalarField {
 public:
  ScalarField() = default;

  static ScalarField from_values(GridPtr grid, std::vector<double> values);
  /// Orthonormal coefficients; values are synthesized.
  static ScalarField from_coeffs(GridPtr grid, std::vector<double> coeffs);
  /// Projects samples onto the band limit and replaces them by the projection.
  static ScalarField band_limited(GridPtr grid, std::vector<double> values);
  static ScalarField from_function(GridPtr grid, const std::function<double(std::span<const double>)>& f);
  /// Analytic zonal field, evaluable at any polar angle.
  static ScalarField zonal(GridPtr grid, ZonalFunction jet);

  /// Attach an exact tangential gradient (node-major ambient vectors).
  ScalarField with_gradient(std::vector<double> gradient) const;
  /// a * u + b, keeping spectral or analytic data.
  ScalarField affine(double a, double b) const;

  const GridPtr& grid_ptr() const { return grid_; }
  const SphereGrid& grid() const { return *grid_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  bool has_coeffs() const { return !coeffs_.empty(); }
  const std::vector<double>& coeffs() const { return coeffs_; }
  bool is_zonal() const { return static_cast<bool>(jet_); }
  const ZonalFunction& jet() const { return jet_; }
  bool has_exact_gradient() const { return !gradient_.empty(); }
  const std::vector<double>& exact_gradient() const { return gradient_; }

  /// Value at an arbitrary unit vector; needs coefficients or an analytic jet.
  double evaluate(std::span<const double> x) const;
  bool evaluable() const { return has_coeffs() || is_zonal(); }

 private:
  GridPtr grid_;
  std::vector<double> values_;
  std::vector<double> coeffs_;
  ZonalFunction jet_;
  std::vector<double> gradient_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);

class TangentField {
 public:
  TangentField(GridPtr grid, std::vector<double> data);

  const SphereGrid& grid() const { return *grid_; }
  std::size_t size() const { return grid_->size(); }
  std::span<const double> at(std::size_t i) const {
    return {data_.data() + i * grid_->ambient(), static_cast<std::size_t>(grid_->ambient())};
  }
  const std::vector<double>& data() const { return data_; }
  double norm2(std::size_t i) const;
  double dot(std::size_t i, const TangentField& other) const;
  /// max |v . x| over nodes.
  double max_normal_component() const;

 private:
  GridPtr grid_;
  std::vector<double> data_;
};

/// Polar angle from e_{n+1} and the unit polar tangent (cos t x - e)/sin t at a unit vector.
double polar_angle(std::span<const double> x);
void polar_tangent(std::span<const double> x, std::span<double> out);

}  // namespace isostab
