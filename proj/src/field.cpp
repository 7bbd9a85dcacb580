#include "isostab/field.hpp"

#include <algorithm>
#include <cmath>

#include "isostab/error.hpp"
#include "isostab/kernels.hpp"

namespace isostab {

double polar_angle(std::span<const double> x) {
  const std::size_t n = x.size() - 1;
  double s2 = 0.0;
  for (std::size_t c = 0; c < n; ++c) s2 += x[c] * x[c];
  return std::atan2(std::sqrt(s2), x[n]);
}

void polar_tangent(std::span<const double> x, std::span<double> out) {
  const std::size_t n = x.size() - 1;
  double s2 = 0.0;
  for (std::size_t c = 0; c < n; ++c) s2 += x[c] * x[c];
  const double s = std::sqrt(s2);
  const double ct = x[n];
  if (s == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  for (std::size_t c = 0; c < n; ++c) out[c] = ct * x[c] / s;
  out[n] = -s;
}

ScalarField ScalarField::from_values(GridPtr grid, std::vector<double> values) {
  if (values.size() != grid->size()) fail(ErrorKind::precondition, "field.grid", "value count does not match grid");
  ScalarField f;
  f.grid_ = std::move(grid);
  f.values_ = std::move(values);
  return f;
}

ScalarField ScalarField::from_coeffs(GridPtr grid, std::vector<double> coeffs) {
  ScalarField f;
  f.values_ = kernels::parallel::synthesize(*grid, coeffs);
  f.coeffs_ = std::move(coeffs);
  f.grid_ = std::move(grid);
  return f;
}

ScalarField ScalarField::band_limited(GridPtr grid, std::vector<double> values) {
  return from_coeffs(grid, kernels::parallel::analyze(*grid, values));
}

ScalarField ScalarField::from_function(GridPtr grid, const std::function<double(std::span<const double>)>& fn) {
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid->node(i));
  return from_values(std::move(grid), std::move(v));
}

ScalarField ScalarField::zonal(GridPtr grid, ZonalFunction jet) {
  ScalarField f;
  f.values_.resize(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) f.values_[i] = jet(polar_angle(grid->node(i))).f;
  f.jet_ = std::move(jet);
  f.grid_ = std::move(grid);
  return f;
}

ScalarField ScalarField::with_gradient(std::vector<double> gradient) const {
  if (gradient.size() != size() * grid_->ambient()) {
    fail(ErrorKind::precondition, "field.gradient", "gradient size does not match grid");
  }
  ScalarField f = *this;
  f.gradient_ = std::move(gradient);
  return f;
}

ScalarField ScalarField::affine(double a, double b) const {
  ScalarField f = *this;
  for (double& v : f.values_) v = a * v + b;
  if (has_coeffs()) {
    for (double& c : f.coeffs_) c *= a;
    f.coeffs_[0] += b * grid_->basis().natural_scale(0);
  }
  if (is_zonal()) {
    ZonalFunction g = jet_;
    f.jet_ = [g, a, b](double t) {
      const Jet j = g(t);
      return Jet{a * j.f + b, a * j.df, a * j.d2f};
    };
  }
  for (double& g : f.gradient_) g *= a;
  return f;
}

double ScalarField::evaluate(std::span<const double> x) const {
  if (is_zonal()) return jet_(polar_angle(x)).f;
  if (has_coeffs()) return grid_->basis().evaluate(coeffs_, x);
  fail(ErrorKind::capability, "field.evaluate", "field has neither coefficients nor an analytic form");
}

namespace {
ScalarField combine(const ScalarField& a, const ScalarField& b, double sign) {
  if (!a.grid().same_as(b.grid())) fail(ErrorKind::precondition, "field.grid", "fields live on different grids");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + sign * b[i];
  if (a.has_coeffs() && b.has_coeffs()) {
    std::vector<double> c(a.coeffs().size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeffs()[k] + sign * b.coeffs()[k];
    return ScalarField::from_coeffs(a.grid_ptr(), std::move(c));
  }
  return ScalarField::from_values(a.grid_ptr(), std::move(v));
}
}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) { return combine(a, b, 1.0); }
ScalarField operator-(const ScalarField& a, const ScalarField& b) { return combine(a, b, -1.0); }

TangentField::TangentField(GridPtr grid, std::vector<double> data) : grid_(std::move(grid)), data_(std::move(data)) {
  if (data_.size() != grid_->size() * grid_->ambient()) {
    fail(ErrorKind::precondition, "tangent.grid", "vector data does not match grid");
  }
}

double TangentField::norm2(std::size_t i) const {
  double s = 0.0;
  for (double c : at(i)) s += c * c;
  return s;
}

double TangentField::dot(std::size_t i, const TangentField& other) const {
  const auto a = at(i);
  const auto b = other.at(i);
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += a[c] * b[c];
  return s;
}

double TangentField::max_normal_component() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto v = at(i);
    const auto x = grid_->node(i);
    double s = 0.0;
    for (std::size_t c = 0; c < v.size(); ++c) s += v[c] * x[c];
    m = std::max(m, std::abs(s));
  }
  return m;
}

}  // namespace isostab
