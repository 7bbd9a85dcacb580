#include "isostab/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "isostab/error.hpp"
#include "isostab/sphere_core.hpp"

namespace isostab {

namespace {

double weight_sum(const SphereGrid& g) {
  std::vector<double> one(g.size(), 1.0);
  return integrate(g, one);
}

std::vector<int> coordinate_axes(const SphereGrid& g) {
  std::vector<int> axes;
  if (g.mode() == GridMode::axisymmetric) {
    axes.push_back(g.dim());
  } else {
    for (int c = 0; c < g.ambient(); ++c) axes.push_back(c);
  }
  return axes;
}

double moment(const ScalarField& f, int c, int power_of_x) {
  const SphereGrid& g = f.grid();
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(g.node(i)[c], power_of_x) * f[i];
  return integrate(g, v);
}

}  // namespace

HarmonicDecomposition decompose(const ScalarField& u) {
  const SphereGrid& g = u.grid();
  HarmonicDecomposition d;
  d.a = integrate(u) / weight_sum(g);
  d.b.assign(g.ambient(), 0.0);
  const auto one = ScalarField::from_values(u.grid_ptr(), std::vector<double>(g.size(), 1.0));
  for (int c : coordinate_axes(g)) d.b[c] = moment(u, c, 1) / moment(one, c, 2);

  if (u.has_coeffs()) {
    std::vector<double> c = u.coeffs();
    const SpectralBasis& b = g.basis();
    for (std::size_t k = 0; k < c.size(); ++k)
      if (b.mode(k).degree <= 1) c[k] = 0.0;
    d.R = ScalarField::from_coeffs(u.grid_ptr(), std::move(c));
    return d;
  }
  std::vector<double> r(g.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto x = g.node(i);
    double bx = 0.0;
    for (int c = 0; c < g.ambient(); ++c) bx += d.b[c] * x[c];
    r[i] = u[i] - d.a - bx;
  }
  if (u.is_zonal() && g.mode() == GridMode::axisymmetric) {
    const ZonalFunction jet = u.jet();
    const double a = d.a, bz = d.b[g.dim()];
    d.R = ScalarField::zonal(u.grid_ptr(), [jet, a, bz](double t) {
      const Jet j = jet(t);
      return Jet{j.f - a - bz * std::cos(t), j.df + bz * std::sin(t), j.d2f + bz * std::cos(t)};
    });
    return d;
  }
  d.R = ScalarField::from_values(u.grid_ptr(), std::move(r));
  return d;
}

double low_band_leakage(const ScalarField& f) {
  const SphereGrid& g = f.grid();
  const double l2 = norm(f, NormKind::L2);
  if (l2 == 0.0) return 0.0;
  const double S = weight_sum(g);
  double worst = std::abs(integrate(f)) / std::sqrt(S);
  for (int c : coordinate_axes(g)) worst = std::max(worst, std::abs(moment(f, c, 1)) / std::sqrt(S / (g.dim() + 1)));
  return worst / l2;
}

double poincare_ratio(const ScalarField& R) {
  const double l2 = norm(R, NormKind::L2);
  if (l2 == 0.0) fail(ErrorKind::precondition, "poincare.nonzero", "ratio undefined for R = 0");
  if (low_band_leakage(R) > 1e-8) {
    fail(ErrorKind::precondition, "poincare.orthogonal_low_bands", "R is not orthogonal to degrees 0 and 1");
  }
  const TangentField dr = gradient(R);
  std::vector<double> g2(R.size());
  for (std::size_t i = 0; i < g2.size(); ++i) g2[i] = dr.norm2(i);
  return integrate(R.grid(), g2) / (l2 * l2);
}

ScalarField synthesize(const std::vector<BandTerm>& bands, const GridPtr& grid) {
  const SpectralBasis& b = grid->basis();
  const int n = grid->dim();
  std::vector<double> c(b.size(), 0.0);
  auto add = [&](int degree, int order, double value) {
    const long i = b.index(degree, order);
    if (i < 0) {
      fail(ErrorKind::precondition, "bands.degree",
           "no mode (degree " + std::to_string(degree) + ", order " + std::to_string(order) + ") within band limit");
    }
    c[i] += value * b.natural_scale(i);
  };
  for (const BandTerm& t : bands) {
    if (t.degree < 0 || t.degree > b.band_limit()) {
      fail(ErrorKind::precondition, "bands.degree", "degree " + std::to_string(t.degree) + " exceeds band limit");
    }
    if (grid->mode() == GridMode::axisymmetric) {
      if (!t.zonal && t.order != 0) fail(ErrorKind::precondition, "bands.order", "axisymmetric grids are zonal only");
      add(t.degree, 0, t.coeff);
    } else if (n == 2) {
      add(t.degree, t.zonal ? 0 : t.order, t.coeff);
    } else if (!t.zonal || t.degree == 0) {
      add(t.degree, t.degree == 0 ? 0 : t.order, t.coeff);
    } else {
      /// T_k(x . e_2) on the circle: cos(k pi/2) cos(k phi) + sin(k pi/2) sin(k phi)
      const int k = t.degree;
      const double cc = std::round(std::cos(k * std::numbers::pi / 2.0));
      const double ss = std::round(std::sin(k * std::numbers::pi / 2.0));
      if (cc != 0.0) add(k, k, cc * t.coeff);
      if (ss != 0.0) add(k, -k, ss * t.coeff);
    }
  }
  return ScalarField::from_coeffs(grid, std::move(c));
}

double default_fuglede_constant(int n) {
  /// 1.5 x calibrate_fuglede_constant on the default grids, seed 2024, 100 members, degree <= 8
  switch (n) {
    case 1:
      return 0.94453744212158863;
    case 2:
      return 0.45319596113550464;
    case 3:
      return 0.8901555407672862;
    default:
      return calibrate_fuglede_constant(SphereGrid::build(n, 200, GridMode::axisymmetric), 2024, 100, 8);
  }
}

double fuglede_log_constant() { return std::numbers::e * std::sqrt(4.0 * std::numbers::pi); }

FugledeResult fuglede_bound(const ScalarField& v, std::optional<double> constant) {
  const SphereGrid& g = v.grid();
  const int n = g.dim();
  FugledeResult r;
  r.constant = constant.value_or(default_fuglede_constant(n));
  const double l2 = norm(v, NormKind::L2);
  if (std::abs(integrate(v)) > 1e-8 * l2 * std::sqrt(weight_sum(g))) {
    fail(ErrorKind::precondition, "fuglede.mean_zero", "v must have zero mean");
  }
  r.lhs = norm(v, NormKind::sup);
  const TangentField dv = gradient(v);
  std::vector<double> g2(v.size());
  double gsup = 0.0;
  for (std::size_t i = 0; i < g2.size(); ++i) {
    g2[i] = dv.norm2(i);
    gsup = std::max(gsup, std::sqrt(g2[i]));
  }
  const double gl2 = std::sqrt(integrate(g, g2));
  if (gl2 == 0.0) {
    r.rhs_raw = 0.0;
  } else if (n == 1) {
    r.rhs_raw = gl2;
  } else if (n == 2) {
    r.rhs_raw = gl2 * std::sqrt(std::log(fuglede_log_constant() * gsup / gl2));
  } else {
    r.rhs_raw = std::pow(gsup, (n - 2.0) / n) * std::pow(gl2, 2.0 / n);
  }
  r.rhs = r.constant * r.rhs_raw;
  r.violated = r.lhs > r.rhs;
  return r;
}

ScalarField random_band_limited(const GridPtr& grid, unsigned seed, int min_degree, int max_degree,
                                double amplitude) {
  const SpectralBasis& b = grid->basis();
  if (max_degree > b.band_limit()) fail(ErrorKind::precondition, "bands.degree", "max degree exceeds band limit");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> c(b.size(), 0.0);
  for (std::size_t k = 0; k < b.size(); ++k) {
    const int d = b.mode(k).degree;
    const double r = nd(rng);
    if (d < min_degree || d > max_degree) continue;
    c[k] = amplitude * r / (1.0 + static_cast<double>(d) * d);
  }
  return ScalarField::from_coeffs(grid, std::move(c));
}

double calibrate_fuglede_constant(const GridPtr& grid, unsigned seed, int count, int max_degree) {
  if (count <= 0) fail(ErrorKind::precondition, "fuglede.family", "empty calibration family");
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    const ScalarField v = random_band_limited(grid, seed + static_cast<unsigned>(k), 1, max_degree, 1.0);
    const FugledeResult r = fuglede_bound(v, 1.0);
    if (r.rhs_raw > 0.0) worst = std::max(worst, r.lhs / r.rhs_raw);
  }
  return 1.5 * worst;
}

}  // namespace isostab
