#include "isostab/sphere_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "isostab/error.hpp"
#include "isostab/kernels.hpp"
#include "isostab/quadrature.hpp"

namespace isostab {

namespace {

constexpr double pi = std::numbers::pi;

/// Fornberg weights for derivatives 1 and 2 at z over five abscissae.
void fornberg5(double z, const std::array<double, 5>& x, std::array<double, 5>& d1, std::array<double, 5>& d2) {
  constexpr int n = 4;
  constexpr int m = 2;
  double c[5][3] = {};
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  for (int i = 0; i <= n; ++i) {
    d1[i] = c[i][1];
    d2[i] = c[i][2];
  }
}

/// Derivatives along a line of samples extended by two ghost points at each end.
void line_derivatives(const std::vector<double>& xe, const std::vector<double>& fe, std::vector<double>& d1,
                      std::vector<double>& d2) {
  const std::size_t N = xe.size() - 4;
  d1.assign(N, 0.0);
  d2.assign(N, 0.0);
  std::array<double, 5> x{}, w1{}, w2{};
  for (std::size_t i = 0; i < N; ++i) {
    for (int k = 0; k < 5; ++k) x[k] = xe[i + k];
    fornberg5(xe[i + 2], x, w1, w2);
    for (int k = 0; k < 5; ++k) {
      d1[i] += w1[k] * fe[i + k];
      d2[i] += w2[k] * fe[i + k];
    }
  }
}

/// Polar line with even reflection through both poles.
void polar_line(const std::vector<double>& th, const std::vector<double>& f, const std::vector<double>& f_opp,
                std::vector<double>& d1, std::vector<double>& d2) {
  const std::size_t N = th.size();
  std::vector<double> xe, fe;
  xe.reserve(N + 4);
  fe.reserve(N + 4);
  xe.push_back(-th[1]);
  fe.push_back(f_opp[1]);
  xe.push_back(-th[0]);
  fe.push_back(f_opp[0]);
  for (std::size_t i = 0; i < N; ++i) {
    xe.push_back(th[i]);
    fe.push_back(f[i]);
  }
  xe.push_back(2.0 * pi - th[N - 1]);
  fe.push_back(f_opp[N - 1]);
  xe.push_back(2.0 * pi - th[N - 2]);
  fe.push_back(f_opp[N - 2]);
  line_derivatives(xe, fe, d1, d2);
}

void periodic_line(const double* f, int N, double h, std::vector<double>& d1, std::vector<double>& d2) {
  d1.resize(N);
  d2.resize(N);
  for (int k = 0; k < N; ++k) {
    const double m2 = f[(k - 2 + 2 * N) % N], m1 = f[(k - 1 + N) % N];
    const double p1 = f[(k + 1) % N], p2 = f[(k + 2) % N];
    d1[k] = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    d2[k] = (-m2 + 16.0 * m1 - 30.0 * f[k] + 16.0 * p1 - p2) / (12.0 * h * h);
  }
}

/// Polar and azimuthal first/second derivatives from samples.
struct FdData {
  std::vector<double> ft, ftt, fp, fpp;
};

FdData fd_derivatives(const ScalarField& field) {
  const SphereGrid& g = field.grid();
  const auto& v = field.values();
  FdData d;
  if (g.mode() == GridMode::axisymmetric) {
    polar_line(g.theta(), v, v, d.ft, d.ftt);
    return d;
  }
  if (g.dim() == 1) {
    periodic_line(v.data(), static_cast<int>(g.size()), 2.0 * pi / g.size(), d.ft, d.ftt);
    return d;
  }
  const int nlat = g.nlat(), nlon = g.nlon();
  d.ft.assign(g.size(), 0.0);
  d.ftt.assign(g.size(), 0.0);
  d.fp.assign(g.size(), 0.0);
  d.fpp.assign(g.size(), 0.0);
  std::vector<double> th(nlat), col(nlat), opp(nlat), a1, a2;
  for (int j = 0; j < nlat; ++j) th[j] = g.theta()[static_cast<std::size_t>(j) * nlon];
  for (int k = 0; k < nlon; ++k) {
    const int ko = (k + nlon / 2) % nlon;
    for (int j = 0; j < nlat; ++j) {
      col[j] = v[static_cast<std::size_t>(j) * nlon + k];
      opp[j] = v[static_cast<std::size_t>(j) * nlon + ko];
    }
    polar_line(th, col, opp, a1, a2);
    for (int j = 0; j < nlat; ++j) {
      d.ft[static_cast<std::size_t>(j) * nlon + k] = a1[j];
      d.ftt[static_cast<std::size_t>(j) * nlon + k] = a2[j];
    }
  }
  for (int j = 0; j < nlat; ++j) {
    periodic_line(v.data() + static_cast<std::size_t>(j) * nlon, nlon, 2.0 * pi / nlon, a1, a2);
    for (int k = 0; k < nlon; ++k) {
      d.fp[static_cast<std::size_t>(j) * nlon + k] = a1[k];
      d.fpp[static_cast<std::size_t>(j) * nlon + k] = a2[k];
    }
  }
  return d;
}

}  // namespace

double integrate(const SphereGrid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) fail(ErrorKind::precondition, "field.grid", "value count does not match grid");
  CompensatedSum acc;
  for (std::size_t i = 0; i < values.size(); ++i) acc.add(grid.weights()[i] * values[i]);
  return acc.value();
}

double integrate(const ScalarField& field) { return integrate(field.grid(), field.values()); }

TangentField fd_gradient(const ScalarField& field) {
  const SphereGrid& g = field.grid();
  const FdData d = fd_derivatives(field);
  const int a = g.ambient();
  std::vector<double> out(g.size() * a);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto et = g.e_theta(i);
    for (int c = 0; c < a; ++c) out[i * a + c] = d.ft[i] * et[c];
    if (g.mode() == GridMode::full && g.dim() == 2) {
      const auto ep = g.e_phi(i);
      const double s = std::sin(g.theta()[i]);
      for (int c = 0; c < a; ++c) out[i * a + c] += d.fp[i] / s * ep[c];
    }
  }
  return TangentField(field.grid_ptr(), std::move(out));
}

TangentField gradient(const ScalarField& field) {
  const SphereGrid& g = field.grid();
  if (field.has_exact_gradient()) return TangentField(field.grid_ptr(), field.exact_gradient());
  if (field.is_zonal()) {
    const int a = g.ambient();
    std::vector<double> out(g.size() * a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto x = g.node(i);
      const Jet j = field.jet()(polar_angle(x));
      polar_tangent(x, std::span<double>(out.data() + i * a, a));
      for (int c = 0; c < a; ++c) out[i * a + c] *= j.df;
    }
    return TangentField(field.grid_ptr(), std::move(out));
  }
  if (field.has_coeffs()) {
    return TangentField(field.grid_ptr(), kernels::parallel::synthesize_gradient(g, field.coeffs()));
  }
  return fd_gradient(field);
}

ScalarField fd_laplace_beltrami(const ScalarField& field) {
  const SphereGrid& g = field.grid();
  const FdData d = fd_derivatives(field);
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.mode() == GridMode::axisymmetric) {
      const double t = g.theta()[i];
      out[i] = d.ftt[i] + (g.dim() - 1) * std::cos(t) / std::sin(t) * d.ft[i];
    } else if (g.dim() == 1) {
      out[i] = d.ftt[i];
    } else {
      const double t = g.theta()[i];
      const double s = std::sin(t);
      out[i] = d.ftt[i] + std::cos(t) / s * d.ft[i] + d.fpp[i] / (s * s);
    }
  }
  return ScalarField::from_values(field.grid_ptr(), std::move(out));
}

ScalarField laplace_beltrami(const ScalarField& field) {
  const SphereGrid& g = field.grid();
  if (field.is_zonal()) {
    const ZonalFunction jet = field.jet();
    const int n = g.dim();
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double t = polar_angle(g.node(i));
      const Jet j = jet(t);
      out[i] = j.d2f + (n - 1) * std::cos(t) / std::sin(t) * j.df;
    }
    return ScalarField::from_values(field.grid_ptr(), std::move(out));
  }
  if (field.has_coeffs()) {
    const SpectralBasis& b = g.basis();
    std::vector<double> c = field.coeffs();
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= -b.eigenvalue(b.mode(k).degree);
    return ScalarField::from_coeffs(field.grid_ptr(), std::move(c));
  }
  return fd_laplace_beltrami(field);
}

NormKind norm_kind_from_string(const std::string& s) {
  if (s == "L1") return NormKind::L1;
  if (s == "L2") return NormKind::L2;
  if (s == "sup" || s == "C0") return NormKind::sup;
  if (s == "W12") return NormKind::W12;
  if (s == "W11") return NormKind::W11;
  if (s == "C1") return NormKind::C1;
  if (s == "Holder") return NormKind::Holder;
  fail(ErrorKind::schema, "norm.kind", "unknown norm kind '" + s + "'");
}

double holder_seminorm(const ScalarField& field, double alpha, double spacing) {
  const SphereGrid& g = field.grid();
  double best = 0.0;
  bool any = false;
  for (const auto& [i, j] : g.neighbor_pairs()) {
    const auto x = g.node(i), y = g.node(j);
    double d2 = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) d2 += (x[c] - y[c]) * (x[c] - y[c]);
    const double d = std::sqrt(d2);
    if (spacing > 0.0 && d > spacing) continue;
    any = true;
    best = std::max(best, std::abs(field[i] - field[j]) / std::pow(d, alpha));
  }
  if (!any) fail(ErrorKind::precondition, "norm.holder_spacing", "no neighbor pair within the requested spacing");
  return best;
}

double holder_seminorm(const TangentField& field, double alpha, double spacing) {
  const SphereGrid& g = field.grid();
  double best = 0.0;
  bool any = false;
  for (const auto& [i, j] : g.neighbor_pairs()) {
    const auto x = g.node(i), y = g.node(j);
    const auto u = field.at(i), v = field.at(j);
    double d2 = 0.0, e2 = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
      d2 += (x[c] - y[c]) * (x[c] - y[c]);
      e2 += (u[c] - v[c]) * (u[c] - v[c]);
    }
    const double d = std::sqrt(d2);
    if (spacing > 0.0 && d > spacing) continue;
    any = true;
    best = std::max(best, std::sqrt(e2) / std::pow(d, alpha));
  }
  if (!any) fail(ErrorKind::precondition, "norm.holder_spacing", "no neighbor pair within the requested spacing");
  return best;
}

double norm(const ScalarField& field, const NormSpec& spec) {
  const SphereGrid& g = field.grid();
  const auto& v = field.values();
  auto int_abs = [&] {
    std::vector<double> a(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) a[i] = std::abs(v[i]);
    return integrate(g, a);
  };
  auto int_sq = [&] {
    std::vector<double> a(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) a[i] = v[i] * v[i];
    return integrate(g, a);
  };
  auto sup = [&] {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  switch (spec.kind) {
    case NormKind::L1:
      return int_abs();
    case NormKind::L2:
      return std::sqrt(int_sq());
    case NormKind::sup:
      return sup();
    case NormKind::Holder:
      return holder_seminorm(field, spec.alpha, spec.spacing);
    default:
      break;
  }
  const TangentField grad = gradient(field);
  std::vector<double> gn(v.size()), g2(v.size());
  double gsup = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    g2[i] = grad.norm2(i);
    gn[i] = std::sqrt(g2[i]);
    gsup = std::max(gsup, gn[i]);
  }
  switch (spec.kind) {
    case NormKind::W12:
      return std::sqrt(int_sq() + integrate(g, g2));
    case NormKind::W11:
      return int_abs() + integrate(g, gn);
    case NormKind::C1:
      return sup() + gsup;
    default:
      return 0.0;
  }
}

}  // namespace isostab
