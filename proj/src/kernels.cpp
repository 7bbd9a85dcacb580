#include "isostab/kernels.hpp"

#include <cmath>
#include <numbers>

#include "isostab/error.hpp"
#include "isostab/quadrature.hpp"

namespace isostab::kernels {

namespace {

constexpr double pi = std::numbers::pi;

void check_values(const SphereGrid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) fail(ErrorKind::precondition, "field.grid", "value count does not match grid");
}

void check_coeffs(const SphereGrid& grid, std::span<const double> coeffs) {
  if (coeffs.size() != grid.basis().size()) {
    fail(ErrorKind::precondition, "field.band_limit", "coefficient count does not match band limit");
  }
}

/// Gradient of the basis at node i, as ambient vectors: out[mode * a + c].
void basis_gradient_at(const SphereGrid& grid, std::size_t i, std::vector<double>& val, std::vector<double>& grad) {
  const SpectralBasis& b = grid.basis();
  const int a = grid.ambient();
  const int L = b.band_limit();
  val.assign(b.size(), 0.0);
  grad.assign(b.size() * a, 0.0);
  const auto et = grid.e_theta(i);
  if (grid.mode() == GridMode::axisymmetric) {
    std::vector<double> d(L + 1);
    b.evaluate_zonal(grid.theta()[i], std::span<double>(val.data(), L + 1), d);
    for (int k = 0; k <= L; ++k)
      for (int c = 0; c < a; ++c) grad[k * a + c] = d[k] * et[c];
    return;
  }
  if (grid.dim() == 1) {
    const double phi = grid.phi()[i];
    val[0] = 1.0 / std::sqrt(2.0 * pi);
    for (int k = 1; k <= L; ++k) {
      const double cs = std::cos(k * phi) / std::sqrt(pi);
      const double sn = std::sin(k * phi) / std::sqrt(pi);
      val[2 * k - 1] = cs;
      val[2 * k] = sn;
      for (int c = 0; c < 2; ++c) {
        grad[(2 * k - 1) * 2 + c] = -k * sn * et[c];
        grad[(2 * k) * 2 + c] = k * cs * et[c];
      }
    }
    return;
  }
  const double theta = grid.theta()[i];
  const double phi = grid.phi()[i];
  const double st = std::sin(theta);
  std::vector<double> p(b.tri_size()), dp(b.tri_size());
  normalized_legendre(L, theta, p.data(), dp.data());
  const auto ep = grid.e_phi(i);
  const double r2 = std::sqrt(2.0);
  for (int l = 0; l <= L; ++l) {
    const std::size_t base = static_cast<std::size_t>(l) * l + l;
    val[base] = p[SpectralBasis::tri(l, 0)];
    for (int c = 0; c < 3; ++c) grad[base * 3 + c] = dp[SpectralBasis::tri(l, 0)] * et[c];
    for (int m = 1; m <= l; ++m) {
      const double cm = std::cos(m * phi), sm = std::sin(m * phi);
      const double P = p[SpectralBasis::tri(l, m)], dP = dp[SpectralBasis::tri(l, m)];
      val[base + m] = r2 * P * cm;
      val[base - m] = r2 * P * sm;
      for (int c = 0; c < 3; ++c) {
        grad[(base + m) * 3 + c] = r2 * (dP * cm * et[c] - m * P * sm / st * ep[c]);
        grad[(base - m) * 3 + c] = r2 * (dP * sm * et[c] + m * P * cm / st * ep[c]);
      }
    }
  }
}

}  // namespace

namespace reference {

std::vector<double> analyze(const SphereGrid& grid, std::span<const double> values) {
  check_values(grid, values);
  const SpectralBasis& b = grid.basis();
  std::vector<CompensatedSum> acc(b.size());
  std::vector<double> y(b.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    b.evaluate_all(grid.node(i), y);
    const double wf = grid.weights()[i] * values[i];
    for (std::size_t k = 0; k < b.size(); ++k) acc[k].add(wf * y[k]);
  }
  std::vector<double> out(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) out[k] = acc[k].value();
  return out;
}

std::vector<double> synthesize(const SphereGrid& grid, std::span<const double> coeffs) {
  check_coeffs(grid, coeffs);
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = grid.basis().evaluate(coeffs, grid.node(i));
  return out;
}

std::vector<double> synthesize_gradient(const SphereGrid& grid, std::span<const double> coeffs) {
  check_coeffs(grid, coeffs);
  const int a = grid.ambient();
  std::vector<double> out(grid.size() * a, 0.0);
  std::vector<double> val, grad;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    basis_gradient_at(grid, i, val, grad);
    for (std::size_t k = 0; k < coeffs.size(); ++k)
      for (int c = 0; c < a; ++c) out[i * a + c] += coeffs[k] * grad[k * a + c];
  }
  return out;
}

}  // namespace reference

namespace parallel {

namespace {

void trig_table(int nlon, int L, std::vector<double>& cs, std::vector<double>& sn) {
  cs.resize(static_cast<std::size_t>(nlon) * (L + 1));
  sn.resize(cs.size());
  for (int k = 0; k < nlon; ++k) {
    const double phi = 2.0 * pi * k / nlon;
    for (int m = 0; m <= L; ++m) {
      cs[static_cast<std::size_t>(k) * (L + 1) + m] = std::cos(m * phi);
      sn[static_cast<std::size_t>(k) * (L + 1) + m] = std::sin(m * phi);
    }
  }
}

inline std::size_t sh(int l, int m) { return static_cast<std::size_t>(l) * l + l + m; }

}  // namespace

std::vector<double> analyze(const SphereGrid& grid, std::span<const double> values) {
  check_values(grid, values);
  const SpectralBasis& b = grid.basis();
  const int L = b.band_limit();
  std::vector<double> out(b.size(), 0.0);
  if (grid.mode() == GridMode::axisymmetric) {
    const auto& Y = b.zonal();
    const long N = static_cast<long>(grid.size());
#pragma omp parallel for schedule(static)
    for (int k = 0; k <= L; ++k) {
      CompensatedSum acc;
      for (long j = 0; j < N; ++j) acc.add(grid.weights()[j] * values[j] * Y[j * (L + 1) + k]);
      out[k] = acc.value();
    }
    return out;
  }
  const int nlon = grid.nlon();
  std::vector<double> cs, sn;
  trig_table(nlon, L, cs, sn);
  if (grid.dim() == 1) {
    const double w = grid.weights()[0];
#pragma omp parallel for schedule(static)
    for (int m = 0; m <= L; ++m) {
      CompensatedSum ac, as;
      for (int k = 0; k < nlon; ++k) {
        ac.add(values[k] * cs[static_cast<std::size_t>(k) * (L + 1) + m]);
        as.add(values[k] * sn[static_cast<std::size_t>(k) * (L + 1) + m]);
      }
      if (m == 0) {
        out[0] = w * ac.value() / std::sqrt(2.0 * pi);
      } else {
        out[2 * m - 1] = w * ac.value() / std::sqrt(pi);
        out[2 * m] = w * as.value() / std::sqrt(pi);
      }
    }
    return out;
  }
  const int nlat = grid.nlat();
  std::vector<double> fc(static_cast<std::size_t>(nlat) * (L + 1)), fs(fc.size());
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nlat; ++j) {
    const double* f = values.data() + static_cast<std::size_t>(j) * nlon;
    const double w = grid.weights()[static_cast<std::size_t>(j) * nlon];
    for (int m = 0; m <= L; ++m) {
      CompensatedSum ac, as;
      for (int k = 0; k < nlon; ++k) {
        ac.add(f[k] * cs[static_cast<std::size_t>(k) * (L + 1) + m]);
        as.add(f[k] * sn[static_cast<std::size_t>(k) * (L + 1) + m]);
      }
      fc[static_cast<std::size_t>(j) * (L + 1) + m] = w * ac.value();
      fs[static_cast<std::size_t>(j) * (L + 1) + m] = w * as.value();
    }
  }
  const auto& P = b.legendre();
  const std::size_t T = b.tri_size();
  const double r2 = std::sqrt(2.0);
#pragma omp parallel for schedule(dynamic)
  for (int l = 0; l <= L; ++l) {
    for (int m = 0; m <= l; ++m) {
      CompensatedSum ac, as;
      for (int j = 0; j < nlat; ++j) {
        const double p = P[j * T + SpectralBasis::tri(l, m)];
        ac.add(p * fc[static_cast<std::size_t>(j) * (L + 1) + m]);
        as.add(p * fs[static_cast<std::size_t>(j) * (L + 1) + m]);
      }
      if (m == 0) {
        out[sh(l, 0)] = ac.value();
      } else {
        out[sh(l, m)] = r2 * ac.value();
        out[sh(l, -m)] = r2 * as.value();
      }
    }
  }
  return out;
}

std::vector<double> synthesize(const SphereGrid& grid, std::span<const double> coeffs) {
  check_coeffs(grid, coeffs);
  const SpectralBasis& b = grid.basis();
  const int L = b.band_limit();
  std::vector<double> out(grid.size(), 0.0);
  if (grid.mode() == GridMode::axisymmetric) {
    const auto& Y = b.zonal();
    const long N = static_cast<long>(grid.size());
#pragma omp parallel for schedule(static)
    for (long j = 0; j < N; ++j) {
      double s = 0.0;
      for (int k = 0; k <= L; ++k) s += coeffs[k] * Y[j * (L + 1) + k];
      out[j] = s;
    }
    return out;
  }
  const int nlon = grid.nlon();
  std::vector<double> cs, sn;
  trig_table(nlon, L, cs, sn);
  if (grid.dim() == 1) {
    const double c0 = coeffs[0] / std::sqrt(2.0 * pi);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < nlon; ++k) {
      double s = c0;
      for (int m = 1; m <= L; ++m) {
        s += (coeffs[2 * m - 1] * cs[static_cast<std::size_t>(k) * (L + 1) + m] +
              coeffs[2 * m] * sn[static_cast<std::size_t>(k) * (L + 1) + m]) /
             std::sqrt(pi);
      }
      out[k] = s;
    }
    return out;
  }
  const int nlat = grid.nlat();
  const auto& P = b.legendre();
  const std::size_t T = b.tri_size();
  const double r2 = std::sqrt(2.0);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nlat; ++j) {
    std::vector<double> ac(L + 1, 0.0), as(L + 1, 0.0);
    for (int m = 0; m <= L; ++m) {
      for (int l = m; l <= L; ++l) {
        const double p = P[j * T + SpectralBasis::tri(l, m)];
        ac[m] += coeffs[sh(l, m)] * p;
        if (m > 0) as[m] += coeffs[sh(l, -m)] * p;
      }
      if (m > 0) {
        ac[m] *= r2;
        as[m] *= r2;
      }
    }
    for (int k = 0; k < nlon; ++k) {
      double s = ac[0];
      for (int m = 1; m <= L; ++m) {
        s += ac[m] * cs[static_cast<std::size_t>(k) * (L + 1) + m] + as[m] * sn[static_cast<std::size_t>(k) * (L + 1) + m];
      }
      out[static_cast<std::size_t>(j) * nlon + k] = s;
    }
  }
  return out;
}

std::vector<double> synthesize_gradient(const SphereGrid& grid, std::span<const double> coeffs) {
  check_coeffs(grid, coeffs);
  const SpectralBasis& b = grid.basis();
  const int L = b.band_limit();
  const int a = grid.ambient();
  std::vector<double> out(grid.size() * a, 0.0);
  if (grid.mode() == GridMode::axisymmetric) {
    const auto& dY = b.zonal_dtheta();
    const long N = static_cast<long>(grid.size());
#pragma omp parallel for schedule(static)
    for (long j = 0; j < N; ++j) {
      double s = 0.0;
      for (int k = 0; k <= L; ++k) s += coeffs[k] * dY[j * (L + 1) + k];
      const auto et = grid.e_theta(j);
      for (int c = 0; c < a; ++c) out[j * a + c] = s * et[c];
    }
    return out;
  }
  const int nlon = grid.nlon();
  std::vector<double> cs, sn;
  trig_table(nlon, L, cs, sn);
  if (grid.dim() == 1) {
#pragma omp parallel for schedule(static)
    for (int k = 0; k < nlon; ++k) {
      double s = 0.0;
      for (int m = 1; m <= L; ++m) {
        s += m * (-coeffs[2 * m - 1] * sn[static_cast<std::size_t>(k) * (L + 1) + m] +
                  coeffs[2 * m] * cs[static_cast<std::size_t>(k) * (L + 1) + m]) /
             std::sqrt(pi);
      }
      const auto et = grid.e_theta(k);
      out[2 * k] = s * et[0];
      out[2 * k + 1] = s * et[1];
    }
    return out;
  }
  const int nlat = grid.nlat();
  const auto& P = b.legendre();
  const auto& dP = b.legendre_dtheta();
  const std::size_t T = b.tri_size();
  const double r2 = std::sqrt(2.0);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nlat; ++j) {
    std::vector<double> ac(L + 1, 0.0), as(L + 1, 0.0), dc(L + 1, 0.0), ds(L + 1, 0.0);
    for (int m = 0; m <= L; ++m) {
      for (int l = m; l <= L; ++l) {
        const double p = P[j * T + SpectralBasis::tri(l, m)];
        const double dp = dP[j * T + SpectralBasis::tri(l, m)];
        ac[m] += coeffs[sh(l, m)] * p;
        dc[m] += coeffs[sh(l, m)] * dp;
        if (m > 0) {
          as[m] += coeffs[sh(l, -m)] * p;
          ds[m] += coeffs[sh(l, -m)] * dp;
        }
      }
      if (m > 0) {
        ac[m] *= r2;
        as[m] *= r2;
        dc[m] *= r2;
        ds[m] *= r2;
      }
    }
    const double st = std::sin(grid.theta()[static_cast<std::size_t>(j) * nlon]);
    for (int k = 0; k < nlon; ++k) {
      double ft = dc[0];
      double fp = 0.0;
      for (int m = 1; m <= L; ++m) {
        const double c = cs[static_cast<std::size_t>(k) * (L + 1) + m];
        const double s = sn[static_cast<std::size_t>(k) * (L + 1) + m];
        ft += dc[m] * c + ds[m] * s;
        fp += m * (-ac[m] * s + as[m] * c);
      }
      fp /= st;
      const std::size_t i = static_cast<std::size_t>(j) * nlon + k;
      const auto et = grid.e_theta(i);
      const auto ep = grid.e_phi(i);
      for (int c = 0; c < 3; ++c) out[i * 3 + c] = ft * et[c] + fp * ep[c];
    }
  }
  return out;
}

}  // namespace parallel

}  // namespace isostab::kernels
