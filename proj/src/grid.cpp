#include "isostab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "isostab/error.hpp"
#include "isostab/quadrature.hpp"

namespace isostab {

namespace {

constexpr double pi = std::numbers::pi;

/// Gegenbauer C_k^alpha(x) for k = 0..kmax.
void gegenbauer(double alpha, double x, int kmax, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
  out[0] = 1.0;
  if (kmax >= 1) out[1] = 2.0 * alpha * x;
  for (int k = 2; k <= kmax; ++k) {
    out[k] = (2.0 * x * (k + alpha - 1.0) * out[k - 1] - (k + 2.0 * alpha - 2.0) * out[k - 2]) / k;
  }
}

}  // namespace

void normalized_legendre(int L, double theta, double* p, double* dp) {
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  p[SpectralBasis::tri(0, 0)] = 1.0 / std::sqrt(4.0 * pi);
  for (int m = 1; m <= L; ++m) {
    p[SpectralBasis::tri(m, m)] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * p[SpectralBasis::tri(m - 1, m - 1)];
  }
  for (int m = 0; m < L; ++m) {
    p[SpectralBasis::tri(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * p[SpectralBasis::tri(m, m)];
  }
  for (int m = 0; m <= L; ++m) {
    for (int l = m + 2; l <= L; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
      const double b = std::sqrt((static_cast<double>(l - 1) * (l - 1) - static_cast<double>(m) * m) /
                                 (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      p[SpectralBasis::tri(l, m)] = a * (x * p[SpectralBasis::tri(l - 1, m)] - b * p[SpectralBasis::tri(l - 2, m)]);
    }
  }
  if (dp == nullptr) return;
  for (int l = 0; l <= L; ++l) {
    for (int m = 0; m <= l; ++m) {
      double v = l * x * p[SpectralBasis::tri(l, m)];
      if (l > m) {
        v -= std::sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0)) * std::sqrt(static_cast<double>(l - m) * (l + m)) *
             p[SpectralBasis::tri(l - 1, m)];
      }
      dp[SpectralBasis::tri(l, m)] = v / s;
    }
  }
}

std::string to_string(GridMode mode) { return mode == GridMode::full ? "full" : "axisymmetric"; }

GridMode grid_mode_from_string(const std::string& s) {
  if (s == "full") return GridMode::full;
  if (s == "axisymmetric" || s == "axisym") return GridMode::axisymmetric;
  fail(ErrorKind::schema, "grid.mode", "unknown grid mode '" + s + "'");
}

SpectralBasis::SpectralBasis(const SphereGrid& grid, int band_limit)
    : n_(grid.dim()), band_limit_(band_limit), axisym_(grid.mode() == GridMode::axisymmetric) {
  const int L = band_limit;
  if (axisym_) {
    alpha_ = 0.5 * (n_ - 1);
    for (int k = 0; k <= L; ++k) modes_.push_back({k, 0});
    const double omega = sphere_measure(n_ - 1);
    zonal_norm_.resize(L + 1);
    scale_.resize(L + 1);
    for (int k = 0; k <= L; ++k) {
      if (n_ == 1) {
        zonal_norm_[k] = k == 0 ? std::sqrt(2.0 * pi) : std::sqrt(pi);
        scale_[k] = zonal_norm_[k];
      } else {
        const double a = alpha_;
        const double log_h = std::log(pi) + (1.0 - 2.0 * a) * std::log(2.0) + std::lgamma(k + 2.0 * a) -
                             std::lgamma(k + 1.0) - std::log(k + a) - 2.0 * std::lgamma(a);
        zonal_norm_[k] = std::sqrt(omega * std::exp(log_h));
        const double c1 = std::exp(std::lgamma(k + 2.0 * a) - std::lgamma(k + 1.0) - std::lgamma(2.0 * a));
        scale_[k] = zonal_norm_[k] / c1;
      }
    }
    const std::size_t N = grid.size();
    zonal_.resize(N * (L + 1));
    dzonal_.resize(N * (L + 1));
    for (std::size_t j = 0; j < N; ++j) {
      evaluate_zonal(grid.theta()[j], std::span<double>(zonal_.data() + j * (L + 1), L + 1),
                     std::span<double>(dzonal_.data() + j * (L + 1), L + 1));
    }
    return;
  }
  nlat_ = grid.nlat();
  nlon_ = grid.nlon();
  if (n_ == 1) {
    modes_.push_back({0, 0});
    scale_.push_back(std::sqrt(2.0 * pi));
    for (int k = 1; k <= L; ++k) {
      modes_.push_back({k, k});
      modes_.push_back({k, -k});
      scale_.push_back(std::sqrt(pi));
      scale_.push_back(std::sqrt(pi));
    }
    return;
  }
  for (int l = 0; l <= L; ++l) {
    for (int m = -l; m <= l; ++m) {
      modes_.push_back({l, m});
      scale_.push_back(std::sqrt(4.0 * pi / (2.0 * l + 1.0)));
    }
  }
  const std::size_t T = tri_size();
  plm_.resize(nlat_ * T);
  dplm_.resize(nlat_ * T);
  for (int j = 0; j < nlat_; ++j) {
    normalized_legendre(L, grid.theta()[static_cast<std::size_t>(j) * nlon_], plm_.data() + j * T, dplm_.data() + j * T);
  }
}

long SpectralBasis::index(int degree, int order) const {
  if (degree < 0 || degree > band_limit_) return -1;
  if (axisym_) return order == 0 ? degree : -1;
  if (n_ == 1) {
    if (degree == 0) return order == 0 ? 0 : -1;
    if (order == degree) return 2L * degree - 1;
    if (order == -degree) return 2L * degree;
    return -1;
  }
  if (std::abs(order) > degree) return -1;
  return static_cast<long>(degree) * degree + degree + order;
}

double SpectralBasis::eigenvalue(int degree) const { return static_cast<double>(degree) * (degree + n_ - 1); }

double SpectralBasis::natural_scale(std::size_t i) const { return scale_[i]; }

void SpectralBasis::evaluate_zonal(double theta, std::span<double> val, std::span<double> dval) const {
  const int L = band_limit_;
  if (n_ == 1) {
    for (int k = 0; k <= L; ++k) {
      val[k] = std::cos(k * theta) / zonal_norm_[k];
      dval[k] = -k * std::sin(k * theta) / zonal_norm_[k];
    }
    return;
  }
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  std::vector<double> c, c1;
  gegenbauer(alpha_, x, L, c);
  gegenbauer(alpha_ + 1.0, x, std::max(L - 1, 0), c1);
  for (int k = 0; k <= L; ++k) {
    val[k] = c[k] / zonal_norm_[k];
    dval[k] = k == 0 ? 0.0 : -s * 2.0 * alpha_ * c1[k - 1] / zonal_norm_[k];
  }
}

void SpectralBasis::evaluate_all(std::span<const double> x, std::span<double> out) const {
  const int L = band_limit_;
  if (axisym_) {
    const double c = std::clamp(x[n_], -1.0, 1.0);
    std::vector<double> d(L + 1);
    evaluate_zonal(std::acos(c), out.first(L + 1), d);
    return;
  }
  if (n_ == 1) {
    const double phi = std::atan2(x[1], x[0]);
    out[0] = 1.0 / std::sqrt(2.0 * pi);
    for (int k = 1; k <= L; ++k) {
      out[2 * k - 1] = std::cos(k * phi) / std::sqrt(pi);
      out[2 * k] = std::sin(k * phi) / std::sqrt(pi);
    }
    return;
  }
  const double theta = std::acos(std::clamp(x[2], -1.0, 1.0));
  const double phi = std::atan2(x[1], x[0]);
  std::vector<double> p(tri_size());
  normalized_legendre(L, theta, p.data(), nullptr);
  for (int l = 0; l <= L; ++l) {
    out[static_cast<std::size_t>(l) * l + l] = p[tri(l, 0)];
    for (int m = 1; m <= l; ++m) {
      out[static_cast<std::size_t>(l) * l + l + m] = std::sqrt(2.0) * p[tri(l, m)] * std::cos(m * phi);
      out[static_cast<std::size_t>(l) * l + l - m] = std::sqrt(2.0) * p[tri(l, m)] * std::sin(m * phi);
    }
  }
}

double SpectralBasis::evaluate(std::span<const double> coeffs, std::span<const double> x) const {
  std::vector<double> y(size());
  evaluate_all(x, y);
  CompensatedSum acc;
  for (std::size_t i = 0; i < size(); ++i) acc.add(coeffs[i] * y[i]);
  return acc.value();
}

const SpectralBasis& SphereGrid::basis() const {
  if (!basis_) fail(ErrorKind::capability, "grid.spectral", "grid has no spectral basis");
  return *basis_;
}

double SphereGrid::measure() const { return sphere_measure(n_); }

double SphereGrid::slice_factor(double theta) const {
  return sphere_measure(n_ - 1) * std::pow(std::sin(theta), n_ - 1);
}

std::shared_ptr<const SphereGrid> SphereGrid::build(int n, int resolution, GridMode mode, int band_limit) {
  if (resolution < 8) fail(ErrorKind::precondition, "grid.resolution", "resolution must be >= 8");
  if (n < 1) fail(ErrorKind::precondition, "grid.dim", "n must be >= 1");
  if (mode == GridMode::full && n > 2) {
    fail(ErrorKind::capability, "grid.full_mode", "full grids exist only for n = 1, 2; use axisymmetric");
  }
  std::shared_ptr<SphereGrid> g(new SphereGrid());
  g->n_ = n;
  g->mode_ = mode;
  g->resolution_ = resolution;
  if (mode == GridMode::full && n == 1) {
    const int N = resolution;
    g->nlat_ = 1;
    g->nlon_ = N;
    for (int k = 0; k < N; ++k) {
      const double phi = 2.0 * pi * k / N;
      g->nodes_.insert(g->nodes_.end(), {std::cos(phi), std::sin(phi)});
      g->etheta_.insert(g->etheta_.end(), {-std::sin(phi), std::cos(phi)});
      g->weights_.push_back(2.0 * pi / N);
      g->theta_.push_back(phi);
      g->phi_.push_back(phi);
      g->pairs_.emplace_back(k, (k + 1) % N);
    }
    if (band_limit <= 0) band_limit = std::min(64, N / 2 - 1);
    if (band_limit > N / 2 - 1) fail(ErrorKind::precondition, "grid.band_limit", "band limit exceeds N/2 - 1");
  } else if (mode == GridMode::full) {
    const int nlat = resolution;
    const int nlon = 2 * resolution;
    g->nlat_ = nlat;
    g->nlon_ = nlon;
    const GaussRule gl = gauss_legendre(nlat);
    for (int j = 0; j < nlat; ++j) {
      const double z = gl.nodes[nlat - 1 - j];
      const double w = gl.weights[nlat - 1 - j];
      const double theta = std::acos(z);
      const double st = std::sin(theta);
      for (int k = 0; k < nlon; ++k) {
        const double phi = 2.0 * pi * k / nlon;
        const double cp = std::cos(phi), sp = std::sin(phi);
        g->nodes_.insert(g->nodes_.end(), {st * cp, st * sp, z});
        g->etheta_.insert(g->etheta_.end(), {z * cp, z * sp, -st});
        g->ephi_.insert(g->ephi_.end(), {-sp, cp, 0.0});
        g->weights_.push_back(w * 2.0 * pi / nlon);
        g->theta_.push_back(theta);
        g->phi_.push_back(phi);
        const std::size_t i = static_cast<std::size_t>(j) * nlon + k;
        g->pairs_.emplace_back(i, static_cast<std::size_t>(j) * nlon + (k + 1) % nlon);
        if (j + 1 < nlat) g->pairs_.emplace_back(i, i + nlon);
      }
    }
    if (band_limit <= 0) band_limit = std::min(32, nlat - 1);
    if (band_limit > nlat - 1) fail(ErrorKind::precondition, "grid.band_limit", "band limit exceeds nlat - 1");
  } else {
    const GaussRule gl = gauss_legendre(resolution, 0.0, pi);
    std::vector<double> th = gl.nodes;
    std::vector<double> w = gl.weights;
    fill_axisymmetric(*g, n, th, w);
    g->nlat_ = resolution;
    g->nlon_ = 1;
    if (band_limit <= 0) band_limit = std::min(32, resolution / 3);
    if (band_limit > resolution - 1) {
      fail(ErrorKind::precondition, "grid.band_limit", "band limit exceeds resolution - 1");
    }
  }
  if (band_limit < 2) fail(ErrorKind::precondition, "grid.band_limit", "band limit must be >= 2");
  g->finish(band_limit);
  return g;
}

std::shared_ptr<const SphereGrid> SphereGrid::axisymmetric_nodes(int n, std::vector<double> theta,
                                                                 std::vector<double> dtheta_weights) {
  if (n < 1) fail(ErrorKind::precondition, "grid.dim", "n must be >= 1");
  std::shared_ptr<SphereGrid> g(new SphereGrid());
  fill_axisymmetric(*g, n, theta, dtheta_weights);
  g->band_limit_ = 0;
  return g;
}

void SphereGrid::fill_axisymmetric(SphereGrid& grid, int n, const std::vector<double>& theta,
                                   const std::vector<double>& dtheta_weights) {
  if (theta.size() != dtheta_weights.size() || theta.size() < 8) {
    fail(ErrorKind::precondition, "grid.resolution", "need >= 8 polar nodes with matching weights");
  }
  SphereGrid* g = &grid;
  g->n_ = n;
  g->mode_ = GridMode::axisymmetric;
  g->resolution_ = static_cast<int>(theta.size());
  g->nlat_ = g->resolution_;
  g->nlon_ = 1;
  const int a = n + 1;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double t = theta[j];
    if (!(t > 0.0 && t < pi)) fail(ErrorKind::precondition, "grid.theta", "polar nodes must lie in (0, pi)");
    if (j > 0 && !(t > theta[j - 1])) fail(ErrorKind::precondition, "grid.theta", "polar nodes must increase");
    std::vector<double> x(a, 0.0), e(a, 0.0);
    x[0] = std::sin(t);
    x[n] = std::cos(t);
    e[0] = std::cos(t);
    e[n] = -std::sin(t);
    g->nodes_.insert(g->nodes_.end(), x.begin(), x.end());
    g->etheta_.insert(g->etheta_.end(), e.begin(), e.end());
    g->weights_.push_back(dtheta_weights[j] * g->slice_factor(t));
    g->theta_.push_back(t);
    g->phi_.push_back(0.0);
    if (j + 1 < theta.size()) g->pairs_.emplace_back(j, j + 1);
  }
}

std::shared_ptr<const SphereGrid> SphereGrid::axisymmetric_panels(int n, const std::vector<double>& breaks,
                                                                  int nodes_per_panel) {
  if (breaks.size() < 2 || breaks.front() != 0.0 || std::abs(breaks.back() - pi) > 1e-15) {
    fail(ErrorKind::precondition, "grid.panels", "breakpoints must run from 0 to pi");
  }
  std::vector<double> th, w;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    if (!(breaks[p + 1] > breaks[p])) fail(ErrorKind::precondition, "grid.panels", "breakpoints must increase");
    const GaussRule gl = gauss_legendre(nodes_per_panel, breaks[p], breaks[p + 1]);
    th.insert(th.end(), gl.nodes.begin(), gl.nodes.end());
    w.insert(w.end(), gl.weights.begin(), gl.weights.end());
  }
  return axisymmetric_nodes(n, std::move(th), std::move(w));
}

void SphereGrid::finish(int band_limit) {
  band_limit_ = band_limit;
  basis_ = std::make_unique<SpectralBasis>(*this, band_limit);
}

}  // namespace isostab
