#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace isostab {

enum class GridMode { full, axisymmetric };

std::string to_string(GridMode mode);
GridMode grid_mode_from_string(const std::string& s);

/// Spectral mode label. order: n=1 full: +k cos, -k sin; n=2: signed m; axisymmetric: 0.
struct Mode {
  int degree = 0;
  int order = 0;
};

class SphereGrid;

/// Orthonormal associated Legendre functions (no Condon-Shortley phase) in
/// triangular layout, with d/dtheta when dp is non-null.
void normalized_legendre(int L, double theta, double* p, double* dp);

/// Orthonormal real basis attached to a grid: Fourier (n=1), real spherical
/// harmonics (n=2), zonal Gegenbauer (axisymmetric).
class SpectralBasis {
 public:
  SpectralBasis(const SphereGrid& grid, int band_limit);

  int band_limit() const { return band_limit_; }
  std::size_t size() const { return modes_.size(); }
  const Mode& mode(std::size_t i) const { return modes_[i]; }
  const std::vector<Mode>& modes() const { return modes_; }
  /// Index of (degree, order) or -1.
  long index(int degree, int order) const;
  /// -Laplacian eigenvalue of a degree-k mode.
  double eigenvalue(int degree) const;
  /// Factor s with natural basis function = s * orthonormal one. Natural means
  /// Schmidt semi-normalized: degree-1 functions are coordinates, zonal P_k(1)=1.
  double natural_scale(std::size_t i) const;

  /// Value of every basis function at an arbitrary unit vector.
  void evaluate_all(std::span<const double> x, std::span<double> out) const;
  /// Value and d/dtheta of every zonal basis function at polar angle theta (axisymmetric only).
  void evaluate_zonal(double theta, std::span<double> val, std::span<double> dval) const;
  double evaluate(std::span<const double> coeffs, std::span<const double> x) const;

  /// Tables used by the transform kernels.
  int dim() const { return n_; }
  int nlat() const { return nlat_; }
  int nlon() const { return nlon_; }
  /// n=2: normalized associated Legendre, ring-major, triangular (l, m>=0) index.
  const std::vector<double>& legendre() const { return plm_; }
  const std::vector<double>& legendre_dtheta() const { return dplm_; }
  std::size_t tri_size() const { return static_cast<std::size_t>(band_limit_ + 1) * (band_limit_ + 2) / 2; }
  static std::size_t tri(int l, int m) { return static_cast<std::size_t>(l) * (l + 1) / 2 + m; }
  /// axisymmetric: Y_k(theta_j), dY_k/dtheta, node-major.
  const std::vector<double>& zonal() const { return zonal_; }
  const std::vector<double>& zonal_dtheta() const { return dzonal_; }

 private:
  int n_;
  int band_limit_;
  int nlat_ = 0;
  int nlon_ = 0;
  bool axisym_;
  double alpha_ = 0.0;
  std::vector<Mode> modes_;
  std::vector<double> scale_;
  std::vector<double> zonal_norm_;
  std::vector<double> plm_, dplm_, zonal_, dzonal_;
};

class SphereGrid {
 public:
  /// resolution: nodes (n=1), latitudes (n=2, longitudes = 2x), polar nodes (axisymmetric).
  static std::shared_ptr<const SphereGrid> build(int n, int resolution, GridMode mode, int band_limit = 0);
  /// Axisymmetric grid of composite Gauss-Legendre panels in theta with the given breakpoints
  /// (first 0, last pi). Spectral transforms are unavailable on such grids.
  static std::shared_ptr<const SphereGrid> axisymmetric_panels(int n, const std::vector<double>& breaks,
                                                               int nodes_per_panel);
  /// Axisymmetric grid from explicit polar angles and d(theta) weights.
  static std::shared_ptr<const SphereGrid> axisymmetric_nodes(int n, std::vector<double> theta,
                                                              std::vector<double> dtheta_weights);

  int dim() const { return n_; }
  int ambient() const { return n_ + 1; }
  GridMode mode() const { return mode_; }
  std::size_t size() const { return weights_.size(); }
  int resolution() const { return resolution_; }
  int band_limit() const { return band_limit_; }
  bool spectral() const { return basis_ != nullptr; }
  const SpectralBasis& basis() const;

  std::span<const double> node(std::size_t i) const {
    return {nodes_.data() + i * ambient(), static_cast<std::size_t>(ambient())};
  }
  const std::vector<double>& nodes_flat() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  /// Polar angle per node (n=2, axisymmetric); for n=1 full equals the angle phi.
  const std::vector<double>& theta() const { return theta_; }
  const std::vector<double>& phi() const { return phi_; }
  /// Unit tangent along increasing theta (axisymmetric, n=2) or phi (n=1 full).
  std::span<const double> e_theta(std::size_t i) const {
    return {etheta_.data() + i * ambient(), static_cast<std::size_t>(ambient())};
  }
  /// Unit tangent along phi (n=2 only).
  std::span<const double> e_phi(std::size_t i) const {
    return {ephi_.data() + i * ambient(), static_cast<std::size_t>(ambient())};
  }
  int nlat() const { return nlat_; }
  int nlon() const { return nlon_; }
  /// Measure of the whole sphere.
  double measure() const;
  /// Pairs of structurally adjacent nodes.
  const std::vector<std::pair<std::size_t, std::size_t>>& neighbor_pairs() const { return pairs_; }
  /// Weight of S^{n-1} slices for axisymmetric grids: |S^{n-1}| sin^{n-1}(theta).
  double slice_factor(double theta) const;

  bool same_as(const SphereGrid& other) const { return this == &other; }

 private:
  SphereGrid() = default;
  void finish(int band_limit);
  static void fill_axisymmetric(SphereGrid& g, int n, const std::vector<double>& theta,
                                const std::vector<double>& dtheta_weights);

  int n_ = 1;
  GridMode mode_ = GridMode::full;
  int resolution_ = 0;
  int band_limit_ = 0;
  int nlat_ = 0;
  int nlon_ = 0;
  std::vector<double> nodes_, weights_, theta_, phi_, etheta_, ephi_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::unique_ptr<SpectralBasis> basis_;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

}  // namespace isostab
