#include "isostab/obstacle.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "isostab/axisym.hpp"
#include "isostab/error.hpp"
#include "isostab/quadrature.hpp"

namespace isostab {

namespace {

constexpr double pi = std::numbers::pi;

/// P1 energy on a uniform polar mesh with two-point Gauss quadrature per element.
class Discretization {
 public:
  Discretization(int n, int elements, double lambda) : n_(n), M_(elements), lambda_(lambda), h_(pi / elements) {
    const double off = 0.5 / std::sqrt(3.0);
    xi_ = {0.5 - off, 0.5 + off};
    S_.resize(2 * M_);
    for (int c = 0; c < M_; ++c) {
      for (int q = 0; q < 2; ++q) {
        const double th = h_ * (c + xi_[q]);
        S_[2 * c + q] = 0.5 * h_ * sphere_measure(n - 1) * std::pow(std::sin(th), n - 1);
      }
    }
    mass_.assign(M_ + 1, 0.0);
    for (int c = 0; c < M_; ++c) {
      for (int q = 0; q < 2; ++q) {
        mass_[c] += S_[2 * c + q] * (1.0 - xi_[q]);
        mass_[c + 1] += S_[2 * c + q] * xi_[q];
      }
    }
  }

  int size() const { return M_ + 1; }
  double step() const { return h_; }
  const std::vector<double>& mass() const { return mass_; }

  struct Local {
    double fp, fv, fp_v, fp_p, fv_v, fpvv, fpvp, fppp;
  };

  Local local(double v, double p) const {
    const int n = n_;
    const double a = 1.0 + v;
    const double W = std::sqrt(a * a + p * p);
    const double an2 = std::pow(a, n - 2), an1 = an2 * a, an = an1 * a;
    Local L;
    L.fp = an1 * W;
    L.fv = lambda_ * an * a / (n + 1);
    L.fp_v = (n - 1) * an2 * W + an / W;
    L.fp_p = an1 * p / W;
    L.fv_v = lambda_ * an;
    const double an3 = n >= 3 ? std::pow(a, n - 3) : 0.0;
    L.fpvv = (n - 1) * (n - 2) * an3 * W + (2 * n - 1) * an1 / W - an * a / (W * W * W);
    L.fpvp = (n - 1) * an2 * p / W - an * p / (W * W * W);
    L.fppp = an * a / (W * W * W);
    return L;
  }

  double energy(const std::vector<double>& v, double* perimeter = nullptr, double* volume = nullptr) const {
    CompensatedSum P, V;
    for (int c = 0; c < M_; ++c) {
      const double p = (v[c + 1] - v[c]) / h_;
      for (int q = 0; q < 2; ++q) {
        const double vq = v[c] * (1.0 - xi_[q]) + v[c + 1] * xi_[q];
        const double a = 1.0 + vq;
        P.add(S_[2 * c + q] * std::pow(a, n_ - 1) * std::sqrt(a * a + p * p));
        V.add(S_[2 * c + q] * std::pow(a, n_ + 1) / (n_ + 1));
      }
    }
    if (perimeter) *perimeter = P.value();
    if (volume) *volume = V.value();
    return P.value() + lambda_ * V.value();
  }

  /// Gradient split into perimeter and volume parts; tridiagonal Hessian (diag, upper) when requested.
  void derivatives(const std::vector<double>& v, std::vector<double>& gP, std::vector<double>& gV,
                   std::vector<double>* diag, std::vector<double>* upper) const {
    gP.assign(M_ + 1, 0.0);
    gV.assign(M_ + 1, 0.0);
    if (diag) diag->assign(M_ + 1, 0.0), upper->assign(M_, 0.0);
    const double dp[2] = {-1.0 / h_, 1.0 / h_};
    for (int c = 0; c < M_; ++c) {
      const double p = (v[c + 1] - v[c]) / h_;
      for (int q = 0; q < 2; ++q) {
        const double phi[2] = {1.0 - xi_[q], xi_[q]};
        const double vq = v[c] * phi[0] + v[c + 1] * phi[1];
        const Local L = local(vq, p);
        const double w = S_[2 * c + q];
        for (int k = 0; k < 2; ++k) {
          gP[c + k] += w * (L.fp_v * phi[k] + L.fp_p * dp[k]);
          gV[c + k] += w * L.fv_v * phi[k];
        }
        if (diag) {
          auto hess = [&](int i, int j) {
            return w * ((L.fpvv + L.fv_v * n_ / (1.0 + vq)) * phi[i] * phi[j] + L.fpvp * (phi[i] * dp[j] + phi[j] * dp[i]) +
                        L.fppp * dp[i] * dp[j]);
          };
          (*diag)[c] += hess(0, 0);
          (*diag)[c + 1] += hess(1, 1);
          (*upper)[c] += hess(0, 1);
        }
      }
    }
  }

 private:
  int n_, M_;
  double lambda_, h_;
  std::array<double, 2> xi_;
  std::vector<double> S_, mass_;
};

std::function<Jet(double)> obstacle_jet(const NormalGraphSet& set) {
  const ScalarField& u = set.u();
  if (u.is_zonal()) return u.jet();
  fail(ErrorKind::capability, "obstacle.zonal", "the obstacle solver needs a zonal set with an analytic jet");
}

ZonalFunction spline_jet(const std::vector<double>& values, double h) {
  auto spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
      values.data(), values.size(), 0.0, h, 0.0, 0.0);
  return [spline](double t) { return Jet{(*spline)(t), spline->prime(t), spline->double_prime(t)}; };
}

double weighted_H(const std::vector<double>& gP, const std::vector<double>& mass, const std::vector<double>& v,
                  int n, std::size_t i) {
  return gP[i] / (mass[i] * std::pow(1.0 + v[i], n));
}

double diameter_of(int n, const ZonalFunction& u) {
  const auto profile = zonal_profile(n, u, 2049);
  return revolution_functionals(profile).diameter;
}

}  // namespace

ObstacleSolveResult truncate_mean_curvature(const NormalGraphSet& set, double lambda, const ObstacleOptions& opts) {
  const int n = set.dim();
  if (!(lambda > 0.0)) fail(ErrorKind::precondition, "obstacle.lambda", "lambda must be positive");
  if (n < 2) fail(ErrorKind::capability, "obstacle.dim", "the obstacle solver covers n >= 2");
  if (opts.elements < 16) fail(ErrorKind::precondition, "obstacle.elements", "need at least 16 elements");
  const auto ujet = obstacle_jet(set);
  const Discretization D(n, opts.elements, lambda);
  const int N = D.size();
  const double h = D.step();

  ObstacleSolveResult r;
  r.dim = n;
  r.lambda = lambda;
  r.theta.resize(N);
  r.u_nodes.resize(N);
  double usup = 0.0;
  for (int i = 0; i < N; ++i) {
    r.theta[i] = i * h;
    r.u_nodes[i] = ujet(std::min(r.theta[i], pi)).f;
    usup = std::max(usup, std::abs(r.u_nodes[i]));
  }
  r.contact_threshold = opts.contact_tol * (1.0 + usup);
  const std::vector<double>& u = r.u_nodes;
  std::vector<double> v = u;
  if (!opts.initial.empty()) {
    if (static_cast<int>(opts.initial.size()) != N) {
      fail(ErrorKind::precondition, "obstacle.initial", "initial iterate must have one value per mesh node");
    }
    for (int i = 0; i < N; ++i) v[i] = std::max(opts.initial[i], u[i]);
  }

  const std::vector<double>& mass = D.mass();
  std::vector<double> gP, gV, g(N), diag, upper;
  auto pg_norm = [&](const std::vector<double>& x, std::vector<double>& pg) {
    double m = 0.0;
    pg.assign(N, 0.0);
    for (int i = 0; i < N; ++i) {
      const bool at_bound = x[i] - u[i] <= 0.0;
      pg[i] = at_bound && g[i] > 0.0 ? 0.0 : g[i];
      m = std::max(m, std::abs(pg[i]) / (mass[i] * std::pow(1.0 + x[i], n)));
    }
    return m;
  };

  double E = D.energy(v);
  r.energy_history.push_back(E);
  std::vector<double> pg;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    D.derivatives(v, gP, gV, &diag, &upper);
    for (int i = 0; i < N; ++i) g[i] = gP[i] + gV[i];
    r.projected_gradient = pg_norm(v, pg);
    if (r.projected_gradient <= opts.gtol) {
      r.converged = true;
      break;
    }
    /// Epsilon-active set: near the obstacle with the gradient pushing into it.
    double dist = 0.0;
    for (int i = 0; i < N; ++i) dist = std::max(dist, std::abs(v[i] - std::max(u[i], v[i] - g[i] / diag[i])));
    const double eps = std::min(1e-3, dist);
    std::vector<int> free_index(N, -1);
    std::vector<int> free_list;
    for (int i = 0; i < N; ++i) {
      const bool active = v[i] - u[i] <= eps && g[i] > 0.0;
      if (!active) {
        free_index[i] = static_cast<int>(free_list.size());
        free_list.push_back(i);
      }
    }
    std::vector<double> d(N, 0.0);
    for (int i = 0; i < N; ++i) {
      if (free_index[i] < 0) d[i] = -g[i] / std::max(diag[i], 1e-300);
    }
    if (!free_list.empty()) {
      const int F = static_cast<int>(free_list.size());
      Eigen::VectorXd rhs(F), sol;
      for (int k = 0; k < F; ++k) rhs[k] = -g[free_list[k]];
      double shift = 0.0;
      for (int attempt = 0; attempt < 30; ++attempt) {
        std::vector<Eigen::Triplet<double>> trip;
        for (int k = 0; k < F; ++k) {
          const int i = free_list[k];
          trip.emplace_back(k, k, diag[i] * (1.0 + shift));
          if (i + 1 < N && free_index[i + 1] >= 0) {
            trip.emplace_back(k, free_index[i + 1], upper[i]);
            trip.emplace_back(free_index[i + 1], k, upper[i]);
          }
        }
        Eigen::SparseMatrix<double> Hm(F, F);
        Hm.setFromTriplets(trip.begin(), trip.end());
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Hm);
        if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) {
          sol = ldlt.solve(rhs);
          break;
        }
        shift = shift == 0.0 ? 1e-8 : 10.0 * shift;
      }
      if (sol.size() != F) {
        for (int k = 0; k < F; ++k) sol.resize(F), sol[k] = rhs[k] / std::max(diag[free_list[k]], 1e-300);
      }
      for (int k = 0; k < F; ++k) d[free_list[k]] = sol[k];
    }

    /// Armijo along the projection arc.
    double alpha = 1.0;
    bool accepted = false;
    std::vector<double> trial(N);
    for (int ls = 0; ls < 60; ++ls) {
      double decrease = 0.0;
      for (int i = 0; i < N; ++i) {
        trial[i] = std::max(u[i], v[i] + alpha * d[i]);
        decrease += g[i] * (v[i] - trial[i]);
      }
      const double Et = D.energy(trial);
      if (Et <= E - 1e-4 * decrease + 1e-14 * std::abs(E)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    v.swap(trial);
    E = D.energy(v);
    r.energy_history.push_back(E);
  }
  r.iterations = it;

  D.derivatives(v, gP, gV, nullptr, nullptr);
  for (int i = 0; i < N; ++i) g[i] = gP[i] + gV[i];
  r.projected_gradient = pg_norm(v, pg);
  r.converged = r.projected_gradient <= opts.gtol;
  r.v_nodes = v;
  r.H_nodes.resize(N);
  for (int i = 0; i < N; ++i) r.H_nodes[i] = weighted_H(gP, mass, v, n, i);

  std::vector<double> th(r.theta.begin() + 1, r.theta.end() - 1), w(N - 2, h);
  const GridPtr grid = SphereGrid::axisymmetric_nodes(n, th, w);
  r.v = ScalarField::zonal(grid, spline_jet(v, h));
  r.H_E = ScalarField::from_values(grid, std::vector<double>(r.H_nodes.begin() + 1, r.H_nodes.end() - 1));
  r.contact_mask.resize(N - 2);
  for (int i = 1; i + 1 < N; ++i) r.contact_mask[i - 1] = v[i] - u[i] <= r.contact_threshold;
  return r;
}

TruncationReport verify_truncation(const ObstacleSolveResult& res, const NormalGraphSet& original,
                                   const ObstacleOptions& opts) {
  const int n = res.dim;
  const double lambda = res.lambda;
  const int N = static_cast<int>(res.theta.size());
  const int M = N - 1;
  const Discretization D(n, M, lambda);
  const double h = D.step();
  const auto& v = res.v_nodes;
  const auto& u = res.u_nodes;
  TruncationReport rep;
  rep.delta = original.deficit();

  double Pv = 0.0, Vv = 0.0, Pu = 0.0, Vu = 0.0;
  rep.energy_E = D.energy(v, &Pv, &Vv);
  rep.energy_Omega = D.energy(u, &Pu, &Vu);
  rep.volume_gain = Vv - Vu;

  std::vector<char> free(N);
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i) {
    free[i] = v[i] - u[i] > res.contact_threshold;
    rep.min_gap = std::min(rep.min_gap, v[i] - u[i]);
    rep.free_nodes += free[i];
  }
  /// Free boundary area: whole elements between free nodes, half of each transition element.
  const double off = 0.5 / std::sqrt(3.0);
  CompensatedSum area;
  for (int c = 0; c < M; ++c) {
    const double share = 0.5 * (free[c] + free[c + 1]);
    if (share == 0.0) continue;
    const double p = (v[c + 1] - v[c]) / h;
    for (double xi : {0.5 - off, 0.5 + off}) {
      const double th = h * (c + xi);
      const double a = 1.0 + v[c] * (1.0 - xi) + v[c + 1] * xi;
      area.add(share * 0.5 * h * sphere_measure(n - 1) * std::pow(std::sin(th), n - 1) * std::pow(a, n - 1) *
               std::sqrt(a * a + p * p));
    }
  }
  rep.free_area = area.value();
  rep.distance_lhs = lambda * rep.volume_gain + rep.free_area;
  rep.distance_ok = rep.distance_lhs <= rep.delta * 1.05 + 1e-12 * sphere_measure(n);

  const auto ujet = original.u().jet();
  rep.sup_H_Omega_plus = std::max(0.0, original.sup_mean_curvature());
  for (int i = 1; i < M; ++i) {
    rep.sup_H_Omega_plus = std::max(rep.sup_H_Omega_plus, zonal_mean_curvature(n, res.theta[i], ujet(res.theta[i])));
  }
  rep.H_bound = std::max(rep.sup_H_Omega_plus, lambda);
  rep.contact_multiplier_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i) {
    rep.sup_abs_H_E = std::max(rep.sup_abs_H_E, std::abs(res.H_nodes[i]));
    if (free[i]) {
      rep.complementarity_residual = std::max(rep.complementarity_residual, std::abs(res.H_nodes[i] + lambda));
    } else {
      rep.contact_multiplier_min = std::min(rep.contact_multiplier_min, res.H_nodes[i] + lambda);
    }
  }
  if (rep.free_nodes == static_cast<std::size_t>(N)) rep.contact_multiplier_min = 0.0;
  rep.curvature_ok = rep.sup_abs_H_E <= rep.H_bound + 1e-3;

  const ZonalFunction vj = res.v.jet();
  constexpr int margin = 8;
  const int polar = std::max(margin, M / 32);
  for (int i = polar; i + polar <= M; ++i) {
    bool interior = true;
    for (int k = i - margin; k <= i + margin; ++k) interior = interior && free[k];
    if (!interior) continue;
    rep.cmc_residual = std::max(rep.cmc_residual, std::abs(zonal_mean_curvature(n, res.theta[i], vj(res.theta[i])) + lambda));
  }
  rep.cmc_ok = rep.complementarity_residual <= opts.cmc_tol && rep.cmc_residual <= opts.cmc_tol;

  rep.diameter_E = diameter_of(n, vj);
  rep.diameter_Omega = diameter_of(n, ujet);
  rep.passed = res.converged && rep.distance_ok && rep.curvature_ok && rep.cmc_ok &&
               rep.min_gap >= -1e-12 && rep.contact_multiplier_min >= -opts.cmc_tol;
  return rep;
}

ScalarField dimple_field(GridPtr grid, double depth, double width) {
  const int n = grid->dim();
  const double s = enforce_H_le_n(dented_sphere_profile(n, depth, width, 1025)).scale;
  return ScalarField::zonal(std::move(grid), [s, depth, width](double t) {
    const Jet b = dent_shape(t / width);
    return Jet{s * (1.0 - depth * b.f) - 1.0, -s * depth * b.df / width, -s * depth * b.d2f / (width * width)};
  });
}

}  // namespace isostab
