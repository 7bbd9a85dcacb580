#include "isostab/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace isostab {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const NelderMeadOptions& opts) {
  const std::size_t d = x0.size();
  std::vector<std::vector<double>> p(d + 1, x0);
  for (std::size_t i = 0; i < d; ++i) p[i + 1][i] += opts.initial_step;
  std::vector<double> fv(d + 1);
  for (std::size_t i = 0; i <= d; ++i) fv[i] = f(p[i]);
  std::vector<std::size_t> order(d + 1);
  NelderMeadResult res;
  auto combo = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> r(d);
    for (std::size_t k = 0; k < d; ++k) r[k] = c[k] + t * (w[k] - c[k]);
    return r;
  };
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[d > 0 ? d - 1 : 0];
    double size = 0.0;
    for (std::size_t i = 0; i <= d; ++i)
      for (std::size_t k = 0; k < d; ++k) size = std::max(size, std::abs(p[i][k] - p[best][k]));
    if (std::isfinite(fv[worst]) && fv[worst] - fv[best] <= opts.ftol && size <= std::sqrt(opts.ftol)) {
      res.converged = true;
      break;
    }
    if (size <= opts.xtol) {
      res.converged = true;
      break;
    }
    std::vector<double> c(d, 0.0);
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < d; ++k) c[k] += p[i][k] / d;
    }
    const auto xr = combo(c, p[worst], -1.0);
    const double fr = f(xr);
    if (fr < fv[best]) {
      const auto xe = combo(c, p[worst], -2.0);
      const double fe = f(xe);
      if (fe < fr) {
        p[worst] = xe;
        fv[worst] = fe;
      } else {
        p[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      p[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    const auto xc = combo(c, outside ? xr : p[worst], 0.5);
    const double fc = f(xc);
    if (fc < (outside ? fr : fv[worst])) {
      p[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == best) continue;
      p[i] = combo(p[best], p[i], 0.5);
      fv[i] = f(p[i]);
    }
  }
  const std::size_t best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = p[best];
  res.f = fv[best];
  res.iterations = it;
  return res;
}

}  // namespace isostab
