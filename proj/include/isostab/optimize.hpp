#pragma once

#include <functional>
#include <vector>

namespace isostab {

struct NelderMeadOptions {
  int max_iter = 500;
  double ftol = 1e-10;
  double xtol = 1e-12;
  double initial_step = 0.05;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const NelderMeadOptions& opts = {});

}  // namespace isostab
