#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace isostab {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre nodes on [-1, 1], ascending.
GaussRule gauss_legendre(int count);

/// Gauss-Legendre rule mapped to [a, b].
GaussRule gauss_legendre(int count, double a, double b);

/// Measure of the unit sphere S^n in R^{n+1}.
double sphere_measure(int n);

/// Volume of the unit ball in R^{n+1}.
double ball_volume(int n);

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod on [a, b] with relative tolerance.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol = 1e-12, unsigned max_depth = 30);

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace isostab
