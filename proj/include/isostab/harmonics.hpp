#pragma once

#include <optional>
#include <vector>

#include "isostab/field.hpp"

namespace isostab {

struct HarmonicDecomposition {
  double a = 0.0;
  /// Coefficients of the coordinate functions x_1..x_{n+1}.
  std::vector<double> b;
  ScalarField R;
};

HarmonicDecomposition decompose(const ScalarField& u);

/// Coefficients of the projections of f onto constants and coordinates,
/// normalized by ||f||_L2 (zero when f vanishes).
double low_band_leakage(const ScalarField& f);

/// int |grad R|^2 / int R^2 for R orthogonal to degrees 0 and 1.
double poincare_ratio(const ScalarField& R);

/// One term of a band-coefficient list in natural normalization: degree-1
/// terms are coordinates, zonal terms are P_k(x . e_{n+1}) with P_k(1) = 1.
struct BandTerm {
  int degree = 0;
  /// Signed order; ignored when zonal.
  int order = 0;
  bool zonal = true;
  double coeff = 0.0;
};

ScalarField synthesize(const std::vector<BandTerm>& bands, const GridPtr& grid);

struct FugledeResult {
  /// ||v||_C0
  double lhs = 0.0;
  /// right-hand side without C(n)
  double rhs_raw = 0.0;
  /// constant * rhs_raw
  double rhs = 0.0;
  double constant = 0.0;
  bool violated = false;
};

/// Calibrated C(n) used when no constant is given.
double default_fuglede_constant(int n);
/// Constant inside the n=2 logarithm; makes its argument at least e.
double fuglede_log_constant();
FugledeResult fuglede_bound(const ScalarField& v, std::optional<double> constant = std::nullopt);
/// 1.5 x the largest lhs/rhs_raw over a seeded band-limited family.
double calibrate_fuglede_constant(const GridPtr& grid, unsigned seed, int count, int max_degree);

}  // namespace isostab

namespace isostab {

/// Seeded random band-limited field: orthonormal coefficients N(0,1) * amplitude / (1 + k^2)
/// for min_degree <= k <= max_degree.
ScalarField random_band_limited(const GridPtr& grid, unsigned seed, int min_degree, int max_degree,
                                double amplitude);

}  // namespace isostab
