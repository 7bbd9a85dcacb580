#pragma once

#include <span>
#include <string>

#include "isostab/field.hpp"
#include "isostab/grid.hpp"

namespace isostab {

double integrate(const ScalarField& field);
double integrate(const SphereGrid& grid, std::span<const double> values);

/// Exact gradient if attached, analytic for zonal jets, spectral with
/// coefficients, finite differences otherwise.
TangentField gradient(const ScalarField& field);
/// Fourth-order finite-difference gradient from the samples alone.
TangentField fd_gradient(const ScalarField& field);

ScalarField laplace_beltrami(const ScalarField& field);
ScalarField fd_laplace_beltrami(const ScalarField& field);

enum class NormKind { L1, L2, sup, W12, W11, C1, Holder };

struct NormSpec {
  NormKind kind = NormKind::L2;
  double alpha = 0.5;
  /// Neighbor spacing cap for the Holder surrogate; <= 0 uses every structural neighbor pair.
  double spacing = 0.0;
};

NormKind norm_kind_from_string(const std::string& s);

double norm(const ScalarField& field, const NormSpec& spec);
inline double norm(const ScalarField& field, NormKind kind) { return norm(field, NormSpec{kind}); }

/// Max difference quotient |f(x)-f(y)|/|x-y|^alpha over neighbor pairs with |x-y| <= spacing.
double holder_seminorm(const ScalarField& field, double alpha, double spacing = 0.0);
double holder_seminorm(const TangentField& field, double alpha, double spacing = 0.0);

}  // namespace isostab
