#pragma once

#include <span>
#include <vector>

#include "isostab/grid.hpp"

namespace isostab::kernels {

/// Direct-sum transforms: every basis function evaluated at every node.
namespace reference {
std::vector<double> analyze(const SphereGrid& grid, std::span<const double> values);
std::vector<double> synthesize(const SphereGrid& grid, std::span<const double> coeffs);
/// Tangential gradient, node-major ambient vectors.
std::vector<double> synthesize_gradient(const SphereGrid& grid, std::span<const double> coeffs);
}  // namespace reference

/// Separable table-driven transforms, OpenMP over rings / modes / nodes.
namespace parallel {
std::vector<double> analyze(const SphereGrid& grid, std::span<const double> values);
std::vector<double> synthesize(const SphereGrid& grid, std::span<const double> coeffs);
std::vector<double> synthesize_gradient(const SphereGrid& grid, std::span<const double> coeffs);
}  // namespace parallel

}  // namespace isostab::kernels
