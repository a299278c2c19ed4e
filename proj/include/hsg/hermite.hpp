#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hsg/multi_index.hpp"

namespace hsg {

/// Largest Gauss-Hermite level for which node accuracy has been validated.
inline constexpr unsigned kMaxHermiteLevel = 64;

/// Evaluates the probabilists' Hermite polynomial H_k normalized so that
/// (H_k) is orthonormal in L^2(R; N(0,1)).
double hermite_eval(unsigned k, double x);

/// Returns [H_0(x), ..., H_{k_max}(x)] from a single recurrence pass.
std::vector<double> hermite_eval_all(unsigned k_max, double x);

/// Writes H_0(x), ..., H_{out.size()-1}(x) into `out`.
void hermite_eval_all(double x, std::span<double> out);

/// (n+1)-point Gauss-Hermite rule for the standard normal measure.
///
/// Nodes are the roots of H_{n+1} in ascending order, symmetric about zero
/// (the middle node of an odd rule is exactly 0). Weights are positive and
/// their left-to-right floating-point sum is exactly 1.
struct HermiteRule {
  unsigned level = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Computes the rule of level n by the Golub-Welsch eigenvalue method.
/// Throws LevelTooLarge for n > max_level.
HermiteRule gauss_hermite_rule(unsigned n, unsigned max_level = kMaxHermiteLevel);

/// Shared, lazily built rule of level n (n <= kMaxHermiteLevel).
const HermiteRule& cached_rule(unsigned n);

/// Product of univariate H_{nu_j}(y_j) over supp(nu). Coordinates beyond
/// y.size() are read as 0.
double tensor_hermite_eval(const MultiIndex& nu, std::span<const double> y);

} // namespace hsg
