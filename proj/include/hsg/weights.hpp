#pragma once

#include <span>
#include <vector>

#include "hsg/multi_index.hpp"

namespace hsg {

/// p_nu(tau, lambda) = prod_j (1 + lambda * nu_j)^tau.
double p_weight(const MultiIndex& nu, double tau, double lambda = 1.0);

/// beta_nu(r, rho) = prod_j sum_{l=0}^{r} binom(nu_j, l) * rho_j^(2l).
/// Requires supp(nu) to lie within rho.
double beta_weight(const MultiIndex& nu, unsigned r, std::span<const double> rho);

/// Parameter bundle of the computable surrogate weights c_{k,nu}.
///
/// Dimensions at or beyond `b.size()` are inactive. The derived decay
/// sequence is rho_j = b_j^(p-1) * xi / (4 sqrt(r!) ||b||_{l^p}).
struct WeightFamily {
  std::vector<double> b;
  double p = 0.5;
  double xi = 1.0;
  unsigned r = 4;
  double tau = 3.0;
  unsigned k = 1; ///< 1 for interpolation, 2 for quadrature
  double K = 1.0;
  std::vector<double> rho;

  /// Validates the parameters and fills `rho`.
  /// Throws std::invalid_argument if p is outside (0,1), b has a nonpositive
  /// entry, k is not 1 or 2, or r <= max(tau, k).
  static WeightFamily make(std::vector<double> b, double p, double xi, unsigned r, double tau,
                           unsigned k, double K);

  std::size_t dimensions() const { return b.size(); }
};

/// c_{k,nu} = prod_{j in supp nu} max(1, K rho_j)^(2k) * nu_j^(r - tau).
double c_weight(const WeightFamily& w, const MultiIndex& nu);

} // namespace hsg
