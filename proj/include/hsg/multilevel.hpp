#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "hsg/lambda.hpp"
#include "hsg/multi_index.hpp"
#include "hsg/parametric_map.hpp"
#include "hsg/smolyak.hpp"

namespace hsg {

/// Per-level evaluation costs sw_0 = 0 < sw_1 < ... < sw_L.
struct WorkSequence {
  std::vector<std::uint64_t> values;
  double K_W = 2.0;

  std::size_t max_level() const { return values.empty() ? 0 : values.size() - 1; }
  std::uint64_t operator[](std::size_t l) const { return values.at(l); }

  /// Checks sw_0 = 0, strict monotonicity and the three growth bounds with
  /// constant K_W on the stored prefix.
  bool satisfies_assumptions() const;
};

/// sw_0 = 0 and sw_l = 2^l for 1 <= l <= L.
WorkSequence default_work_sequence(unsigned L);

/// Discretization level l_nu attached to each multi-index; indices not
/// stored have level 0.
struct LevelAllocation {
  std::map<MultiIndex, unsigned> levels;
  WorkSequence sw;

  unsigned level(const MultiIndex& nu) const;
  unsigned max_level() const;
  /// nu <= mu implies l_nu >= l_mu, checked over the stored entries and
  /// their immediate predecessors.
  bool is_monotone() const;
};

/// Gamma_j = {nu : l_nu >= j} for j = 1..L (Gamma_0 is never materialized).
std::vector<IndexSet> gamma_sets(const LevelAllocation& l);

struct ConstructLevelsParams {
  double q1 = 1.0;
  double alpha = 1.0;
  double eps = 0.1;
  LambdaOptions lambda;
};

/// Level allocation from two increasing surrogates: Lambda_eps from `c`,
/// then per index
///   delta_nu = eps^{-(1/2 - q1/4)/alpha} d_nu^{-1/(1+2 alpha)}
///              (sum_{mu in Lambda_eps} d_mu^{-1/(1+2 alpha)})^{1/(2 alpha)}
/// and l_nu = max{j : sw_j <= delta_nu}, capped at sw.max_level().
/// Throws EmptyAllocation if Lambda_eps is empty.
LevelAllocation construct_levels(const Surrogate& c, const Surrogate& d,
                                 const ConstructLevelsParams& params, const WorkSequence& sw);

/// sum_{j=1}^{L} (I_{Gamma_j} - I_{Gamma_{j+1}}) u^j, with u_levels[j-1] = u^j.
HermitePolynomial ml_interpolate(const LevelAllocation& l, std::span<const ParametricMap> u_levels);

/// sum_{j=1}^{L} (Q_{Gamma_j} - Q_{Gamma_{j+1}}) u^j. `evaluations`, if
/// given, receives the number of evaluations per level (index j-1).
std::vector<double> ml_quadrature(const LevelAllocation& l, std::span<const ParametricMap> u_levels,
                                  std::vector<std::size_t>* evaluations = nullptr);

/// work(l) = sum_{nu : l_nu > 0} p_nu(1) sum_{j=1}^{l_nu} sw_j.
std::uint64_t work(const LevelAllocation& l);
/// The same quantity summed level-major: sum_j sw_j sum_{nu in Gamma_j} p_nu(1).
std::uint64_t work_by_level(const LevelAllocation& l);

/// Pairs (k, nu) of a spatial level and a multi-index.
using LevelIndexSet = std::vector<std::pair<unsigned, MultiIndex>>;

struct GxiParams {
  double q1 = 1.0;
  double q2 = 1.0;
  double alpha = 1.0;
  LambdaOptions lambda;
  unsigned max_k = 63;
};

/// theta = 1/q1 + (1/q1 - 1/q2) / (2 alpha).
double g_xi_exponent(double q1, double q2, double alpha);

/// G(xi) for increasing surrogates sigma1, sigma2:
///   alpha <= 1/q2 - 1/2:  {(k,nu) : 2^k sigma2^q2 <= xi}
///   otherwise:            {(k,nu) : sigma1^q1 <= xi, 2^{(alpha+1/2)k} sigma2 <= xi^theta}
/// Sorted by (k, nu).
LevelIndexSet build_G_xi(double xi, const Surrogate& sigma1, const Surrogate& sigma2,
                         const GxiParams& params);

/// G(xi) restricted to multi-indices with all exponents even.
LevelIndexSet build_G_rev_xi(double xi, const Surrogate& sigma1, const Surrogate& sigma2,
                             const GxiParams& params);

/// Lines "nu<TAB>level".
void write_allocation(std::ostream& os, const LevelAllocation& l);
LevelAllocation read_allocation(std::istream& is, WorkSequence sw);

} // namespace hsg
