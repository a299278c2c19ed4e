#pragma once

// Independent oracles and random generators shared by the unit tests and the
// acceptance binary. Nothing here calls into the recurrences or walks that
// the library implements, so agreement is a real check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "hsg/multi_index.hpp"

namespace hsg::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

inline std::uint32_t uniform_int(Rng& rng, std::uint32_t lo, std::uint32_t hi) {
  return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
}

// Coefficients (ascending powers) of the unnormalized Hermite polynomial
// He_k from Rodrigues' formula: d/dx [q e^{-x^2/2}] = (q' - x q) e^{-x^2/2},
// so He_{k+1} = x He_k - He_k'.
inline std::vector<double> rodrigues_coefficients(unsigned k) {
  std::vector<double> q{1.0};
  for (unsigned step = 0; step < k; ++step) {
    std::vector<double> next(q.size() + 1, 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) next[i + 1] += q[i];
    for (std::size_t i = 1; i < q.size(); ++i) next[i - 1] -= double(i) * q[i];
    q = std::move(next);
  }
  return q;
}

inline double poly_eval(const std::vector<double>& c, double x) {
  double s = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) s = s * x + c[i];
  return s;
}

// Orthonormal H_k(x) = He_k(x) / sqrt(k!).
inline double symbolic_hermite(unsigned k, double x) {
  return poly_eval(rodrigues_coefficients(k), x) / std::sqrt(std::tgamma(double(k) + 1.0));
}

// E[Y^d] for Y ~ N(0,1): 0 for odd d, (d-1)!! for even d.
inline double gaussian_moment(unsigned d) {
  if (d % 2) return 0.0;
  double m = 1.0;
  for (unsigned i = d; i > 1; i -= 2) m *= double(i - 1);
  return m;
}

// E[y^nu] under the product Gaussian measure.
inline double monomial_moment(const MultiIndex& nu) {
  double m = 1.0;
  for (const auto& [d, e] : nu.entries()) m *= gaussian_moment(e);
  return m;
}

inline double monomial_eval(const MultiIndex& nu, std::span<const double> y) {
  double v = 1.0;
  for (const auto& [d, e] : nu.entries()) v *= std::pow(d < y.size() ? y[d] : 0.0, double(e));
  return v;
}

// Lagrange interpolant through (nodes, values) evaluated at x.
inline double lagrange_eval(std::span<const double> nodes, std::span<const double> values, double x) {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    double l = 1.0;
    for (std::size_t j = 0; j < nodes.size(); ++j)
      if (j != i) l *= (x - nodes[j]) / (nodes[i] - nodes[j]);
    s += values[i] * l;
  }
  return s;
}

// Every multi-index in the box {0..box}^dims.
inline std::vector<MultiIndex> box_indices(std::uint32_t dims, std::uint32_t box) {
  std::vector<MultiIndex> out;
  std::vector<std::uint32_t> digits(dims, 0);
  while (true) {
    out.push_back(MultiIndex::from_dense(digits));
    std::uint32_t j = 0;
    while (j < dims && digits[j] == box) digits[j++] = 0;
    if (j == dims) break;
    ++digits[j];
  }
  return out;
}

// Brute-force downward-closedness: every mu <= nu of every member is present.
inline bool brute_downward_closed(const IndexSet& set) {
  for (const auto& nu : set) {
    std::vector<std::uint32_t> bound(nu.span(), 0), digits(nu.span(), 0);
    for (const auto& [d, e] : nu.entries()) bound[d] = e;
    while (true) {
      if (!set.contains(MultiIndex::from_dense(digits))) return false;
      std::size_t j = 0;
      while (j < digits.size() && digits[j] == bound[j]) digits[j++] = 0;
      if (j == digits.size()) break;
      ++digits[j];
    }
  }
  return true;
}

// sigma_nu by enumerating e in {0,1}^span.
inline std::int64_t brute_sigma(const IndexSet& set, const MultiIndex& nu, std::uint32_t span) {
  std::int64_t s = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << span); ++mask) {
    MultiIndex mu = nu;
    int parity = 0;
    for (std::uint32_t j = 0; j < span; ++j)
      if (mask >> j & 1) {
        mu = mu.incremented(j);
        parity ^= 1;
      }
    if (set.contains(mu)) s += parity ? -1 : 1;
  }
  return s;
}

// Random downward-closed set: start from {0} and repeatedly add a random
// index whose backward neighbours are all present.
inline IndexSet random_downward_closed(Rng& rng, std::uint32_t dims, std::size_t max_size,
                                       std::uint32_t max_exponent = 6) {
  IndexSet set{MultiIndex()};
  const std::size_t target = 1 + uniform_int(rng, 0, std::uint32_t(max_size - 1));
  std::size_t attempts = 0;
  while (set.size() < target && attempts++ < 10000) {
    std::vector<MultiIndex> members(set.begin(), set.end());
    const MultiIndex& base = members[uniform_int(rng, 0, std::uint32_t(members.size() - 1))];
    const std::uint32_t d = uniform_int(rng, 0, dims - 1);
    if (base[d] >= max_exponent) continue;
    const MultiIndex cand = base.incremented(d);
    bool ok = true;
    for (const auto& [j, e] : cand.entries())
      if (!set.contains(cand.decremented(j))) ok = false;
    if (ok) set.insert(cand);
  }
  return set;
}

// Increasing product-form surrogate c_nu = prod_j g_j(nu_j) with
// g_j(n) = base_j^n (1+n)^t and base_j nondecreasing in j, which makes the
// decreasing weight 1/c monotone and anisotropy-ordered.
struct ProductSurrogate {
  std::vector<double> base;
  double t = 0.0;

  double operator()(const MultiIndex& nu) const {
    double c = 1.0;
    for (const auto& [d, e] : nu.entries()) c *= std::pow(base[d], double(e)) * std::pow(1.0 + e, t);
    return c;
  }
};

inline ProductSurrogate random_surrogate(Rng& rng, std::uint32_t dims) {
  ProductSurrogate s;
  for (std::uint32_t j = 0; j < dims; ++j) s.base.push_back(uniform(rng, 1.5, 4.0));
  std::sort(s.base.begin(), s.base.end());
  s.t = uniform(rng, 0.0, 2.0);
  return s;
}

// Brute-force {nu in box : 1/c(nu) >= eps}.
inline IndexSet brute_threshold(const std::function<double(const MultiIndex&)>& c, double eps,
                                std::uint32_t dims, std::uint32_t box) {
  IndexSet out;
  for (const auto& nu : box_indices(dims, box))
    if (1.0 / c(nu) >= eps) out.insert(nu);
  return out;
}

} // namespace hsg::testing
