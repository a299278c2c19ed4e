#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "hsg/multi_index.hpp"
#include "hsg/parametric_map.hpp"

namespace hsg {

/// Signed combination sum_nu sigma_nu * I_nu of tensor Gauss-Hermite
/// interpolants. Only nonzero coefficients are stored.
struct CombinationExpansion {
  std::map<MultiIndex, std::int64_t> terms;

  bool empty() const { return terms.empty(); }
  std::uint32_t span() const;
};

/// sigma_{Lambda;nu} = sum over e in {0,1}^d with nu + e in Lambda of (-1)^|e|.
/// Throws NotDownwardClosed. The empty set yields the zero expansion.
CombinationExpansion combination_coeffs(const IndexSet& set);

/// Coefficientwise a - b; zero coefficients are dropped.
CombinationExpansion difference(const CombinationExpansion& a, const CombinationExpansion& b);

/// Parameter point with finitely many nonzero coordinates, stored sparsely
/// as (dimension, value) pairs in increasing dimension.
using SparsePoint = std::vector<std::pair<std::uint32_t, double>>;

std::vector<double> to_dense(const SparsePoint& p, std::size_t dims);

struct SparseGrid {
  std::vector<SparsePoint> points; ///< sorted, unique
  IndexSet provenance;

  std::size_t size() const { return points.size(); }
};

/// pts(Lambda): the union over nu in Lambda of the tensor Gauss-Hermite grids.
SparseGrid sparse_grid_points(const IndexSet& set);

/// Points at which u is actually evaluated: the union of tensor grids of
/// the terms with nonzero combination coefficient.
std::vector<SparsePoint> evaluation_points(const CombinationExpansion& expansion);

/// |evaluation_points(combination_coeffs(set))|.
std::size_t count_evaluation_points(const IndexSet& set);

/// Polynomial in the tensor Hermite basis with coefficients in R^m.
struct HermitePolynomial {
  std::size_t output_dim = 1;
  std::map<MultiIndex, std::vector<double>> coeffs;

  /// Coefficient of nu (zero vector if absent).
  std::vector<double> coefficient(const MultiIndex& nu) const;
  IndexSet support() const;
};

/// I_Lambda u in the tensor Hermite basis; support is contained in Lambda.
HermitePolynomial interpolate(const IndexSet& set, const ParametricMap& u);
HermitePolynomial interpolate(const CombinationExpansion& expansion, const ParametricMap& u);

/// Evaluates sum_nu c_nu H_nu(y).
std::vector<double> interpolant_eval(const HermitePolynomial& p, std::span<const double> y);

/// Q_Lambda u: the weighted node sum, equal to the zero coefficient of I_Lambda u.
/// When `n_points` is given it receives the number of evaluations of u.
std::vector<double> quadrature(const IndexSet& set, const ParametricMap& u,
                               std::size_t* n_points = nullptr);
std::vector<double> quadrature(const CombinationExpansion& expansion, const ParametricMap& u,
                               std::size_t* n_points = nullptr);

/// L^2(gamma) norm via Parseval: the Euclidean norm of all coefficients.
double l2_norm(const HermitePolynomial& p);

/// a - b, coefficientwise over the union of supports.
HermitePolynomial subtract(const HermitePolynomial& a, const HermitePolynomial& b);

/// CSV with header "nu,coeff_0,...,coeff_{m-1}".
void write_polynomial_csv(std::ostream& os, const HermitePolynomial& p);
HermitePolynomial read_polynomial_csv(std::istream& is);

} // namespace hsg
