#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "hsg/multi_index.hpp"
#include "hsg/multilevel.hpp"
#include "hsg/parametric_map.hpp"

namespace hsg {

/// psi_j(x) = sin((j+1) pi x) (j+1)^{-r} on (0,1).
struct SinDecay {
  double r = 3.0;
};

/// A single mode psi_0 = c.
struct ConstantMode {
  double c = 1.0;
};

/// psi_j = (j+1)^{-r} on the j-th of d_max equal blocks of (0,1), 0 elsewhere.
struct PiecewiseConstantBlocks {
  double r = 2.0;
};

struct CustomSystem {
  std::function<double(std::size_t, double)> psi;
  std::vector<double> breakpoints;  ///< interior points where psi may jump
};

struct RepresentationSystem {
  std::variant<SinDecay, ConstantMode, PiecewiseConstantBlocks, CustomSystem> kind;
  std::size_t d_max = 1;

  double psi(std::size_t j, double x) const;
  /// Interior points of (0,1) where some psi_j is discontinuous.
  std::vector<double> breakpoints() const;
  /// b(y, x) = sum_{j < min(|y|, d_max)} y_j psi_j(x).
  double b(std::span<const double> y, double x) const;
};

enum class QoiKind { point, mean };

struct Qoi {
  QoiKind kind = QoiKind::point;
  double x0 = 1.0;
};

/// -(a(y) u')' = f on (0,1), u(0) = 0, a(y) = exp(b(y)), with the natural
/// condition at 1 chosen so that u' = -exp(-b) F, F(x) = int_0^x f.
struct ModelProblem1D {
  RepresentationSystem system;
  std::function<double(double)> f;
  std::function<double(double)> F;
  Qoi qoi;
  std::size_t n_cells = 64;

  /// f = value everywhere, F(x) = value * x.
  static ModelProblem1D constant_rhs(RepresentationSystem system, double value = 1.0, Qoi qoi = {});
  /// F(x) is computed by adaptive quadrature of f.
  static ModelProblem1D with_rhs(RepresentationSystem system, std::function<double(double)> f,
                                 Qoi qoi = {});
};

/// exp(b(y, x)).
double coeff_eval(const ModelProblem1D& mp, std::span<const double> y, double x);

/// Adaptive Gauss-Legendre on [a, b] to absolute tolerance `tol`, splitting
/// first at `breaks`. Throws QuadratureNonconvergence.
double adaptive_integrate(const std::function<double(double)>& g, double a, double b, double tol = 1e-12,
                          std::span<const double> breaks = {});

/// u(x, y) = -int_0^x exp(-b(y, t)) F(t) dt.
double exact_solution_1d(const ModelProblem1D& mp, std::span<const double> y, double x);

/// Exact QoI (u(x0) or int_0^1 u).
double exact_qoi(const ModelProblem1D& mp, std::span<const double> y);

/// E[QoI] over the Gaussian parameters, using E[exp(-b(y,x))] =
/// exp(sum_j psi_j(x)^2 / 2) inside the one-dimensional integral.
double expected_qoi(const ModelProblem1D& mp);

/// E[u(x0)] = -(x0^2/2) exp(c^2/2) for f = 1 and a single constant mode c.
double expected_qoi_oracle(double c, double x0);

/// Nodal values of the piecewise linear Galerkin solution on n cells.
/// Throws SingularSystem.
std::vector<double> fem_solve_1d(const ModelProblem1D& mp, std::span<const double> y, std::size_t n_cells);

/// QoI of a nodal FEM solution.
double fem_qoi(const ModelProblem1D& mp, std::span<const double> nodal);

/// |u_h|_{H^1} = (sum_i (u_{i+1} - u_i)^2 / h)^{1/2}.
double h1_seminorm(std::span<const double> nodal);

/// |u_h - u(y)|_{H^1}, with u' taken from the closed form.
double fem_h1_error(const ModelProblem1D& mp, std::span<const double> y, std::span<const double> nodal);

/// ||F||_{L^2(0,1)}, the dual norm of the load in the H^1 seminorm.
double load_dual_norm(const ModelProblem1D& mp);

/// max_x |b(y, x)| sampled on a fine grid plus block edges.
double b_sup(const ModelProblem1D& mp, std::span<const double> y, std::size_t samples = 2048);

struct Exact {};
struct Fem {
  std::size_t n_cells = 64;
};
using Fidelity = std::variant<Exact, Fem>;

/// y -> (QoI) as a thread-safe one-output map.
ParametricMap as_parametric_map(const ModelProblem1D& mp, Fidelity fidelity);

/// Fem(sw_j) fidelities for levels 1..sw.max_level().
std::vector<ParametricMap> fem_levels(const ModelProblem1D& mp, const WorkSequence& sw);

/// Forward map O with data delta and SPD noise covariance Gamma (row major).
struct BayesSetup {
  ParametricMap forward;
  std::vector<double> data;
  std::vector<double> gamma;
  std::vector<double> gamma_inv_sqrt;

  /// Validates symmetry and positivity and computes Gamma^{-1/2}.
  static BayesSetup make(ParametricMap forward, std::vector<double> data, std::vector<double> gamma);
  std::size_t m() const { return data.size(); }
};

/// Theta(y) = exp(-1/2 |Gamma^{-1/2}(delta - O(y))|^2).
double posterior_density(const BayesSetup& bs, std::span<const double> y);

/// y -> (phi(y) Theta(y), Theta(y)).
ParametricMap posterior_integrand(const BayesSetup& bs, const ParametricMap& phi);

struct PosteriorResult {
  std::vector<double> numerator;
  double Z = 0.0;
  std::vector<double> expectation;
  std::size_t evaluations = 0;
};

/// Q_Lambda[phi Theta] / Q_Lambda[Theta]. Throws DegenerateNormalization if
/// the quadrature of Theta is not positive.
PosteriorResult posterior_expectation(const BayesSetup& bs, const ParametricMap& phi, const IndexSet& set);

/// Multilevel variant with one setup per level (levels[j-1] for level j).
PosteriorResult posterior_expectation(const LevelAllocation& alloc, std::span<const BayesSetup> levels,
                                      const ParametricMap& phi);

} // namespace hsg
