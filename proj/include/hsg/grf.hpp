#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "hsg/rng.hpp"

namespace hsg {

/// Matérn kernel with correlation length `lambda` and smoothness `nu`; only
/// nu in {1/2, 3/2, 5/2} is supported.
struct Matern {
  double lambda = 1.0;
  double nu = 0.5;
};

/// rho(x) = exp(-|x| / lambda).
struct Exponential {
  double lambda = 1.0;
};

/// User kernel; must be even with rho(0) = 1.
struct CustomKernel {
  std::function<double(double)> rho;
};

struct CovarianceSpec {
  std::variant<Matern, Exponential, CustomKernel> kind;

  double operator()(double x) const;
};

/// Closed-form Matérn covariance. Throws UnsupportedSmoothness.
double matern_cov(double x, double lambda, double nu);

/// Smooth cutoff: 1 on |t| <= kappa/2, 0 on |t| >= kappa, blended by the
/// integrated cardinal B-spline of degree P - 1 (so C^{P-1}).
double bspline_cutoff(double t, double kappa, unsigned P);

struct Cutoff {
  double kappa = 2.0;
  unsigned P = 3;
};

/// Circulant embedding of a stationary kernel on the grid
/// x_i = -1/2 + i/m, i = 0..m, periodized with period 2 ell.
struct EmbeddingPlan {
  std::size_t m = 0;
  double ell = 0.0;
  double h = 0.0;
  std::size_t s = 0;                ///< circulant size, even
  std::vector<double> row;          ///< first row, length s
  std::vector<double> eigenvalues;  ///< length s, eigenvalues[k] = eigenvalues[s-k]
  double max_imag = 0.0;            ///< largest |Im| returned by the FFT
  bool positive = false;
  std::optional<Cutoff> cutoff;

  std::size_t size() const { return m + 1; }
  double x(std::size_t i) const { return -0.5 + double(i) * h; }
  /// Entry (i, j) of the embedded covariance restricted to the grid.
  double covariance(std::size_t i, std::size_t j) const;

  struct Fft;
  std::shared_ptr<const Fft> fft;
};

/// Builds the plan. With `strict`, a plan that is not positive throws
/// NotPositiveDefinite carrying a suggested larger ell.
EmbeddingPlan circulant_embed_1d(const CovarianceSpec& spec, std::size_t m, double ell,
                                 std::optional<Cutoff> cutoff = std::nullopt, bool strict = true);

/// One sample of N(0, Sigma) on the m + 1 grid points. Throws
/// NotPositiveDefinite for a plan that is not positive.
std::vector<double> sample_grf(const EmbeddingPlan& plan, std::uint64_t seed);

/// Empirical mean and covariance over `n` samples with seeds seed, seed+1, ...
struct GrfStatistics {
  std::size_t samples = 0;
  double max_mean = 0.0;           ///< max_i |mean_i|
  double max_cov_deviation = 0.0;  ///< max_{ij} |C_ij - rho(x_i - x_j)|
};
GrfStatistics grf_statistics(const EmbeddingPlan& plan, std::size_t n, std::uint64_t seed);

/// Writes "x,value" rows.
void write_sample_csv(std::ostream& os, const EmbeddingPlan& plan, std::span<const double> values);

/// sum_{k=1}^{K} z_k sqrt(2T)/(k pi) sin(k pi t / T), with K = z.size().
double brownian_bridge_kl(double T, double t, std::span<const double> z);

/// Flat position of coefficient (j, k) in the Lévy-Ciesielski vector.
inline std::size_t levy_index(unsigned j, std::size_t k) { return (std::size_t(1) << j) - 1 + k; }

/// sum_{j=0}^{J} sum_k z_{jk} 2^{-j/2} h(2^j t - k) / 2 with the hat
/// h(s) = max(1 - 2|s - 1/2|, 0). z has 2^{J+1} - 1 entries laid out by
/// levy_index.
double levy_ciesielski(unsigned J, double t, std::span<const double> z);

/// The same sum with z_{jk} = normal(offset + levy_index(j, k)); only the
/// coefficients whose hat is nonzero at t are drawn.
double levy_ciesielski(unsigned J, double t, const NormalStream& normal, std::uint64_t offset);

} // namespace hsg
