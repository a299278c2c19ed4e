#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hsg/config.hpp"
#include "hsg/multilevel.hpp"

namespace hsg {

/// Least-squares slope of log(y) against log(x) over the last `tail` pairs
/// with positive entries; empty when fewer than `tail` are available.
std::optional<double> fit_rate(const std::vector<double>& x, const std::vector<double>& y,
                               std::size_t tail = 4);

/// Smallest eps > 0 whose measure stays within `budget`, found by geometric
/// bisection (`iterations` steps). `measure` must be nonincreasing in eps;
/// ThresholdTooSmall and LevelTooLarge count as exceeding the budget.
double bisect_eps(const std::function<double(double)>& measure, double budget, int iterations = 40);

struct QuadRow {
  double budget = 0.0;
  double eps = 0.0;
  std::size_t n_points = 0;
  std::uint64_t work = 0;
  double value = 0.0;
  double abs_error = 0.0;
};

struct QuadStudy {
  std::vector<QuadRow> rows;
  std::optional<double> rate;
  double reference = 0.0;
  std::string reference_kind;
};

/// Q_Lambda on Lambda_{2,eps} for each budget (|evaluation points| <= budget).
QuadStudy run_quad_study(const StudyConfig& cfg);

struct InterpRow {
  double budget = 0.0;
  double eps = 0.0;
  std::size_t n_points = 0;
  double l2_error = 0.0;
};

struct InterpStudy {
  std::vector<InterpRow> rows;
  std::optional<double> rate;
  std::size_t reference_points = 0;
};

/// I_Lambda on Lambda_{1,eps}; L^2 error against a reference interpolant on
/// a set with reference_factor times the largest budget of points.
InterpStudy run_interp_study(const StudyConfig& cfg);

struct MlRow {
  double budget = 0.0;
  double eps = 0.0;
  std::uint64_t work = 0;
  unsigned max_level = 0;
  std::size_t evaluations = 0;
  double error = 0.0;
  unsigned sl_level = 0;
  std::uint64_t sl_work = 0;
  std::size_t sl_indices = 0;
  double sl_error = 0.0;
};

struct MlStudy {
  std::vector<MlRow> rows;
  std::optional<double> rate;
  std::string reference_kind;
};

/// Multilevel study with Fem(sw_j) fidelities, sw = default_work_sequence(levels).
/// Each row also reports the best single-level Smolyak result over levels L
/// with work sw_L * sum_{nu in Lambda} p_nu(1) within the budget.
MlStudy run_ml_study(const StudyConfig& cfg, bool quadrature);

/// The level allocation used by run_ml_study for a given eps.
LevelAllocation ml_allocation(const StudyConfig& cfg, double eps, bool quadrature);

struct GrfReport {
  std::size_t samples = 0;
  double max_mean = 0.0;
  double mean_bound = 0.0;
  double max_cov_deviation = 0.0;
  double cov_bound = 0.0;
  double min_eigenvalue = 0.0;
  double kl_variance = 0.0;
  double lc_variance = 0.0;
  double variance_se = 0.0;
};

/// Circulant-embedding statistics and Brownian-bridge variances at t = 1/2.
/// Sample files are written to `out` when given.
GrfReport run_grf(const StudyConfig& cfg, const std::optional<std::filesystem::path>& out = std::nullopt);

struct BayesRow {
  double budget = 0.0;
  double eps = 0.0;
  std::size_t n_points = 0;
  double Z = 0.0;
  double posterior_mean = 0.0;
  double abs_error = 0.0;
};

struct BayesStudy {
  std::vector<BayesRow> rows;
  double reference = 0.0;
  std::string reference_kind;
};

/// Posterior mean of y_1 (linear forward map y -> (y_1..y_m), Gamma = noise I)
/// or of the model QoI (forward = model) on Lambda_{2,eps}.
BayesStudy run_bayes(const StudyConfig& cfg);

/// Runs study `kind` (interp, quad, ml-interp, ml-quad, grf, bayes), writing
/// its CSV and meta.txt into `out`.
void run_study(const std::string& kind, const StudyConfig& cfg, const std::filesystem::path& out);

} // namespace hsg
