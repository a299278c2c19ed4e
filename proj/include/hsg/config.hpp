#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hsg/grf.hpp"
#include "hsg/model.hpp"

namespace hsg {

/// Study and problem settings read from a "key = value" file. Every key is
/// optional; unset keys keep the defaults below. See docs/config.md.
struct StudyConfig {
  // problem
  std::string system = "sin";  ///< sin | constant | blocks
  double r_decay = 3.0;
  double c = 0.5;
  std::size_t d_max = 16;
  double f = 1.0;
  std::string qoi = "point";  ///< point | mean
  double x0 = 1.0;
  std::size_t n_cells = 64;
  std::string fidelity = "exact";  ///< exact | fem

  // weights and thresholds
  double p = 0.5;
  double xi = 1.0;
  unsigned r = 6;
  double tau = 1.0;
  double K = 100.0;
  double K_ml = 1000.0;  ///< K of both multilevel surrogates and of the single-level baseline
  double q1 = 0.5;
  double alpha = 1.0;
  double d_decay = 2.5;  ///< decay of the second surrogate sequence b2_j = (j+1)^{-d_decay}
  std::vector<double> budgets;
  std::vector<double> eps;
  unsigned levels = 12;
  double reference_factor = 2.0;

  // random fields
  std::string cov = "exponential";  ///< exponential | matern
  double lambda = 1.0;
  double nu = 0.5;
  std::size_t m = 64;
  double ell = 2.0;
  std::size_t samples = 1000;
  std::size_t dump = 3;
  double kappa = 0.0;  ///< 0 disables the cutoff
  unsigned P = 3;
  std::size_t bb_terms = 200;
  unsigned lc_levels = 12;

  // Bayesian inversion
  std::string forward = "linear";  ///< linear | model
  std::vector<double> data{1.0};
  double noise = 1.0;

  std::uint64_t seed = 0;
};

/// Parses "key = value" lines; '#' starts a comment. Throws ConfigError
/// naming the source, line and key.
StudyConfig parse_config(std::istream& is, const std::string& source = "<config>");
StudyConfig load_config(const std::string& path);

/// Checks cross-field constraints (monotone budgets and eps grids, ranges).
void validate(const StudyConfig& cfg);

/// The resolved configuration as "key = value" lines in a fixed order.
std::string to_string(const StudyConfig& cfg);

/// Model problem described by the problem keys.
ModelProblem1D make_problem(const StudyConfig& cfg);
Fidelity make_fidelity(const StudyConfig& cfg);
CovarianceSpec make_covariance(const StudyConfig& cfg);

/// b_j = ||psi_j||_inf for the problem's representation system.
std::vector<double> decay_sequence(const StudyConfig& cfg);

} // namespace hsg
