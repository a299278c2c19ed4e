#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hsg {

/// Evaluable map from a finite parameter vector to a point of R^m.
///
/// Coordinates not present in `y` are read as 0. Unless `thread_safe` is
/// false, the callable may be invoked concurrently from several threads.
struct ParametricMap {
  using Fn = std::function<std::vector<double>(std::span<const double>)>;

  std::size_t output_dim = 1;
  Fn fn;
  bool thread_safe = true;

  std::vector<double> operator()(std::span<const double> y) const;

  /// Map returning the same vector everywhere.
  static ParametricMap constant(std::vector<double> value);
  /// Wraps a scalar function.
  static ParametricMap scalar(std::function<double(std::span<const double>)> f,
                              bool thread_safe = true);
};

/// Number of worker threads used for batched evaluations (0 = hardware).
void set_evaluation_threads(unsigned n);
unsigned evaluation_threads();

/// Evaluates `u` at every point; results are stored in input order, so the
/// output does not depend on scheduling.
std::vector<std::vector<double>> evaluate_batch(const ParametricMap& u,
                                                const std::vector<std::vector<double>>& points);

} // namespace hsg
