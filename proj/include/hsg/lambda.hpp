#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "hsg/multi_index.hpp"
#include "hsg/weights.hpp"

namespace hsg {

/// Positive weight attached to each multi-index.
using Surrogate = std::function<double(const MultiIndex&)>;

/// How a surrogate relates to the threshold.
enum class SurrogateMode {
  grows,  ///< c_nu increases with nu; keeps {nu : 1/c_nu >= eps}
  decays, ///< a_nu decreases with nu; keeps {nu : a_nu >= eps}
};

inline constexpr std::size_t kDefaultLambdaCap = 10'000'000;

struct LambdaOptions {
  /// Dimensions >= d_max are inactive.
  std::uint32_t d_max = 0;
  /// ThresholdTooSmall is thrown once the set would exceed this size.
  std::size_t cap = kDefaultLambdaCap;
};

struct LambdaStats {
  /// Evaluations of the inner rejection test.
  std::size_t inner_iterations = 0;
  std::size_t surrogate_calls = 0;
};

/// Threshold set {nu : weight(nu) >= eps} computed by an odometer walk
/// over the multi-indices.
///
/// Requires the (effective, decreasing) weight to be monotone under the
/// componentwise order and anisotropy-ordered: adding e_i to an index with
/// nu_i = nu_j = 0 yields at least the weight of adding e_j when i < j.
/// Under those hypotheses the result is downward closed and the inner test
/// runs at most 4|Lambda| + 1 times.
IndexSet build_lambda(const Surrogate& surrogate, double eps, SurrogateMode mode,
                      const LambdaOptions& options, LambdaStats* stats = nullptr);

/// Reference implementation by exhaustive enumeration of the box
/// {0..box_max}^d_max. Exposed for tests and diagnostics.
IndexSet threshold_box(const Surrogate& surrogate, double eps, SurrogateMode mode,
                       std::uint32_t d_max, std::uint32_t box_max);

/// Lambda_{k,eps} for the c_{k,nu} weights of `w`.
IndexSet build_lambda(const WeightFamily& w, double eps, std::size_t cap = kDefaultLambdaCap,
                      LambdaStats* stats = nullptr);

} // namespace hsg
