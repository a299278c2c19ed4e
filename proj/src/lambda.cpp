#include "hsg/lambda.hpp"

#include <cassert>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "hsg/errors.hpp"

namespace hsg {

namespace {

class MemoizedWeight {
public:
  MemoizedWeight(const Surrogate& s, SurrogateMode mode, std::uint32_t d_max, LambdaStats& stats)
      : surrogate_(s), mode_(mode), d_max_(d_max), stats_(stats) {}

  // Effective decreasing weight; inactive dimensions weigh 0.
  double operator()(const MultiIndex& nu) {
    if (nu.span() > d_max_) return 0.0;
    auto it = cache_.find(nu);
    if (it != cache_.end()) return it->second;
    ++stats_.surrogate_calls;
    const double raw = surrogate_(nu);
    double v = raw;
    if (mode_ == SurrogateMode::grows) {
      if (!(raw > 0.0)) throw std::domain_error("build_lambda: surrogate must be positive");
      v = 1.0 / raw;
    }
    cache_.emplace(nu, v);
    return v;
  }

private:
  const Surrogate& surrogate_;
  SurrogateMode mode_;
  std::uint32_t d_max_;
  LambdaStats& stats_;
  std::unordered_map<MultiIndex, double, MultiIndexHash> cache_;
};

} // namespace

IndexSet build_lambda(const Surrogate& surrogate, double eps, SurrogateMode mode,
                      const LambdaOptions& options, LambdaStats* stats) {
  if (!(eps > 0.0)) throw std::invalid_argument("build_lambda: eps must be positive");
  LambdaStats local;
  LambdaStats& st = stats ? *stats : local;
  st = {};
  MemoizedWeight weight(surrogate, mode, options.d_max, st);

  IndexSet result;
  // The walk keeps a dense copy of the current index for O(1) updates.
  std::vector<std::uint32_t> nu(options.d_max + 1, 0);
  MultiIndex current;
  if (weight(current) < eps) return result;
  result.insert(current);

  auto first_nonzero = [&]() -> std::uint32_t {
    for (std::uint32_t j = 0; j < options.d_max; ++j)
      if (nu[j] != 0) return j;
    return options.d_max;
  };

  while (true) {
    std::uint32_t d = 0;
    while (true) {
      ++st.inner_iterations;
      const double w = d < options.d_max ? weight(current.incremented(d)) : 0.0;
      if (w >= eps) break;
      if (d < options.d_max && nu[d] != 0) {
        // Reject nu + e_d with nu_d > 0: reset this digit and carry.
        nu[d] = 0;
        current = current.with(d, 0);
        ++d;
      } else if (!current.empty()) {
        // Reject nu + e_d with nu_d = 0: later empty dimensions are rejected too.
        d = first_nonzero();
      } else {
        return result;
      }
    }
    ++nu[d];
    current = current.incremented(d);
    result.insert(current);
    if (result.size() > options.cap)
      throw ThresholdTooSmall("threshold set exceeds cap of " + std::to_string(options.cap) +
                              " multi-indices");
  }
}

IndexSet threshold_box(const Surrogate& surrogate, double eps, SurrogateMode mode,
                       std::uint32_t d_max, std::uint32_t box_max) {
  IndexSet out;
  std::vector<std::uint32_t> digits(d_max, 0);
  while (true) {
    const MultiIndex nu = MultiIndex::from_dense(digits);
    const double raw = surrogate(nu);
    const double w = mode == SurrogateMode::grows ? 1.0 / raw : raw;
    if (w >= eps) out.insert(nu);
    std::uint32_t j = 0;
    while (j < d_max && digits[j] == box_max) digits[j++] = 0;
    if (j == d_max) break;
    ++digits[j];
  }
  return out;
}

IndexSet build_lambda(const WeightFamily& w, double eps, std::size_t cap, LambdaStats* stats) {
#ifndef NDEBUG
  for (std::size_t j = 1; j < w.b.size(); ++j) assert(w.b[j] <= w.b[j - 1]);
#endif
  LambdaOptions opts;
  opts.d_max = std::uint32_t(w.dimensions());
  opts.cap = cap;
  return build_lambda([&w](const MultiIndex& nu) { return c_weight(w, nu); }, eps,
                      SurrogateMode::grows, opts, stats);
}

} // namespace hsg
