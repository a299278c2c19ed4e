#pragma once

#include <cstdint>
#include <span>

namespace hsg {

// Counter-based standard normal stream: the k-th draw depends only on
// (seed, stream, k), so samples are reproducible regardless of how work is
// split across threads.
class NormalStream {
public:
  explicit NormalStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ULL))) {}

  double operator()(std::uint64_t k) const noexcept;
  void fill(std::uint64_t first, std::span<double> out) const noexcept;

  static std::uint64_t mix(std::uint64_t x) noexcept;

private:
  double uniform(std::uint64_t counter) const noexcept;
  std::uint64_t key_;
};

} // namespace hsg
