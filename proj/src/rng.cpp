#include "hsg/rng.hpp"

#include <cmath>
#include <numbers>

namespace hsg {

std::uint64_t NormalStream::mix(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform on (0,1), never exactly 0.
double NormalStream::uniform(std::uint64_t counter) const noexcept {
  const std::uint64_t bits = mix(key_ ^ mix(counter));
  return (double(bits >> 11) + 0.5) * 0x1.0p-53;
}

double NormalStream::operator()(std::uint64_t k) const noexcept {
  const std::uint64_t pair = k >> 1;
  const double r = std::sqrt(-2.0 * std::log(uniform(2 * pair)));
  const double phi = 2.0 * std::numbers::pi * uniform(2 * pair + 1);
  return (k & 1) ? r * std::sin(phi) : r * std::cos(phi);
}

void NormalStream::fill(std::uint64_t first, std::span<double> out) const noexcept {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)(first + i);
}

} // namespace hsg
