#include "hsg/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hsg {

double p_weight(const MultiIndex& nu, double tau, double lambda) {
  double v = 1.0;
  for (const auto& [d, e] : nu.entries()) v *= std::pow(1.0 + lambda * double(e), tau);
  return v;
}

double beta_weight(const MultiIndex& nu, unsigned r, std::span<const double> rho) {
  double v = 1.0;
  for (const auto& [d, e] : nu.entries()) {
    if (d >= rho.size()) throw std::out_of_range("beta_weight: dimension outside rho");
    const double rho2 = rho[d] * rho[d];
    double sum = 1.0;
    double binom = 1.0;
    double power = 1.0;
    for (unsigned l = 1; l <= std::min<unsigned>(r, e); ++l) {
      binom = binom * double(e - l + 1) / double(l);
      power *= rho2;
      sum += binom * power;
    }
    v *= sum;
  }
  return v;
}

WeightFamily WeightFamily::make(std::vector<double> b, double p, double xi, unsigned r, double tau,
                                unsigned k, double K) {
  if (b.empty()) throw std::invalid_argument("WeightFamily: empty b");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("WeightFamily: p must lie in (0,1)");
  if (!(xi > 0.0)) throw std::invalid_argument("WeightFamily: xi must be positive");
  if (k != 1 && k != 2) throw std::invalid_argument("WeightFamily: k must be 1 or 2");
  if (!(tau >= 0.0)) throw std::invalid_argument("WeightFamily: tau must be nonnegative");
  if (!(double(r) > std::max(tau, double(k))))
    throw std::invalid_argument("WeightFamily: r must exceed max(tau, k)");
  if (!(K > 0.0)) throw std::invalid_argument("WeightFamily: K must be positive");
  for (double v : b)
    if (!(v > 0.0)) throw std::invalid_argument("WeightFamily: b must be positive");

  WeightFamily w;
  w.p = p;
  w.xi = xi;
  w.r = r;
  w.tau = tau;
  w.k = k;
  w.K = K;
  double norm = 0.0;
  for (double v : b) norm += std::pow(v, p);
  norm = std::pow(norm, 1.0 / p);
  const double scale = xi / (4.0 * std::sqrt(std::tgamma(double(r) + 1.0)) * norm);
  w.rho.reserve(b.size());
  for (double v : b) w.rho.push_back(std::pow(v, p - 1.0) * scale);
  w.b = std::move(b);
  return w;
}

double c_weight(const WeightFamily& w, const MultiIndex& nu) {
  double v = 1.0;
  for (const auto& [d, e] : nu.entries()) {
    if (d >= w.rho.size()) throw std::out_of_range("c_weight: dimension outside weight family");
    const double hat = std::max(1.0, w.K * w.rho[d]);
    v *= std::pow(hat, 2.0 * double(w.k)) * std::pow(double(e), double(w.r) - w.tau);
  }
  return v;
}

} // namespace hsg
