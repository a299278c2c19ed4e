#include "hsg/hermite.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <string>

#include <Eigen/Eigenvalues>

#include "hsg/errors.hpp"

namespace hsg {

double hermite_eval(unsigned k, double x) {
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (unsigned j = 1; j < k; ++j) {
    const double next = (x * cur - std::sqrt(double(j)) * prev) / std::sqrt(double(j + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

void hermite_eval_all(double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = x;
  for (std::size_t j = 1; j + 1 < out.size(); ++j)
    out[j + 1] = (x * out[j] - std::sqrt(double(j)) * out[j - 1]) / std::sqrt(double(j + 1));
}

std::vector<double> hermite_eval_all(unsigned k_max, double x) {
  std::vector<double> out(std::size_t(k_max) + 1);
  hermite_eval_all(x, out);
  return out;
}

namespace {

// Adjust a mirrored pair of weights, starting at the centre, until the
// ascending left-to-right sum is 1.0 exactly; sum-factorized quadrature of
// constants then returns exactly 1.
void normalize_weight_sum(std::vector<double>& w) {
  const std::size_t n = w.size();
  auto ordered_sum = [&] {
    double s = 0.0;
    for (double v : w) s += v;
    return s;
  };
  if (ordered_sum() == 1.0) return;
  const std::size_t lo = (n - 1) / 2;
  const std::size_t hi = n / 2;
  for (std::size_t p = 0; p <= lo; ++p) {
    const std::size_t i = lo - p, j = hi + p;
    const double orig = w[i];
    for (int k = 1; k <= 64; ++k)
      for (double dir : {2.0, 0.0}) {
        double v = orig;
        for (int step = 0; step < k; ++step) v = std::nextafter(v, dir);
        w[i] = w[j] = v;
        if (ordered_sum() == 1.0) return;
      }
    w[i] = w[j] = orig;
  }
}

} // namespace

HermiteRule gauss_hermite_rule(unsigned n, unsigned max_level) {
  if (n > max_level)
    throw LevelTooLarge("Gauss-Hermite level " + std::to_string(n) + " exceeds maximum " +
                        std::to_string(max_level));
  HermiteRule rule;
  rule.level = n;
  const std::size_t npts = std::size_t(n) + 1;
  if (npts == 1) {
    rule.nodes = {0.0};
    rule.weights = {1.0};
    return rule;
  }

  // Jacobi matrix of the normalized recurrence: zero diagonal, sqrt(k) off it.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(Eigen::Index(npts));
  Eigen::VectorXd sub(Eigen::Index(npts - 1));
  for (std::size_t k = 1; k < npts; ++k) sub(Eigen::Index(k - 1)) = std::sqrt(double(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("tridiagonal eigensolver failed for level " + std::to_string(n));

  std::vector<double> x(solver.eigenvalues().data(), solver.eigenvalues().data() + npts);
  std::sort(x.begin(), x.end());
  for (std::size_t i = 0; i < npts / 2; ++i) {
    const double a = 0.5 * (x[npts - 1 - i] - x[i]);
    x[i] = -a;
    x[npts - 1 - i] = a;
  }
  if (npts % 2 == 1) x[npts / 2] = 0.0;

  // The normalized eigenvector of node x is (H_0(x), ..., H_n(x)) / norm, so
  // its squared first component is 1 / sum_k H_k(x)^2.
  std::vector<double> w(npts);
  std::vector<double> h(npts);
  for (std::size_t i = 0; i < npts; ++i) {
    hermite_eval_all(x[i], h);
    long double s = 0.0L;
    for (double v : h) s += (long double)v * v;
    w[i] = double(1.0L / s);
  }
  for (std::size_t i = 0; i < npts / 2; ++i) {
    const double a = 0.5 * (w[i] + w[npts - 1 - i]);
    w[i] = a;
    w[npts - 1 - i] = a;
  }
  long double total = 0.0L;
  for (double v : w) total += v;
  for (double& v : w) v = double(v / total);
  normalize_weight_sum(w);

  rule.nodes = std::move(x);
  rule.weights = std::move(w);
  return rule;
}

const HermiteRule& cached_rule(unsigned n) {
  static std::array<HermiteRule, kMaxHermiteLevel + 1> rules;
  static std::array<std::once_flag, kMaxHermiteLevel + 1> flags;
  if (n > kMaxHermiteLevel)
    throw LevelTooLarge("Gauss-Hermite level " + std::to_string(n) + " exceeds maximum " +
                        std::to_string(kMaxHermiteLevel));
  std::call_once(flags[n], [n] { rules[n] = gauss_hermite_rule(n); });
  return rules[n];
}

double tensor_hermite_eval(const MultiIndex& nu, std::span<const double> y) {
  double v = 1.0;
  for (const auto& [dim, exp] : nu.entries()) {
    const double yj = dim < y.size() ? y[dim] : 0.0;
    v *= hermite_eval(exp, yj);
  }
  return v;
}

} // namespace hsg
