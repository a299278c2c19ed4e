#include "hsg/grf.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hsg/errors.hpp"
#include "hsg/rng.hpp"

namespace hsg {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <class T>
struct FftwFree {
  void operator()(T* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree<double>>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree<fftw_complex>>;

RealBuffer real_buffer(std::size_t n) { return RealBuffer(fftw_alloc_real(n)); }
ComplexBuffer complex_buffer(std::size_t n) { return ComplexBuffer(fftw_alloc_complex(n)); }

} // namespace

struct EmbeddingPlan::Fft {
  std::size_t s = 0;
  fftw_plan c2r = nullptr;

  explicit Fft(std::size_t n) : s(n) {
    auto in = complex_buffer(n / 2 + 1);
    auto out = real_buffer(n);
    std::lock_guard lock(planner_mutex());
    c2r = fftw_plan_dft_c2r_1d(int(n), in.get(), out.get(), FFTW_ESTIMATE);
  }
  ~Fft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(c2r);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
};

double matern_cov(double x, double lambda, double nu) {
  if (!(lambda > 0.0)) throw std::invalid_argument("matern_cov: lambda must be positive");
  const double s = std::sqrt(2.0 * nu) * std::abs(x) / lambda;
  if (nu == 0.5) return std::exp(-s);
  if (nu == 1.5) return (1.0 + s) * std::exp(-s);
  if (nu == 2.5) return (1.0 + s + s * s / 3.0) * std::exp(-s);
  std::ostringstream msg;
  msg << "Matern smoothness " << nu << " not supported (use 0.5, 1.5 or 2.5)";
  throw UnsupportedSmoothness(msg.str());
}

double CovarianceSpec::operator()(double x) const {
  return std::visit(
      [x](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Matern>) {
          return matern_cov(x, k.lambda, k.nu);
        } else if constexpr (std::is_same_v<K, Exponential>) {
          if (!(k.lambda > 0.0)) throw std::invalid_argument("exponential kernel: lambda must be positive");
          return std::exp(-std::abs(x) / k.lambda);
        } else {
          if (!k.rho) throw std::invalid_argument("custom kernel: empty callable");
          return k.rho(x);
        }
      },
      kind);
}

double bspline_cutoff(double t, double kappa, unsigned P) {
  if (!(kappa > 0.0) || P == 0) throw std::invalid_argument("bspline_cutoff: need kappa > 0 and P >= 1");
  const double a = std::abs(t);
  if (a <= kappa / 2.0) return 1.0;
  if (a >= kappa) return 0.0;
  // Integral of the cardinal B-spline of order P at s in (0, P).
  const double s = 2.0 * double(P) * (kappa - a) / kappa;
  double sum = 0.0;
  double binom = 1.0;
  double fact = 1.0;
  for (unsigned k = 0; k <= P; ++k) {
    if (k > 0) binom = binom * double(P - k + 1) / double(k);
    const double base = s - double(k);
    if (base > 0.0) sum += ((k % 2) ? -binom : binom) * std::pow(base, double(P));
  }
  for (unsigned k = 2; k <= P; ++k) fact *= double(k);
  return std::clamp(sum / fact, 0.0, 1.0);
}

double EmbeddingPlan::covariance(std::size_t i, std::size_t j) const {
  const std::size_t d = i > j ? i - j : j - i;
  return row.at(d);
}

EmbeddingPlan circulant_embed_1d(const CovarianceSpec& spec, std::size_t m, double ell,
                                 std::optional<Cutoff> cutoff, bool strict) {
  if (m == 0) throw std::invalid_argument("circulant_embed_1d: m must be positive");
  if (!(ell > 0.0)) throw std::invalid_argument("circulant_embed_1d: ell must be positive");
  EmbeddingPlan plan;
  plan.m = m;
  plan.ell = ell;
  plan.h = 1.0 / double(m);
  plan.cutoff = cutoff;
  std::size_t s = std::size_t(std::llround(2.0 * ell * double(m)));
  if (s % 2) ++s;
  if (s < 2 * m)
    throw std::invalid_argument("circulant_embed_1d: period 2*ell must cover the grid twice (ell >= 1)");
  if (cutoff && !(2.0 * ell >= cutoff->kappa + 1.0))
    throw std::invalid_argument("circulant_embed_1d: need ell >= (kappa + 1) / 2 with a cutoff");
  plan.s = s;

  const double period = double(s) * plan.h;
  plan.row.assign(s, 0.0);
  for (std::size_t k = 0; k <= s / 2; ++k) {
    const double t = double(k) * plan.h;
    double v;
    if (!cutoff) {
      v = spec(t);
    } else {
      v = 0.0;
      const long reach = long(std::ceil(cutoff->kappa / period)) + 1;
      for (long n = -reach; n <= reach; ++n) {
        const double tn = t + double(n) * period;
        if (std::abs(tn) >= cutoff->kappa) continue;
        v += spec(tn) * bspline_cutoff(tn, cutoff->kappa, cutoff->P);
      }
    }
    plan.row[k] = v;
    if (k > 0 && k < s - k) plan.row[s - k] = v;
  }

  {
    auto in = real_buffer(s);
    auto out = complex_buffer(s / 2 + 1);
    std::copy(plan.row.begin(), plan.row.end(), in.get());
    fftw_plan p;
    {
      std::lock_guard lock(planner_mutex());
      p = fftw_plan_dft_r2c_1d(int(s), in.get(), out.get(), FFTW_ESTIMATE);
    }
    fftw_execute(p);
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(p);
    }
    plan.eigenvalues.assign(s, 0.0);
    for (std::size_t k = 0; k <= s / 2; ++k) {
      plan.eigenvalues[k] = out[k][0];
      if (k > 0) plan.eigenvalues[s - k] = out[k][0];
      plan.max_imag = std::max(plan.max_imag, std::abs(out[k][1]));
    }
  }
  const auto [lo, hi] = std::minmax_element(plan.eigenvalues.begin(), plan.eigenvalues.end());
  plan.positive = *lo >= -1e-10 * std::max(*hi, 0.0) && *hi > 0.0;
  if (strict && !plan.positive) {
    std::ostringstream msg;
    msg << "circulant embedding not positive definite (min eigenvalue " << *lo
        << "); increase ell, e.g. ell >= " << 2.0 * ell;
    throw NotPositiveDefinite(msg.str());
  }
  plan.fft = std::make_shared<const EmbeddingPlan::Fft>(s);
  return plan;
}

std::vector<double> sample_grf(const EmbeddingPlan& plan, std::uint64_t seed) {
  if (!plan.positive) throw NotPositiveDefinite("sample_grf: embedding plan is not positive definite");
  if (!plan.fft) throw std::invalid_argument("sample_grf: plan has no FFT");
  const std::size_t s = plan.s;
  const NormalStream normal(seed);
  std::vector<double> y(s);
  normal.fill(0, y);

  auto coeff = complex_buffer(s / 2 + 1);
  auto out = real_buffer(s);
  auto root = [&](std::size_t k) { return std::sqrt(std::max(plan.eigenvalues[k], 0.0)); };
  coeff[0][0] = root(0) * y[0];
  coeff[0][1] = 0.0;
  coeff[s / 2][0] = root(s / 2) * y[s / 2];
  coeff[s / 2][1] = 0.0;
  for (std::size_t k = 1; k < s / 2; ++k) {
    const double a = root(k) * std::numbers::sqrt2 / 2.0;
    coeff[k][0] = a * y[k];
    coeff[k][1] = -a * y[s - k];
  }
  fftw_execute_dft_c2r(plan.fft->c2r, coeff.get(), out.get());

  const double scale = 1.0 / std::sqrt(double(s));
  std::vector<double> z(plan.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = out[i] * scale;
  return z;
}

GrfStatistics grf_statistics(const EmbeddingPlan& plan, std::size_t n, std::uint64_t seed) {
  const std::size_t M = plan.size();
  std::vector<double> mean(M, 0.0), second(M * M, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto z = sample_grf(plan, seed + r);
    for (std::size_t i = 0; i < M; ++i) {
      mean[i] += z[i];
      for (std::size_t j = i; j < M; ++j) second[i * M + j] += z[i] * z[j];
    }
  }
  GrfStatistics st;
  st.samples = n;
  if (n == 0) return st;
  const double inv = 1.0 / double(n);
  for (std::size_t i = 0; i < M; ++i) st.max_mean = std::max(st.max_mean, std::abs(mean[i] * inv));
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = i; j < M; ++j) {
      const double c = second[i * M + j] * inv;
      st.max_cov_deviation = std::max(st.max_cov_deviation, std::abs(c - plan.covariance(i, j)));
    }
  return st;
}

void write_sample_csv(std::ostream& os, const EmbeddingPlan& plan, std::span<const double> values) {
  os << "x,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < values.size(); ++i) os << plan.x(i) << ',' << values[i] << '\n';
}

double brownian_bridge_kl(double T, double t, std::span<const double> z) {
  if (!(T > 0.0)) throw std::invalid_argument("brownian_bridge_kl: T must be positive");
  const double c = std::sqrt(2.0 * T) / std::numbers::pi;
  double sum = 0.0;
  for (std::size_t k = 1; k <= z.size(); ++k)
    sum += z[k - 1] * c / double(k) * std::sin(double(k) * std::numbers::pi * t / T);
  return sum;
}

double levy_ciesielski(unsigned J, double t, std::span<const double> z) {
  if (z.size() != levy_index(J + 1, 0))
    throw std::invalid_argument("levy_ciesielski: expected 2^(J+1) - 1 coefficients");
  double sum = 0.0;
  for (unsigned j = 0; j <= J; ++j) {
    const std::size_t n = std::size_t(1) << j;
    const double s = std::ldexp(t, int(j));
    if (s <= 0.0 || s >= double(n)) continue;
    const std::size_t k = std::min(std::size_t(std::floor(s)), n - 1);
    const double hat = std::max(1.0 - 2.0 * std::abs(s - double(k) - 0.5), 0.0);
    sum += z[levy_index(j, k)] * std::pow(2.0, -0.5 * double(j)) * 0.5 * hat;
  }
  return sum;
}

double levy_ciesielski(unsigned J, double t, const NormalStream& normal, std::uint64_t offset) {
  double sum = 0.0;
  for (unsigned j = 0; j <= J; ++j) {
    const std::size_t n = std::size_t(1) << j;
    const double s = std::ldexp(t, int(j));
    if (s <= 0.0 || s >= double(n)) continue;
    const std::size_t k = std::min(std::size_t(std::floor(s)), n - 1);
    const double hat = std::max(1.0 - 2.0 * std::abs(s - double(k) - 0.5), 0.0);
    if (hat == 0.0) continue;
    sum += normal(offset + levy_index(j, k)) * std::pow(2.0, -0.5 * double(j)) * 0.5 * hat;
  }
  return sum;
}

} // namespace hsg
