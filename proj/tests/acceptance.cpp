// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hsg/config.hpp"
#include "hsg/grf.hpp"
#include "hsg/hermite.hpp"
#include "hsg/lambda.hpp"
#include "hsg/model.hpp"
#include "hsg/multilevel.hpp"
#include "hsg/rng.hpp"
#include "hsg/smolyak.hpp"
#include "hsg/study.hpp"
#include "support.hpp"

using namespace hsg;
using hsg::testing::Rng;

namespace {

// Pinned tolerances and limits.
constexpr double kOrthoTol = 1e-10;
constexpr double kOrthoSeconds = 1.0;
constexpr double kMomentTol = 1e-9;
constexpr double kSmolyakTol = 1e-9;
constexpr double kSmolyakSeconds = 30.0;
constexpr double kTelescopeTol = 1e-14;
constexpr double kConstantModeTol = 1e-8;
constexpr std::size_t kConstantModeMaxPoints = 15;
constexpr double kConstantModeSeconds = 1.0;
constexpr double kRateBound = -1.0;
constexpr double kStudySeconds = 300.0;
constexpr int kMlMinWins = 3;
constexpr std::size_t kGrfSamples = 100000;
constexpr double kSeFactor = 3.0;
constexpr double kConjugateTol = 1e-8;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

IndexSet line(unsigned n) {
  IndexSet s;
  for (unsigned k = 0; k <= n; ++k) s.insert(MultiIndex::unit(0, k));
  return s;
}

ParametricMap monomial_map(const MultiIndex& nu) {
  return ParametricMap::scalar([nu](std::span<const double> y) { return testing::monomial_eval(nu, y); });
}

Outcome orthonormality() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (unsigned m = 0; m <= 16; ++m)
    for (unsigned k = 0; k <= 16; ++k) {
      const auto r = gauss_hermite_rule((m + k) / 2 + 1);
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * hermite_eval(m, r.nodes[i]) * hermite_eval(k, r.nodes[i]);
      worst = std::max(worst, std::abs(s - (m == k ? 1.0 : 0.0)));
    }
  const double t = seconds_since(t0);
  return {worst <= kOrthoTol && t < kOrthoSeconds, fmt("max deviation %.2e, %.3f s", worst, t)};
}

Outcome moment_exactness() {
  double worst = 0.0;
  for (unsigned n = 0; n <= 12; ++n) {
    const auto r = gauss_hermite_rule(n);
    for (unsigned d = 0; d <= 2 * n + 1; ++d) {
      // Relative to sum |w x^d|, which is the moment itself for even d.
      double s = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) {
        const double t = r.weights[i] * std::pow(r.nodes[i], double(d));
        s += t;
        scale += std::abs(t);
      }
      worst = std::max(worst, std::abs(s - testing::gaussian_moment(d)) / scale);
    }
  }
  return {worst <= kMomentTol, fmt("max relative deviation %.2e", worst)};
}

Outcome stability() {
  int violations = 0;
  double ratio = 0.0;
  for (unsigned m = 1; m <= 16; ++m) {
    const auto hm = ParametricMap::scalar([m](std::span<const double> y) { return hermite_eval(m, y[0]); });
    const double bound = 4.0 * std::sqrt(2.0 * m - 1.0);
    for (unsigned n = 0; n <= 16; ++n) {
      const double norm = l2_norm(interpolate(line(n), hm));
      ratio = std::max(ratio, norm / bound);
      if (norm > bound) ++violations;
    }
  }
  return {violations == 0, fmt("%.0f violations, largest norm/bound %.3f", violations, ratio)};
}

Outcome smolyak_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(4);
  double interp_err = 0.0, quad_err = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::uint32_t dims = testing::uniform_int(rng, 1, 3);
    const IndexSet set = testing::random_downward_closed(rng, dims, 25);
    std::vector<std::pair<MultiIndex, double>> terms;
    for (const auto& nu : set) terms.emplace_back(nu, testing::uniform(rng, -1.0, 1.0));
    auto poly = [terms](std::span<const double> y) {
      double s = 0.0;
      for (const auto& [nu, a] : terms) s += a * testing::monomial_eval(nu, y);
      return s;
    };
    const auto p = interpolate(set, ParametricMap::scalar(poly));
    for (int i = 0; i < 100; ++i) {
      std::vector<double> y(dims);
      for (auto& v : y) v = testing::uniform(rng, -3.0, 3.0);
      interp_err = std::max(interp_err, std::abs(interpolant_eval(p, y)[0] - poly(y)) / (1.0 + std::abs(poly(y))));
    }
    for (const auto& nu : set)
      quad_err = std::max(quad_err, std::abs(quadrature(set, monomial_map(nu))[0] - testing::monomial_moment(nu)));
    // Monomials with an odd exponent have zero mean.
    for (int i = 0; i < 10; ++i) {
      std::vector<std::uint32_t> dense(dims);
      for (auto& v : dense) v = testing::uniform_int(rng, 0, 8);
      auto& odd = dense[testing::uniform_int(rng, 0, dims - 1)];
      odd = 2 * testing::uniform_int(rng, 0, 4) + 1;
      quad_err = std::max(quad_err, std::abs(quadrature(set, monomial_map(MultiIndex::from_dense(dense)))[0]));
    }
  }
  const double t = seconds_since(t0);
  return {interp_err <= kSmolyakTol && quad_err <= kSmolyakTol && t < kSmolyakSeconds,
          fmt("interpolation %.2e, quadrature %.2e, %.2f s", interp_err, quad_err, t)};
}

Outcome algorithm_oracle() {
  Rng rng(5);
  int mismatches = 0, over = 0;
  std::size_t largest = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint32_t dims = testing::uniform_int(rng, 1, 4);
    const auto s = testing::random_surrogate(rng, dims);
    const double eps = std::pow(10.0, testing::uniform(rng, -2.5, 0.0));
    LambdaOptions opt;
    opt.d_max = dims;
    LambdaStats stats;
    const IndexSet got = build_lambda(s, eps, SurrogateMode::grows, opt, &stats);
    std::uint32_t box = 0;
    for (const auto& nu : got)
      for (const auto& [d, e] : nu.entries()) box = std::max(box, e);
    if (got != testing::brute_threshold(s, eps, dims, box + 1)) ++mismatches;
    if (stats.inner_iterations > 4 * got.size() + 1) ++over;
    largest = std::max(largest, got.size());
  }
  return {mismatches == 0 && over == 0,
          fmt("%.0f mismatches, %.0f bound violations, largest set %.0f", mismatches, over, double(largest))};
}

LevelAllocation random_allocation(Rng& rng, unsigned L) {
  LevelAllocation l;
  l.sw = default_work_sequence(L);
  const IndexSet set = testing::random_downward_closed(rng, 3, 25);
  std::vector<double> a(3);
  for (auto& v : a) v = testing::uniform(rng, 0.3, 2.0);
  for (const auto& nu : set) {
    double s = 0.0;
    for (const auto& [d, e] : nu.entries()) s += a[d] * e;
    const int lev = int(L) - int(std::floor(s));
    if (lev > 0) l.levels[nu] = unsigned(lev);
  }
  return l;
}

Outcome telescoping() {
  Rng rng(6);
  const auto v = ParametricMap::scalar([](std::span<const double> y) {
    auto at = [&](std::size_t i) { return i < y.size() ? y[i] : 0.0; };
    return std::exp(0.3 * at(0) - 0.2 * at(1)) + at(2);
  });
  double worst = 0.0;
  int work_mismatch = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto l = random_allocation(rng, 6);
    if (work(l) != work_by_level(l)) ++work_mismatch;
    if (trial >= 20) continue;
    const auto g = gamma_sets(l);
    if (g.empty()) continue;
    const std::vector<ParametricMap> same(g.size(), v);
    for (const auto& [nu, c] : subtract(ml_interpolate(l, same), interpolate(g[0], v)).coeffs)
      worst = std::max(worst, std::abs(c[0]));
    worst = std::max(worst, std::abs(ml_quadrature(l, same)[0] - quadrature(g[0], v)[0]));
  }
  return {worst <= kTelescopeTol && work_mismatch == 0,
          fmt("max coefficient deviation %.2e, %.0f work mismatches", worst, work_mismatch)};
}

Outcome constant_mode() {
  const auto t0 = std::chrono::steady_clock::now();
  StudyConfig cfg;
  cfg.system = "constant";
  cfg.c = 0.5;
  const auto mp = make_problem(cfg);
  const auto u = as_parametric_map(mp, Exact{});
  const double want = -std::exp(0.125) / 2.0;
  std::size_t points = 0;
  double err = 0.0;
  for (unsigned n = 0; n < kConstantModeMaxPoints; ++n) {
    err = std::abs(quadrature(line(n), u, &points)[0] - want);
    if (err <= kConstantModeTol) break;
  }
  const double t = seconds_since(t0);
  return {err <= kConstantModeTol && points <= kConstantModeMaxPoints && t < kConstantModeSeconds,
          fmt("error %.2e with %.0f points, %.3f s", err, double(points), t)};
}

Outcome quad_rate() {
  const auto t0 = std::chrono::steady_clock::now();
  StudyConfig cfg;
  cfg.budgets = {100, 400, 1600, 6400, 20000};
  const auto st = run_quad_study(cfg);
  bool decreasing = st.rows.size() >= 5;
  for (std::size_t i = 1; i < st.rows.size(); ++i) decreasing = decreasing && st.rows[i].abs_error < st.rows[i - 1].abs_error;
  const double rate = st.rate.value_or(0.0);
  const double t = seconds_since(t0);
  return {decreasing && st.rate && rate <= kRateBound && t < kStudySeconds,
          fmt("slope %.3f, final error %.2e, %.1f s", rate, st.rows.empty() ? 0.0 : st.rows.back().abs_error, t) +
              (decreasing ? "" : ", errors not strictly decreasing")};
}

Outcome ml_efficiency() {
  const auto t0 = std::chrono::steady_clock::now();
  StudyConfig cfg;
  cfg.budgets = {2048, 4096, 8192, 16384};
  const auto st = run_ml_study(cfg, true);
  int wins = 0;
  for (const auto& r : st.rows)
    if (r.error <= r.sl_error) ++wins;
  const double t = seconds_since(t0);
  return {wins >= kMlMinWins && t < kStudySeconds,
          fmt("%.0f of %.0f budgets, %.2f s", wins, double(st.rows.size()), t)};
}

Outcome grf() {
  const auto plan = circulant_embed_1d(CovarianceSpec{Exponential{1.0}}, 64, 2.0);
  const auto st = grf_statistics(plan, kGrfSamples, 0);
  const double cov_bound = 4.0 * std::sqrt(2.0 / double(kGrfSamples));

  StudyConfig cfg;
  cfg.samples = kGrfSamples;
  const auto rep = run_grf(cfg);
  const double se = rep.variance_se;
  const bool kl = std::abs(rep.kl_variance - 0.25) <= kSeFactor * se;
  const bool lc = std::abs(rep.lc_variance - 0.25) <= kSeFactor * se;
  return {st.max_cov_deviation <= cov_bound && kl && lc,
          fmt("covariance deviation %.4f (bound %.4f)", st.max_cov_deviation, cov_bound) +
              fmt(", KL variance %.4f, LC variance %.4f", rep.kl_variance, rep.lc_variance) +
              fmt(" (SE %.4f)", se)};
}

Outcome conjugate() {
  const auto forward = ParametricMap::scalar([](std::span<const double> y) { return y.empty() ? 0.0 : y[0]; });
  const auto phi = forward;
  const auto bs = BayesSetup::make(forward, {1.0}, {1.0});
  const auto res = posterior_expectation(bs, phi, line(8));
  const double err = std::abs(res.expectation[0] - 0.5);

  // Theta == 1 when the forward map always reproduces the data.
  const auto trivial = BayesSetup::make(ParametricMap::constant({1.0}), {1.0}, {1.0});
  const auto tres = posterior_expectation(trivial, phi, line(8));
  return {err <= kConjugateTol && tres.Z == 1.0, fmt("posterior mean error %.2e, trivial Z - 1 = %.1e", err, tres.Z - 1.0)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "hsg_acceptance_determinism";
  fs::remove_all(root);
  StudyConfig cfg;
  cfg.seed = 17;
  std::vector<std::string> differing;
  std::size_t files = 0;
  for (const std::string kind : {"interp", "quad", "ml-interp", "ml-quad", "grf", "bayes"}) {
    const fs::path a = root / (kind + "_a"), b = root / (kind + "_b");
    run_study(kind, cfg, a);
    run_study(kind, cfg, b);
    for (const auto& entry : fs::directory_iterator(a)) {
      ++files;
      const fs::path other = b / entry.path().filename();
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) differing.push_back(kind + "/" + entry.path().filename().string());
    }
  }
  fs::remove_all(root);
  std::string detail = fmt("%.0f files compared", double(files));
  for (const auto& d : differing) detail += ", differs: " + d;
  return {differing.empty() && files > 0, detail};
}

} // namespace

// Usage: hsg_acceptance [--known-failure N]...
// Exits 0 exactly when the failing criteria are the declared known failures.
int main(int argc, char** argv) {
  std::set<std::size_t> known;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--known-failure" && i + 1 < argc) {
      known.insert(std::stoul(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--known-failure N]...\n", argv[0]);
      return 2;
    }
  }

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Hermite orthonormality", orthonormality},
      {"Gauss-Hermite moment exactness", moment_exactness},
      {"univariate interpolation stability bound", stability},
      {"Smolyak interpolation and quadrature exactness", smolyak_exactness},
      {"threshold construction matches brute force within the iteration bound", algorithm_oracle},
      {"multilevel telescoping and work model", telescoping},
      {"constant-mode quadrature", constant_mode},
      {"quadrature study convergence rate", quad_rate},
      {"multilevel beats single level", ml_efficiency},
      {"random field statistics", grf},
      {"conjugate Bayesian posterior", conjugate},
      {"study output determinism", determinism},
  };
  std::set<std::size_t> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) failed.insert(i + 1);
    const char* note = known.count(i + 1) ? (o.pass ? " [declared known failure, but passed]" : " [known failure]") : "";
    std::printf("%s %2zu %s: %s%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(), note);
    std::fflush(stdout);
  }
  std::printf("%zu of %zu criteria passed\n", criteria.size() - failed.size(), criteria.size());
  return failed == known ? 0 : 1;
}
