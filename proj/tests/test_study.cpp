#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hsg/errors.hpp"
#include "hsg/study.hpp"

using namespace hsg;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hsg_test_study_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

} // namespace

TEST_CASE("fit_rate") {
  const std::vector<double> x{1, 2, 4, 8, 16};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -1.5));
  REQUIRE(fit_rate(x, y).has_value());
  CHECK(*fit_rate(x, y) == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(*fit_rate(x, y, 2) == doctest::Approx(-1.5).epsilon(1e-12));

  // Only the tail enters the fit.
  y[0] = 100.0;
  CHECK(*fit_rate(x, y) == doctest::Approx(-1.5).epsilon(1e-12));

  // Non-positive entries are dropped, leaving too few pairs.
  y[3] = 0.0;
  y[2] = -1.0;
  CHECK_FALSE(fit_rate(x, y).has_value());
  CHECK_FALSE(fit_rate({1, 2, 3}, {1, 2, 3}).has_value());
  CHECK_FALSE(fit_rate({2, 2, 2, 2}, {1, 2, 3, 4}).has_value());
}

TEST_CASE("bisect_eps") {
  // measure(e) = floor(1/e) points.
  auto measure = [](double e) { return std::floor(1.0 / e); };
  for (double budget : {1.0, 7.0, 100.0, 12345.0}) {
    const double e = bisect_eps(measure, budget);
    CHECK(measure(e) <= budget);
    CHECK(e == doctest::Approx(1.0 / (budget + 1.0)).epsilon(1e-6));
  }
  // Thresholds above 1 are reached when the budget is tiny.
  auto shifted = [](double e) { return std::floor(10.0 / e); };
  CHECK(shifted(bisect_eps(shifted, 2.0)) <= 2.0);

  // Failures below a threshold count as exceeding the budget.
  auto capped = [](double e) -> double {
    if (e < 1e-3) throw ThresholdTooSmall("cap");
    return 1.0 / e;
  };
  CHECK(bisect_eps(capped, 1e9) >= 1e-3);
  CHECK_THROWS_AS(bisect_eps([](double) { return 5.0; }, 1.0), EmptyAllocation);
}

TEST_CASE("quadrature study in constant mode") {
  StudyConfig cfg;
  cfg.system = "constant";
  cfg.c = 0.5;
  cfg.budgets = {2, 4, 6, 8, 10};
  const auto st = run_quad_study(cfg);
  CHECK(st.reference == doctest::Approx(-std::exp(0.125) / 2.0).epsilon(1e-14));
  REQUIRE(st.rows.size() == 5);
  for (std::size_t i = 0; i < st.rows.size(); ++i) {
    CHECK(st.rows[i].n_points <= cfg.budgets[i]);
    CHECK(st.rows[i].work == st.rows[i].n_points);
    if (i > 0) CHECK(st.rows[i].abs_error <= st.rows[i - 1].abs_error);
  }
  CHECK(st.rows.back().abs_error <= 1e-8);
}

TEST_CASE("quadrature study with FEM fidelity uses an over-resolved reference") {
  StudyConfig cfg;
  cfg.system = "constant";
  cfg.fidelity = "fem";
  cfg.n_cells = 16;
  cfg.budgets = {2, 4, 8};
  const auto st = run_quad_study(cfg);
  CHECK(st.reference_kind.find("over-resolved") != std::string::npos);
  for (const auto& r : st.rows) CHECK(r.work == r.n_points * 16);
  CHECK(st.rows.back().abs_error < st.rows.front().abs_error);
}

TEST_CASE("interpolation study converges") {
  StudyConfig cfg;
  cfg.xi = 4.0;
  cfg.budgets = {100, 200, 400, 800, 1600};
  const auto st = run_interp_study(cfg);
  REQUIRE(st.rows.size() == 5);
  for (std::size_t i = 0; i < st.rows.size(); ++i) {
    CHECK(st.rows[i].n_points <= cfg.budgets[i]);
    if (i > 0) CHECK(st.rows[i].l2_error < st.rows[i - 1].l2_error);
  }
  CHECK(st.reference_points <= 2 * 1600);
  REQUIRE(st.rate.has_value());
  CHECK(*st.rate < -1.0);
}

TEST_CASE("multilevel studies in constant mode") {
  StudyConfig cfg;
  cfg.system = "constant";
  cfg.budgets = {256, 2048, 4096, 8192};
  const auto quad = run_ml_study(cfg, true);
  REQUIRE(quad.rows.size() == 4);
  for (std::size_t i = 0; i < quad.rows.size(); ++i) {
    CHECK(double(quad.rows[i].work) <= quad.rows[i].budget);
    CHECK(double(quad.rows[i].sl_work) <= quad.rows[i].budget);
    if (i > 0) CHECK(quad.rows[i].error < quad.rows[i - 1].error);
  }

  cfg.budgets = {256, 512, 1024, 2048, 4096};
  const auto interp = run_ml_study(cfg, false);
  for (std::size_t i = 1; i < interp.rows.size(); ++i) CHECK(interp.rows[i].error < interp.rows[i - 1].error);

  const auto alloc = ml_allocation(cfg, quad.rows[1].eps, true);
  CHECK(work(alloc) == quad.rows[1].work);
}

TEST_CASE("random field report") {
  StudyConfig cfg;
  cfg.samples = 2000;
  const auto rep = run_grf(cfg);
  CHECK(rep.samples == 2000);
  CHECK(rep.min_eigenvalue >= 0.0);
  CHECK(rep.max_mean <= rep.mean_bound);
  CHECK(rep.max_cov_deviation <= rep.cov_bound);
  CHECK(std::abs(rep.kl_variance - 0.25) <= 4.0 * rep.variance_se);
  CHECK(std::abs(rep.lc_variance - 0.25) <= 4.0 * rep.variance_se);
}

TEST_CASE("posterior study against the conjugate mean") {
  StudyConfig cfg;
  const auto st = run_bayes(cfg);
  CHECK(st.reference == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE_FALSE(st.rows.empty());
  CHECK(st.rows.back().abs_error <= 1e-10);
  CHECK(st.rows.back().Z == doctest::Approx(std::exp(-0.25) / std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("run_study writes CSV and metadata deterministically") {
  StudyConfig cfg;
  cfg.system = "constant";
  cfg.budgets = {2, 4, 8};
  const auto a = scratch("a"), b = scratch("b");
  run_study("quad", cfg, a);
  run_study("quad", cfg, b);
  const std::string csv = slurp(a / "quad.csv");
  CHECK(csv.rfind("budget,eps,n_points,work,value,abs_error,fitted_rate\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv == slurp(b / "quad.csv"));
  const std::string meta = slurp(a / "meta.txt");
  CHECK(meta.rfind("study = quad\n", 0) == 0);
  CHECK(meta.find("reference = ") != std::string::npos);
  CHECK(meta == slurp(b / "meta.txt"));

  cfg.samples = 50;
  cfg.dump = 2;
  run_study("grf", cfg, a);
  CHECK(std::filesystem::exists(a / "sample_0.csv"));
  CHECK(std::filesystem::exists(a / "sample_1.csv"));
  CHECK_FALSE(std::filesystem::exists(a / "sample_2.csv"));

  CHECK_THROWS_AS(run_study("cubature", cfg, a), ConfigError);
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}
