#include "doctest.h"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "hsg/errors.hpp"
#include "hsg/lambda.hpp"
#include "hsg/multi_index.hpp"
#include "hsg/weights.hpp"
#include "support.hpp"

using namespace hsg;
using hsg::testing::Rng;

namespace {
const MultiIndex e0 = MultiIndex::unit(0);
const MultiIndex e1 = MultiIndex::unit(1);
const MultiIndex e2 = MultiIndex::unit(2);
} // namespace

TEST_CASE("multi-index canonical form") {
  const MultiIndex a{{3, 1}, {0, 2}, {1, 0}};
  REQUIRE(a.entries().size() == 2);
  CHECK(a.entries()[0] == MultiIndex::Entry{0, 2});
  CHECK(a.entries()[1] == MultiIndex::Entry{3, 1});
  CHECK(a == MultiIndex::from_dense({2, 0, 0, 1}));
  CHECK(a.order() == 3);
  CHECK(a.span() == 4);
  CHECK(a[1] == 0);
  CHECK(a[3] == 1);
  CHECK(MultiIndex().span() == 0);
  CHECK_THROWS_AS((MultiIndex{{1, 1}, {1, 2}}), std::invalid_argument);
}

TEST_CASE("multi-index arithmetic and order") {
  const MultiIndex a{{0, 2}, {2, 1}};
  CHECK(a.incremented(1) == MultiIndex{{0, 2}, {1, 1}, {2, 1}});
  CHECK(a.decremented(2) == MultiIndex{{0, 2}});
  CHECK(a.with(0, 0) == MultiIndex{{2, 1}});
  CHECK(MultiIndex{{0, 1}}.le(a));
  CHECK_FALSE(a.le(MultiIndex{{0, 1}}));
  CHECK_FALSE(MultiIndex{{1, 1}}.le(a));
}

TEST_CASE("multi-index text round trip") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    std::vector<std::uint32_t> dense(6);
    for (auto& v : dense) v = testing::uniform_int(rng, 0, 2) ? 0 : testing::uniform_int(rng, 1, 9);
    const auto nu = MultiIndex::from_dense(dense);
    CHECK(MultiIndex::parse(nu.to_string()) == nu);
  }
  CHECK(MultiIndex().to_string() == "-");
  CHECK(MultiIndex::parse("-").empty());
}

TEST_CASE("downward closedness") {
  CHECK(is_downward_closed(IndexSet{MultiIndex()}));
  CHECK(is_downward_closed(IndexSet{MultiIndex(), e0, MultiIndex::unit(0, 2)}));
  CHECK_FALSE(is_downward_closed(IndexSet{e0}));
  CHECK_FALSE(is_downward_closed(IndexSet{MultiIndex(), e0, e1, MultiIndex{{0, 1}, {1, 2}}}));
}

TEST_CASE("downward closedness matches brute force on random sets") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    IndexSet set = testing::random_downward_closed(rng, 3, 20, 4);
    CHECK(set.is_downward_closed());
    CHECK(testing::brute_downward_closed(set));
    // Dropping a random nonzero member keeps closedness only if it was maximal.
    if (set.size() > 1) {
      std::vector<MultiIndex> members(set.begin(), set.end());
      const MultiIndex drop = members[testing::uniform_int(rng, 1, std::uint32_t(members.size() - 1))];
      IndexSet smaller;
      for (const auto& nu : members)
        if (!(nu == drop)) smaller.insert(nu);
      CHECK(is_downward_closed(smaller) == testing::brute_downward_closed(smaller));
    }
  }
}

TEST_CASE("restriction to F2") {
  const MultiIndex two_e0 = MultiIndex::unit(0, 2);
  CHECK(restrict_F2(IndexSet{MultiIndex(), e0, two_e0}) == IndexSet{MultiIndex(), two_e0});
  CHECK(restrict_F2(IndexSet{MultiIndex()}) == IndexSet{MultiIndex()});
  CHECK(restrict_F2(IndexSet{MultiIndex{{0, 1}, {1, 2}}}).empty());
}

TEST_CASE("index set file round trip") {
  Rng rng(9);
  const IndexSet set = testing::random_downward_closed(rng, 4, 30);
  std::stringstream ss;
  write_index_set(ss, set);
  CHECK(read_index_set(ss) == set);
}

TEST_CASE("p_weight") {
  CHECK(p_weight(MultiIndex(), 3.0, 1.0) == 1.0);
  CHECK(p_weight(MultiIndex{{0, 2}, {1, 1}}, 1.0, 1.0) == 6.0);
  CHECK(p_weight(e0, 2.0, 1.0) == 4.0);
}

TEST_CASE("beta_weight") {
  const std::vector<double> ones{1.0, 1.0};
  CHECK(beta_weight(MultiIndex(), 3, ones) == 1.0);
  CHECK(beta_weight(MultiIndex{{0, 2}, {1, 1}}, 1, ones) == 6.0);
  CHECK(beta_weight(e0, 2, std::vector<double>{2.0}) == 5.0);
  CHECK_THROWS_AS(beta_weight(e2, 2, ones), std::out_of_range);
}

TEST_CASE("weight family validation and rho") {
  const std::vector<double> b{1.0, 0.25, 1.0 / 9.0};
  const auto w = WeightFamily::make(b, 0.5, 2.0, 4, 1.0, 2, 10.0);
  double norm = 0.0;
  for (double v : b) norm += std::sqrt(v);
  norm *= norm;
  for (std::size_t j = 0; j < b.size(); ++j)
    CHECK(w.rho[j] == doctest::Approx(std::pow(b[j], -0.5) * 2.0 / (4.0 * std::sqrt(24.0) * norm)));

  CHECK_THROWS_AS(WeightFamily::make(b, 1.0, 1.0, 4, 1.0, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightFamily::make(b, 0.5, 1.0, 3, 3.0, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightFamily::make(b, 0.5, 1.0, 2, 1.0, 2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightFamily::make(b, 0.5, 1.0, 4, 1.0, 3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightFamily::make({1.0, 0.0}, 0.5, 1.0, 4, 1.0, 1, 1.0), std::invalid_argument);
}

TEST_CASE("c_weight reference values") {
  WeightFamily w;
  w.k = 1;
  w.r = 5;
  w.tau = 3.0;
  w.K = 1.0;
  w.rho = {0.5, 0.5};
  w.b = {1.0, 1.0};
  CHECK(c_weight(w, MultiIndex()) == 1.0);
  CHECK(c_weight(w, MultiIndex{{0, 2}, {1, 3}}) == doctest::Approx(36.0));

  w.k = 2;
  w.rho = {2.0};
  w.b = {1.0};
  CHECK(c_weight(w, MultiIndex::unit(0, 2)) == doctest::Approx(64.0));
}

TEST_CASE("weights are at least one and monotone") {
  const auto w = WeightFamily::make({1.0, 0.5, 0.2, 0.1}, 0.5, 1.0, 6, 1.0, 2, 50.0);
  for (const auto& nu : testing::box_indices(4, 4)) {
    CHECK(c_weight(w, nu) >= 1.0);
    CHECK(p_weight(nu, 2.0) >= 1.0);
    for (const auto& [d, e] : nu.entries()) CHECK(c_weight(w, nu.decremented(d)) <= c_weight(w, nu));
  }
}

TEST_CASE("beta dominates c times p up to a product constant") {
  // The ratio beta / (c p) factors over dimensions, so the minimum over a
  // long one-dimensional range bounds it on the product box.
  for (unsigned k : {1u, 2u}) {
    const auto w = WeightFamily::make({1.0, 0.3, 0.1}, 0.5, 1.0, 5, 2.0, k, 20.0);
    std::vector<double> c0(3, 1.0);
    for (std::uint32_t j = 0; j < 3; ++j)
      for (std::uint32_t n = 1; n <= 200; ++n) {
        const auto nu = MultiIndex::unit(j, n);
        c0[j] = std::min(c0[j], beta_weight(nu, w.r, w.rho) / (c_weight(w, nu) * p_weight(nu, w.tau)));
      }
    const double C0 = c0[0] * c0[1] * c0[2];
    CHECK(C0 > 0.0);
    for (const auto& nu : testing::box_indices(3, 6))
      CHECK(C0 * c_weight(w, nu) * p_weight(nu, w.tau) <= beta_weight(nu, w.r, w.rho) * (1.0 + 1e-12));
  }
}

TEST_CASE("build_lambda reference cases") {
  LambdaOptions opt;
  opt.d_max = 3;
  const Surrogate unit = [](const MultiIndex& nu) { return std::pow(2.0, double(nu.order())); };
  CHECK(build_lambda(unit, 1.5, SurrogateMode::grows, opt).empty());

  const Surrogate c = [](const MultiIndex& nu) {
    double v = 1.0;
    for (const auto& [d, e] : nu.entries()) v *= std::pow(2.0, double(e) * double(d + 1));
    return v;
  };
  const IndexSet got = build_lambda(c, 0.125, SurrogateMode::grows, opt);
  CHECK(got == testing::brute_threshold(c, 0.125, 3, 4));
  CHECK(got.contains(MultiIndex::unit(0, 3)));
  CHECK(got.contains(MultiIndex{{0, 1}, {1, 1}}));
  CHECK(got.contains(e2));
  CHECK_FALSE(got.contains(MultiIndex{{0, 1}, {2, 1}}));
  CHECK(got.is_downward_closed());
}

TEST_CASE("build_lambda decays mode and cap") {
  LambdaOptions opt;
  opt.d_max = 2;
  const Surrogate a = [](const MultiIndex& nu) { return std::pow(0.5, double(nu.order())); };
  CHECK(build_lambda(a, 0.25, SurrogateMode::decays, opt) ==
        IndexSet{MultiIndex(), e0, e1, MultiIndex::unit(0, 2), MultiIndex{{0, 1}, {1, 1}}, MultiIndex::unit(1, 2)});
  opt.cap = 3;
  CHECK_THROWS_AS(build_lambda(a, 0.25, SurrogateMode::decays, opt), ThresholdTooSmall);
  CHECK_THROWS_AS(build_lambda(a, 0.0, SurrogateMode::decays, opt), std::invalid_argument);
}

TEST_CASE("build_lambda equals brute force and respects the iteration bound") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint32_t dims = testing::uniform_int(rng, 1, 4);
    const auto s = testing::random_surrogate(rng, dims);
    const double eps = std::pow(10.0, testing::uniform(rng, -2.5, 0.0));
    LambdaOptions opt;
    opt.d_max = dims;
    LambdaStats stats;
    const IndexSet got = build_lambda(s, eps, SurrogateMode::grows, opt, &stats);
    // Monotonicity means one extra layer beyond the largest exponent suffices.
    std::uint32_t box = 0;
    for (const auto& nu : got)
      for (const auto& [d, e] : nu.entries()) box = std::max(box, e);
    CHECK(got == testing::brute_threshold(s, eps, dims, box + 1));
    CHECK(stats.inner_iterations <= 4 * got.size() + 1);
    CHECK(got.is_downward_closed());
  }
}

TEST_CASE("build_lambda for a weight family") {
  const auto w = WeightFamily::make({1.0, 0.5, 0.25}, 0.5, 1.0, 6, 1.0, 2, 100.0);
  const IndexSet got = build_lambda(w, 1e-4);
  const IndexSet want =
      testing::brute_threshold([&](const MultiIndex& nu) { return c_weight(w, nu); }, 1e-4, 3, 8);
  CHECK(got == want);
  for (const auto& nu : got)
    for (const auto& [d, e] : nu.entries()) CHECK(e < 8);
}

TEST_CASE("threshold_box agrees with the test oracle") {
  const testing::ProductSurrogate s{{1.5, 2.0, 3.0}, 1.0};
  CHECK(threshold_box(s, 0.01, SurrogateMode::grows, 3, 6) == testing::brute_threshold(s, 0.01, 3, 6));
}
