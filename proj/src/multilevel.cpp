#include "hsg/multilevel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "hsg/errors.hpp"
#include "hsg/weights.hpp"

namespace hsg {

bool WorkSequence::satisfies_assumptions() const {
  if (values.empty() || values[0] != 0) return false;
  std::uint64_t partial = 0;
  for (std::size_t l = 1; l < values.size(); ++l) {
    if (values[l] <= values[l - 1]) return false;
    partial += values[l];
    const double swl = double(values[l]);
    if (double(partial) > K_W * swl) return false;
    if (double(l) > K_W * (1.0 + std::log(swl))) return false;
    if (swl > K_W * (1.0 + double(values[l - 1]))) return false;
  }
  return true;
}

WorkSequence default_work_sequence(unsigned L) {
  WorkSequence sw;
  sw.values.push_back(0);
  for (unsigned l = 1; l <= L; ++l) sw.values.push_back(std::uint64_t(1) << l);
  sw.K_W = 2.0;
  return sw;
}

unsigned LevelAllocation::level(const MultiIndex& nu) const {
  auto it = levels.find(nu);
  return it == levels.end() ? 0u : it->second;
}

unsigned LevelAllocation::max_level() const {
  unsigned L = 0;
  for (const auto& [nu, l] : levels) L = std::max(L, l);
  return L;
}

bool LevelAllocation::is_monotone() const {
  for (const auto& [nu, l] : levels)
    for (const auto& [d, e] : nu.entries())
      if (level(nu.decremented(d)) < l) return false;
  return true;
}

std::vector<IndexSet> gamma_sets(const LevelAllocation& l) {
  const unsigned L = l.max_level();
  std::vector<IndexSet> gammas(L);
  for (const auto& [nu, lev] : l.levels)
    for (unsigned j = 1; j <= lev; ++j) gammas[j - 1].insert(nu);
  return gammas;
}

LevelAllocation construct_levels(const Surrogate& c, const Surrogate& d,
                                 const ConstructLevelsParams& params, const WorkSequence& sw) {
  if (!(params.alpha > 0.0)) throw std::invalid_argument("construct_levels: alpha must be positive");
  if (!(params.q1 > 0.0 && params.q1 < 2.0))
    throw std::invalid_argument("construct_levels: q1 must lie in (0,2)");
  const IndexSet lambda = build_lambda(c, params.eps, SurrogateMode::grows, params.lambda);
  if (lambda.empty())
    throw EmptyAllocation("threshold set is empty for eps = " + std::to_string(params.eps));

  const double expo = -1.0 / (1.0 + 2.0 * params.alpha);
  std::vector<double> dpow;
  dpow.reserve(lambda.size());
  double sum = 0.0;
  for (const auto& nu : lambda) {
    const double dv = d(nu);
    if (!(dv > 0.0)) throw std::domain_error("construct_levels: d surrogate must be positive");
    dpow.push_back(std::pow(dv, expo));
    sum += dpow.back();
  }
  const double scale = std::pow(params.eps, -(0.5 - params.q1 / 4.0) / params.alpha) *
                       std::pow(sum, 1.0 / (2.0 * params.alpha));

  LevelAllocation alloc;
  alloc.sw = sw;
  std::size_t i = 0;
  for (const auto& nu : lambda) {
    const double delta = scale * dpow[i++];
    unsigned lev = 0;
    for (std::size_t j = 1; j < sw.values.size(); ++j)
      if (double(sw.values[j]) <= delta) lev = unsigned(j);
    if (lev > 0) alloc.levels.emplace(nu, lev);
  }
  return alloc;
}

HermitePolynomial ml_interpolate(const LevelAllocation& l, std::span<const ParametricMap> u_levels) {
  const auto gammas = gamma_sets(l);
  const std::size_t L = gammas.size();
  if (u_levels.size() < L)
    throw std::invalid_argument("ml_interpolate: need one parametric map per level");
  HermitePolynomial total;
  total.output_dim = u_levels.empty() ? 1 : u_levels[0].output_dim;
  std::vector<CombinationExpansion> expansions(L + 1);
  for (std::size_t j = 0; j < L; ++j) expansions[j] = combination_coeffs(gammas[j]);
  for (std::size_t j = 1; j <= L; ++j) {
    const auto term = difference(expansions[j - 1], expansions[j]);
    if (term.empty()) continue;
    const auto part = interpolate(term, u_levels[j - 1]);
    for (const auto& [nu, c] : part.coeffs) {
      auto& dst = total.coeffs[nu];
      if (dst.empty()) dst.assign(c.size(), 0.0);
      for (std::size_t o = 0; o < c.size(); ++o) dst[o] += c[o];
    }
  }
  return total;
}

std::vector<double> ml_quadrature(const LevelAllocation& l, std::span<const ParametricMap> u_levels,
                                  std::vector<std::size_t>* evaluations) {
  const auto gammas = gamma_sets(l);
  const std::size_t L = gammas.size();
  if (u_levels.size() < L)
    throw std::invalid_argument("ml_quadrature: need one parametric map per level");
  const std::size_t m = u_levels.empty() ? 1 : u_levels[0].output_dim;
  std::vector<double> total(m, 0.0);
  if (evaluations) evaluations->assign(L, 0);
  std::vector<CombinationExpansion> expansions(L + 1);
  for (std::size_t j = 0; j < L; ++j) expansions[j] = combination_coeffs(gammas[j]);
  for (std::size_t j = 1; j <= L; ++j) {
    const auto term = difference(expansions[j - 1], expansions[j]);
    if (term.empty()) continue;
    std::size_t n = 0;
    const auto part = quadrature(term, u_levels[j - 1], &n);
    if (evaluations) (*evaluations)[j - 1] = n;
    for (std::size_t o = 0; o < m; ++o) total[o] += part[o];
  }
  return total;
}

std::uint64_t work(const LevelAllocation& l) {
  std::uint64_t total = 0;
  for (const auto& [nu, lev] : l.levels) {
    if (lev == 0) continue;
    std::uint64_t cost = 0;
    for (unsigned j = 1; j <= lev; ++j) cost += l.sw[j];
    total += std::uint64_t(std::llround(p_weight(nu, 1.0))) * cost;
  }
  return total;
}

std::uint64_t work_by_level(const LevelAllocation& l) {
  const auto gammas = gamma_sets(l);
  std::uint64_t total = 0;
  for (std::size_t j = 1; j <= gammas.size(); ++j) {
    std::uint64_t points = 0;
    for (const auto& nu : gammas[j - 1]) points += std::uint64_t(std::llround(p_weight(nu, 1.0)));
    total += l.sw[j] * points;
  }
  return total;
}

double g_xi_exponent(double q1, double q2, double alpha) {
  return 1.0 / q1 + (1.0 / q1 - 1.0 / q2) / (2.0 * alpha);
}

LevelIndexSet build_G_xi(double xi, const Surrogate& sigma1, const Surrogate& sigma2,
                         const GxiParams& params) {
  if (!(xi > 0.0)) throw std::invalid_argument("build_G_xi: xi must be positive");
  if (!(params.q1 > 0.0 && params.q1 <= params.q2 && params.q1 < 2.0))
    throw std::invalid_argument("build_G_xi: need 0 < q1 <= q2 and q1 < 2");
  if (!(params.alpha > 0.0)) throw std::invalid_argument("build_G_xi: alpha must be positive");
  const bool first_branch = params.alpha <= 1.0 / params.q2 - 0.5;
  const double theta = g_xi_exponent(params.q1, params.q2, params.alpha);

  LevelIndexSet out;
  for (unsigned k = 0; k <= params.max_k; ++k) {
    const double two_k = std::ldexp(1.0, int(k));
    Surrogate inside;
    if (first_branch) {
      inside = [&, two_k](const MultiIndex& nu) {
        return two_k * std::pow(sigma2(nu), params.q2) <= xi ? 1.0 : 0.0;
      };
    } else {
      const double level_factor = std::pow(2.0, (params.alpha + 0.5) * double(k));
      const double bound = std::pow(xi, theta);
      inside = [&, level_factor, bound](const MultiIndex& nu) {
        return (std::pow(sigma1(nu), params.q1) <= xi && level_factor * sigma2(nu) <= bound) ? 1.0
                                                                                           : 0.0;
      };
    }
    const IndexSet slice = build_lambda(inside, 1.0, SurrogateMode::decays, params.lambda);
    if (slice.empty()) break;
    for (const auto& nu : slice) out.emplace_back(k, nu);
  }
  return out;
}

LevelIndexSet build_G_rev_xi(double xi, const Surrogate& sigma1, const Surrogate& sigma2,
                             const GxiParams& params) {
  LevelIndexSet all = build_G_xi(xi, sigma1, sigma2, params);
  LevelIndexSet out;
  for (auto& [k, nu] : all) {
    bool even = true;
    for (const auto& e : nu.entries())
      if (e.second % 2 != 0) even = false;
    if (even) out.emplace_back(k, std::move(nu));
  }
  return out;
}

void write_allocation(std::ostream& os, const LevelAllocation& l) {
  for (const auto& [nu, lev] : l.levels) os << nu.to_string() << '\t' << lev << '\n';
}

LevelAllocation read_allocation(std::istream& is, WorkSequence sw) {
  LevelAllocation l;
  l.sw = std::move(sw);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::invalid_argument("allocation line " + std::to_string(lineno) + ": missing tab");
    const MultiIndex nu = MultiIndex::parse(std::string_view(line).substr(0, tab));
    const unsigned lev = unsigned(std::stoul(line.substr(tab + 1)));
    if (lev > 0) l.levels[nu] = lev;
  }
  return l;
}

} // namespace hsg
