#include "hsg/smolyak.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "hsg/errors.hpp"
#include "hsg/hermite.hpp"

namespace hsg {

namespace {

struct SparsePointHash {
  std::size_t operator()(const SparsePoint& p) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& [d, v] : p) {
      h ^= d;
      h *= 0x100000001b3ULL;
      h ^= std::bit_cast<std::uint64_t>(v);
      h *= 0x100000001b3ULL;
    }
    return std::size_t(h);
  }
};

// Iterates the tensor grid of nu: calls f(mu, point) for every mu <= nu,
// first active dimension varying fastest.
template <class F>
void for_each_tensor_point(const MultiIndex& nu, F&& f) {
  const auto& entries = nu.entries();
  const std::size_t s = entries.size();
  std::vector<const HermiteRule*> rules(s);
  for (std::size_t i = 0; i < s; ++i) rules[i] = &cached_rule(entries[i].second);
  std::vector<std::uint32_t> mu(s, 0);
  SparsePoint point;
  point.reserve(s);
  while (true) {
    point.clear();
    for (std::size_t i = 0; i < s; ++i) {
      const double x = rules[i]->nodes[mu[i]];
      if (x != 0.0) point.emplace_back(entries[i].first, x);
    }
    f(mu, point);
    std::size_t i = 0;
    while (i < s && mu[i] == entries[i].second) mu[i++] = 0;
    if (i == s) break;
    ++mu[i];
  }
}

std::size_t tensor_size(const MultiIndex& nu) {
  std::size_t n = 1;
  for (const auto& e : nu.entries()) n *= std::size_t(e.second) + 1;
  return n;
}

// Unique evaluation points of an expansion, in order of first appearance
// while walking terms in canonical order.
struct PointTable {
  std::vector<SparsePoint> points;
  std::unordered_map<SparsePoint, std::size_t, SparsePointHash> index;
  // For each term (canonical order), the point index of every tensor node.
  std::vector<std::vector<std::size_t>> term_points;
};

PointTable collect_points(const CombinationExpansion& expansion) {
  PointTable table;
  table.term_points.reserve(expansion.terms.size());
  for (const auto& [nu, sigma] : expansion.terms) {
    std::vector<std::size_t> ids;
    ids.reserve(tensor_size(nu));
    for_each_tensor_point(nu, [&](const std::vector<std::uint32_t>&, const SparsePoint& p) {
      auto [it, inserted] = table.index.try_emplace(p, table.points.size());
      if (inserted) table.points.push_back(p);
      ids.push_back(it->second);
    });
    table.term_points.push_back(std::move(ids));
  }
  return table;
}

std::vector<std::vector<double>> evaluate_points(const std::vector<SparsePoint>& points,
                                                 std::uint32_t dims, const ParametricMap& u) {
  std::vector<std::vector<double>> dense;
  dense.reserve(points.size());
  for (const auto& p : points) dense.push_back(to_dense(p, std::max<std::uint32_t>(dims, 1)));
  return evaluate_batch(u, dense);
}

// Applies a square matrix (row-major, n x n) along `axis` of a tensor with
// the given extents (first fastest) and `m` trailing values per entry.
void apply_along_axis(std::vector<double>& data, const std::vector<std::size_t>& extents,
                      std::size_t axis, const std::vector<double>& matrix, std::size_t m) {
  const std::size_t n = extents[axis];
  std::size_t inner = m;
  for (std::size_t i = 0; i < axis; ++i) inner *= extents[i];
  std::size_t outer = 1;
  for (std::size_t i = axis + 1; i < extents.size(); ++i) outer *= extents[i];
  std::vector<double> out(data.size(), 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t base = o * n * inner;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) {
        const double a = matrix[k * n + i];
        const double* src = &data[base + i * inner];
        double* dst = &out[base + k * inner];
        for (std::size_t t = 0; t < inner; ++t) dst[t] += a * src[t];
      }
  }
  data.swap(out);
}

// Contracts `axis` against a weight vector, summing nodes in ascending order.
void contract_axis(std::vector<double>& data, std::vector<std::size_t>& extents, std::size_t axis,
                   const std::vector<double>& weights, std::size_t m) {
  const std::size_t n = extents[axis];
  std::size_t inner = m;
  for (std::size_t i = 0; i < axis; ++i) inner *= extents[i];
  std::size_t outer = 1;
  for (std::size_t i = axis + 1; i < extents.size(); ++i) outer *= extents[i];
  std::vector<double> out(outer * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t t = 0; t < inner; ++t) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += weights[i] * data[(o * n + i) * inner + t];
      out[o * inner + t] = s;
    }
  data.swap(out);
  extents[axis] = 1;
}

// Row-major (n+1)x(n+1) matrix T[k][i] = w_i H_k(x_i): discrete projection
// of the level-n interpolant onto H_0..H_n (exact, the rule has degree 2n+1).
const std::vector<double>& projection_matrix(unsigned level) {
  static std::vector<std::vector<double>> mats(kMaxHermiteLevel + 1);
  static std::array<std::once_flag, kMaxHermiteLevel + 1> flags;
  std::call_once(flags.at(level), [level] {
    const HermiteRule& rule = cached_rule(level);
    const std::size_t n = rule.size();
    std::vector<double> t(n * n);
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) {
      hermite_eval_all(rule.nodes[i], h);
      for (std::size_t k = 0; k < n; ++k) t[k * n + i] = rule.weights[i] * h[k];
    }
    mats[level] = std::move(t);
  });
  return mats[level];
}

std::vector<double> gather_values(const std::vector<std::size_t>& ids,
                                  const std::vector<std::vector<double>>& values, std::size_t m) {
  std::vector<double> data(ids.size() * m);
  for (std::size_t i = 0; i < ids.size(); ++i)
    std::copy(values[ids[i]].begin(), values[ids[i]].end(), data.begin() + i * m);
  return data;
}

void sigma_dfs(const IndexSet& set, const MultiIndex& nu, const std::vector<std::uint32_t>& forward,
               std::size_t start, const MultiIndex& shifted, int sign, std::int64_t& acc) {
  acc += sign;
  for (std::size_t i = start; i < forward.size(); ++i) {
    MultiIndex next = shifted.incremented(forward[i]);
    if (set.contains(next)) sigma_dfs(set, nu, forward, i + 1, next, -sign, acc);
  }
}

} // namespace

std::uint32_t CombinationExpansion::span() const {
  std::uint32_t s = 0;
  for (const auto& [nu, sigma] : terms) s = std::max(s, nu.span());
  return s;
}

CombinationExpansion combination_coeffs(const IndexSet& set) {
  if (!set.is_downward_closed())
    throw NotDownwardClosed("combination coefficients require a downward closed index set");
  CombinationExpansion out;
  const std::uint32_t span = set.span();
  for (const auto& nu : set) {
    std::vector<std::uint32_t> forward;
    for (std::uint32_t j = 0; j < span; ++j)
      if (set.contains(nu.incremented(j))) forward.push_back(j);
    std::int64_t sigma = 0;
    // Downward closedness lets the subset walk stop at the first missing index.
    sigma_dfs(set, nu, forward, 0, nu, 1, sigma);
    if (sigma != 0) out.terms.emplace(nu, sigma);
  }
  return out;
}

CombinationExpansion difference(const CombinationExpansion& a, const CombinationExpansion& b) {
  CombinationExpansion out = a;
  for (const auto& [nu, sigma] : b.terms) {
    auto& v = out.terms[nu];
    v -= sigma;
    if (v == 0) out.terms.erase(nu);
  }
  return out;
}

std::vector<double> to_dense(const SparsePoint& p, std::size_t dims) {
  std::vector<double> y(dims, 0.0);
  for (const auto& [d, v] : p) {
    if (d >= dims) throw std::out_of_range("to_dense: point dimension exceeds target size");
    y[d] = v;
  }
  return y;
}

SparseGrid sparse_grid_points(const IndexSet& set) {
  SparseGrid grid;
  grid.provenance = set;
  std::unordered_map<SparsePoint, std::size_t, SparsePointHash> seen;
  for (const auto& nu : set)
    for_each_tensor_point(nu, [&](const std::vector<std::uint32_t>&, const SparsePoint& p) {
      if (seen.try_emplace(p, 0).second) grid.points.push_back(p);
    });
  std::sort(grid.points.begin(), grid.points.end());
  return grid;
}

std::vector<SparsePoint> evaluation_points(const CombinationExpansion& expansion) {
  return collect_points(expansion).points;
}

std::size_t count_evaluation_points(const IndexSet& set) {
  const auto expansion = combination_coeffs(set);
  std::unordered_map<SparsePoint, std::size_t, SparsePointHash> seen;
  for (const auto& [nu, sigma] : expansion.terms)
    for_each_tensor_point(nu, [&](const std::vector<std::uint32_t>&, const SparsePoint& p) {
      seen.try_emplace(p, 0);
    });
  return seen.size();
}

std::vector<double> HermitePolynomial::coefficient(const MultiIndex& nu) const {
  auto it = coeffs.find(nu);
  return it == coeffs.end() ? std::vector<double>(output_dim, 0.0) : it->second;
}

IndexSet HermitePolynomial::support() const {
  IndexSet s;
  for (const auto& [nu, c] : coeffs) s.insert(nu);
  return s;
}

HermitePolynomial interpolate(const IndexSet& set, const ParametricMap& u) {
  return interpolate(combination_coeffs(set), u);
}

HermitePolynomial interpolate(const CombinationExpansion& expansion, const ParametricMap& u) {
  HermitePolynomial poly;
  poly.output_dim = u.output_dim;
  if (expansion.empty()) return poly;
  const std::size_t m = u.output_dim;
  const PointTable table = collect_points(expansion);
  const auto values = evaluate_points(table.points, expansion.span(), u);

  std::size_t term = 0;
  for (const auto& [nu, sigma] : expansion.terms) {
    const auto& entries = nu.entries();
    std::vector<std::size_t> extents;
    for (const auto& e : entries) extents.push_back(std::size_t(e.second) + 1);
    std::vector<double> data = gather_values(table.term_points[term++], values, m);
    for (std::size_t a = 0; a < entries.size(); ++a)
      apply_along_axis(data, extents, a, projection_matrix(entries[a].second), m);

    // data[kappa] is the coefficient of H_kappa for kappa <= nu.
    std::vector<std::uint32_t> kappa(entries.size(), 0);
    for (std::size_t lin = 0;; ++lin) {
      std::vector<MultiIndex::Entry> ke;
      for (std::size_t i = 0; i < entries.size(); ++i)
        if (kappa[i]) ke.emplace_back(entries[i].first, kappa[i]);
      auto& c = poly.coeffs[MultiIndex(std::move(ke))];
      if (c.empty()) c.assign(m, 0.0);
      for (std::size_t o = 0; o < m; ++o) c[o] += double(sigma) * data[lin * m + o];
      std::size_t i = 0;
      while (i < entries.size() && kappa[i] == entries[i].second) kappa[i++] = 0;
      if (i == entries.size()) break;
      ++kappa[i];
    }
  }
  return poly;
}

std::vector<double> interpolant_eval(const HermitePolynomial& p, std::span<const double> y) {
  std::vector<double> out(p.output_dim, 0.0);
  // Per-dimension tables H_0..H_kmax(y_j).
  std::map<std::uint32_t, std::uint32_t> kmax;
  for (const auto& [nu, c] : p.coeffs)
    for (const auto& [d, e] : nu.entries()) kmax[d] = std::max(kmax[d], e);
  std::map<std::uint32_t, std::vector<double>> tables;
  for (const auto& [d, k] : kmax) tables[d] = hermite_eval_all(k, d < y.size() ? y[d] : 0.0);
  for (const auto& [nu, c] : p.coeffs) {
    double basis = 1.0;
    for (const auto& [d, e] : nu.entries()) basis *= tables[d][e];
    for (std::size_t o = 0; o < out.size(); ++o) out[o] += c[o] * basis;
  }
  return out;
}

std::vector<double> quadrature(const IndexSet& set, const ParametricMap& u, std::size_t* n_points) {
  return quadrature(combination_coeffs(set), u, n_points);
}

std::vector<double> quadrature(const CombinationExpansion& expansion, const ParametricMap& u,
                               std::size_t* n_points) {
  const std::size_t m = u.output_dim;
  std::vector<double> result(m, 0.0);
  if (expansion.empty()) {
    if (n_points) *n_points = 0;
    return result;
  }
  const PointTable table = collect_points(expansion);
  if (n_points) *n_points = table.points.size();
  const auto values = evaluate_points(table.points, expansion.span(), u);

  std::size_t term = 0;
  for (const auto& [nu, sigma] : expansion.terms) {
    const auto& entries = nu.entries();
    std::vector<std::size_t> extents;
    for (const auto& e : entries) extents.push_back(std::size_t(e.second) + 1);
    std::vector<double> data = gather_values(table.term_points[term++], values, m);
    for (std::size_t a = 0; a < entries.size(); ++a)
      contract_axis(data, extents, a, cached_rule(entries[a].second).weights, m);
    for (std::size_t o = 0; o < m; ++o) result[o] += double(sigma) * data[o];
  }
  return result;
}

double l2_norm(const HermitePolynomial& p) {
  double s = 0.0;
  for (const auto& [nu, c] : p.coeffs)
    for (double v : c) s += v * v;
  return std::sqrt(s);
}

HermitePolynomial subtract(const HermitePolynomial& a, const HermitePolynomial& b) {
  if (a.output_dim != b.output_dim) throw std::invalid_argument("subtract: output dimensions differ");
  HermitePolynomial out = a;
  for (const auto& [nu, c] : b.coeffs) {
    auto& dst = out.coeffs[nu];
    if (dst.empty()) dst.assign(a.output_dim, 0.0);
    for (std::size_t o = 0; o < c.size(); ++o) dst[o] -= c[o];
  }
  return out;
}

void write_polynomial_csv(std::ostream& os, const HermitePolynomial& p) {
  os << "nu";
  for (std::size_t o = 0; o < p.output_dim; ++o) os << ",coeff_" << o;
  os << '\n';
  const auto old = os.precision(17);
  for (const auto& [nu, c] : p.coeffs) {
    os << nu.to_string();
    for (double v : c) os << ',' << v;
    os << '\n';
  }
  os.precision(old);
}

HermitePolynomial read_polynomial_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("nu", 0) != 0)
    throw std::invalid_argument("polynomial CSV: missing 'nu,...' header");
  HermitePolynomial p;
  p.output_dim = std::size_t(std::count(line.begin(), line.end(), ','));
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');
    MultiIndex nu = MultiIndex::parse(field);
    std::vector<double> c;
    while (std::getline(ss, field, ',')) c.push_back(std::stod(field));
    if (c.size() != p.output_dim)
      throw std::invalid_argument("polynomial CSV line " + std::to_string(lineno) +
                                  ": wrong number of coefficients");
    p.coeffs[nu] = std::move(c);
  }
  return p;
}

} // namespace hsg
