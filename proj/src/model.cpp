#include "hsg/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hsg/errors.hpp"
#include "hsg/smolyak.hpp"

namespace hsg {

namespace {

constexpr std::array<double, 5> kGl5Nodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                          0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGl5Weights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                            0.4786286704993665, 0.2369268850561891};

struct GaussLegendre {
  std::vector<double> x, w;
};

// n-point rule on [-1,1] by Newton iteration on P_n.
GaussLegendre gauss_legendre(std::size_t n) {
  GaussLegendre r{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (double(i) + 0.75) / (double(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * double(k) - 1.0) * z * p1 - (double(k) - 1.0) * p2) / double(k);
      }
      dp = double(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return r;
}

const GaussLegendre& gl10() {
  static const GaussLegendre rule = gauss_legendre(10);
  return rule;
}

double gl_panel(const std::function<double(double)>& g, double a, double b) {
  const auto& r = gl10();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * g(c + h * r.x[i]);
  return h * s;
}

double adapt(const std::function<double(double)>& g, double a, double b, double whole, double tol,
             int depth) {
  const double m = 0.5 * (a + b);
  const double left = gl_panel(g, a, m);
  const double right = gl_panel(g, m, b);
  const double refined = left + right;
  if (std::abs(refined - whole) <= std::max(tol, 1e-15 * std::abs(refined))) return refined;
  if (depth >= 48) {
    std::ostringstream msg;
    msg << "adaptive quadrature did not converge on [" << a << ", " << b << "]";
    throw QuadratureNonconvergence(msg.str());
  }
  return adapt(g, a, m, left, 0.5 * tol, depth + 1) + adapt(g, m, b, right, 0.5 * tol, depth + 1);
}

} // namespace

double RepresentationSystem::psi(std::size_t j, double x) const {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SinDecay>) {
          const double jj = double(j + 1);
          return std::sin(jj * std::numbers::pi * x) * std::pow(jj, -k.r);
        } else if constexpr (std::is_same_v<K, ConstantMode>) {
          return j == 0 ? k.c : 0.0;
        } else if constexpr (std::is_same_v<K, PiecewiseConstantBlocks>) {
          const double lo = double(j) / double(d_max), hi = double(j + 1) / double(d_max);
          const bool inside = x >= lo && (x < hi || (j + 1 == d_max && x <= hi));
          return inside ? std::pow(double(j + 1), -k.r) : 0.0;
        } else {
          return k.psi(j, x);
        }
      },
      kind);
}

std::vector<double> RepresentationSystem::breakpoints() const {
  if (std::holds_alternative<PiecewiseConstantBlocks>(kind)) {
    std::vector<double> b;
    for (std::size_t j = 1; j < d_max; ++j) b.push_back(double(j) / double(d_max));
    return b;
  }
  if (const auto* c = std::get_if<CustomSystem>(&kind)) return c->breakpoints;
  return {};
}

double RepresentationSystem::b(std::span<const double> y, double x) const {
  const std::size_t n = std::min(y.size(), d_max);
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    if (y[j] != 0.0) s += y[j] * psi(j, x);
  return s;
}

ModelProblem1D ModelProblem1D::constant_rhs(RepresentationSystem system, double value, Qoi qoi) {
  ModelProblem1D mp;
  mp.system = std::move(system);
  mp.f = [value](double) { return value; };
  mp.F = [value](double x) { return value * x; };
  mp.qoi = qoi;
  return mp;
}

ModelProblem1D ModelProblem1D::with_rhs(RepresentationSystem system, std::function<double(double)> f,
                                        Qoi qoi) {
  ModelProblem1D mp;
  mp.system = std::move(system);
  mp.F = [f](double x) { return x == 0.0 ? 0.0 : adaptive_integrate(f, 0.0, x, 1e-13); };
  mp.f = std::move(f);
  mp.qoi = qoi;
  return mp;
}

double coeff_eval(const ModelProblem1D& mp, std::span<const double> y, double x) {
  return std::exp(mp.system.b(y, x));
}

double adaptive_integrate(const std::function<double(double)>& g, double a, double b, double tol,
                          std::span<const double> breaks) {
  if (a == b) return 0.0;
  const double sign = a < b ? 1.0 : -1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  std::vector<double> cuts{lo};
  for (double t : breaks)
    if (t > lo && t < hi) cuts.push_back(t);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  const double piece_tol = tol / double(cuts.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += adapt(g, cuts[i], cuts[i + 1], gl_panel(g, cuts[i], cuts[i + 1]), piece_tol, 0);
  return sign * total;
}

double exact_solution_1d(const ModelProblem1D& mp, std::span<const double> y, double x) {
  if (x == 0.0) return 0.0;
  const auto breaks = mp.system.breakpoints();
  auto integrand = [&](double t) { return std::exp(-mp.system.b(y, t)) * mp.F(t); };
  return -adaptive_integrate(integrand, 0.0, x, 1e-12, breaks);
}

double exact_qoi(const ModelProblem1D& mp, std::span<const double> y) {
  if (mp.qoi.kind == QoiKind::point) return exact_solution_1d(mp, y, mp.qoi.x0);
  const auto breaks = mp.system.breakpoints();
  auto integrand = [&](double t) { return (1.0 - t) * std::exp(-mp.system.b(y, t)) * mp.F(t); };
  return -adaptive_integrate(integrand, 0.0, 1.0, 1e-12, breaks);
}

double expected_qoi(const ModelProblem1D& mp) {
  const auto breaks = mp.system.breakpoints();
  auto moment = [&](double t) {
    double s = 0.0;
    for (std::size_t j = 0; j < mp.system.d_max; ++j) {
      const double v = mp.system.psi(j, t);
      s += v * v;
    }
    return std::exp(0.5 * s) * mp.F(t);
  };
  if (mp.qoi.kind == QoiKind::point) return -adaptive_integrate(moment, 0.0, mp.qoi.x0, 1e-13, breaks);
  auto weighted = [&](double t) { return (1.0 - t) * moment(t); };
  return -adaptive_integrate(weighted, 0.0, 1.0, 1e-13, breaks);
}

double expected_qoi_oracle(double c, double x0) { return -0.5 * x0 * x0 * std::exp(0.5 * c * c); }

std::vector<double> fem_solve_1d(const ModelProblem1D& mp, std::span<const double> y, std::size_t n) {
  if (n == 0) throw std::invalid_argument("fem_solve_1d: need at least one cell");
  const double h = 1.0 / double(n);
  static constexpr std::array<double, 3> gx{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> gw{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

  // Unknowns u_1..u_n; row i-1 holds node i.
  std::vector<double> diag(n, 0.0), off(n, 0.0), rhs(n, 0.0);
  for (std::size_t e = 0; e < n; ++e) {
    const double x0 = double(e) * h;
    double a_int = 0.0, f_left = 0.0, f_right = 0.0;
    for (std::size_t q = 0; q < 3; ++q) {
      const double t = 0.5 * (gx[q] + 1.0);
      const double x = x0 + t * h;
      const double wq = 0.5 * h * gw[q];
      a_int += wq * coeff_eval(mp, y, x);
      const double fx = mp.f(x);
      f_left += wq * fx * (1.0 - t);
      f_right += wq * fx * t;
    }
    const double k = a_int / (h * h);
    // Element couples nodes e and e+1; node 0 is eliminated.
    if (e > 0) {
      diag[e - 1] += k;
      rhs[e - 1] += f_left;
      off[e - 1] = -k;  // coupling between node e and e+1
    }
    diag[e] += k;
    rhs[e] += f_right;
  }
  rhs[n - 1] -= mp.F(1.0);

  // Thomas algorithm; off[i] couples rows i and i+1.
  std::vector<double> c(n, 0.0), d(n, 0.0);
  double pivot = diag[0];
  if (!(pivot > 0.0)) throw SingularSystem("fem_solve_1d: nonpositive pivot");
  c[0] = n > 1 ? off[0] / pivot : 0.0;
  d[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = diag[i] - off[i - 1] * c[i - 1];
    if (!(pivot > 0.0) || !std::isfinite(pivot)) throw SingularSystem("fem_solve_1d: nonpositive pivot");
    c[i] = i + 1 < n ? off[i] / pivot : 0.0;
    d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / pivot;
  }
  std::vector<double> u(n + 1, 0.0);
  u[n] = d[n - 1];
  for (std::size_t i = n - 1; i >= 1; --i) u[i] = d[i - 1] - c[i - 1] * u[i + 1];
  return u;
}

double fem_qoi(const ModelProblem1D& mp, std::span<const double> nodal) {
  const std::size_t n = nodal.size() - 1;
  const double h = 1.0 / double(n);
  if (mp.qoi.kind == QoiKind::mean) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += 0.5 * h * (nodal[i] + nodal[i + 1]);
    return s;
  }
  const double pos = std::clamp(mp.qoi.x0, 0.0, 1.0) * double(n);
  const std::size_t e = std::min(std::size_t(pos), n - 1);
  const double t = pos - double(e);
  return (1.0 - t) * nodal[e] + t * nodal[e + 1];
}

double h1_seminorm(std::span<const double> nodal) {
  const std::size_t n = nodal.size() - 1;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = nodal[i + 1] - nodal[i];
    s += d * d;
  }
  return std::sqrt(s * double(n));
}

double fem_h1_error(const ModelProblem1D& mp, std::span<const double> y, std::span<const double> nodal) {
  const std::size_t n = nodal.size() - 1;
  const double h = 1.0 / double(n);
  double s = 0.0;
  for (std::size_t e = 0; e < n; ++e) {
    const double slope = (nodal[e + 1] - nodal[e]) / h;
    for (std::size_t q = 0; q < kGl5Nodes.size(); ++q) {
      const double x = (double(e) + 0.5 * (kGl5Nodes[q] + 1.0)) * h;
      const double du = -std::exp(-mp.system.b(y, x)) * mp.F(x);
      s += 0.5 * h * kGl5Weights[q] * (slope - du) * (slope - du);
    }
  }
  return std::sqrt(s);
}

double load_dual_norm(const ModelProblem1D& mp) {
  auto g = [&](double x) {
    const double v = mp.F(x);
    return v * v;
  };
  return std::sqrt(adaptive_integrate(g, 0.0, 1.0, 1e-13));
}

double b_sup(const ModelProblem1D& mp, std::span<const double> y, std::size_t samples) {
  double m = 0.0;
  for (std::size_t i = 0; i <= samples; ++i)
    m = std::max(m, std::abs(mp.system.b(y, double(i) / double(samples))));
  for (double t : mp.system.breakpoints()) {
    m = std::max(m, std::abs(mp.system.b(y, std::nextafter(t, 0.0))));
    m = std::max(m, std::abs(mp.system.b(y, t)));
  }
  return m;
}

ParametricMap as_parametric_map(const ModelProblem1D& mp, Fidelity fidelity) {
  ParametricMap u;
  u.output_dim = 1;
  u.thread_safe = true;
  if (std::holds_alternative<Exact>(fidelity)) {
    u.fn = [mp](std::span<const double> y) { return std::vector<double>{exact_qoi(mp, y)}; };
  } else {
    const std::size_t n = std::get<Fem>(fidelity).n_cells;
    u.fn = [mp, n](std::span<const double> y) {
      return std::vector<double>{fem_qoi(mp, fem_solve_1d(mp, y, n))};
    };
  }
  return u;
}

std::vector<ParametricMap> fem_levels(const ModelProblem1D& mp, const WorkSequence& sw) {
  std::vector<ParametricMap> out;
  for (std::size_t j = 1; j <= sw.max_level(); ++j)
    out.push_back(as_parametric_map(mp, Fem{std::size_t(sw[j])}));
  return out;
}

BayesSetup BayesSetup::make(ParametricMap forward, std::vector<double> data, std::vector<double> gamma) {
  const std::size_t m = data.size();
  if (m == 0) throw std::invalid_argument("BayesSetup: empty data");
  if (forward.output_dim != m) throw std::invalid_argument("BayesSetup: forward map dimension differs from data");
  if (gamma.size() != m * m) throw std::invalid_argument("BayesSetup: Gamma must be m x m");
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> G(gamma.data(),
                                                                                           m, m);
  if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-12 * G.cwiseAbs().maxCoeff())
    throw std::invalid_argument("BayesSetup: Gamma is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw NotPositiveDefinite("BayesSetup: Gamma is not positive definite");
  const Eigen::MatrixXd inv_sqrt =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  BayesSetup bs;
  bs.forward = std::move(forward);
  bs.data = std::move(data);
  bs.gamma = std::move(gamma);
  bs.gamma_inv_sqrt.resize(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) bs.gamma_inv_sqrt[i * m + j] = inv_sqrt(Eigen::Index(i), Eigen::Index(j));
  return bs;
}

double posterior_density(const BayesSetup& bs, std::span<const double> y) {
  const std::size_t m = bs.m();
  const auto o = bs.forward(y);
  std::vector<double> r(m);
  for (std::size_t i = 0; i < m; ++i) r[i] = bs.data[i] - o[i];
  double q = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < m; ++j) v += bs.gamma_inv_sqrt[i * m + j] * r[j];
    q += v * v;
  }
  return std::exp(-0.5 * q);
}

ParametricMap posterior_integrand(const BayesSetup& bs, const ParametricMap& phi) {
  ParametricMap u;
  u.output_dim = phi.output_dim + 1;
  u.thread_safe = bs.forward.thread_safe && phi.thread_safe;
  u.fn = [bs, phi](std::span<const double> y) {
    const double theta = posterior_density(bs, y);
    auto v = phi(y);
    for (auto& x : v) x *= theta;
    v.push_back(theta);
    return v;
  };
  return u;
}

namespace {

PosteriorResult finish(std::vector<double> q, std::size_t evaluations) {
  PosteriorResult r;
  r.Z = q.back();
  q.pop_back();
  r.numerator = std::move(q);
  r.evaluations = evaluations;
  if (!(r.Z > 0.0)) {
    std::ostringstream msg;
    msg << "quadrature of the posterior density is " << r.Z << "; refine the index set";
    throw DegenerateNormalization(msg.str());
  }
  r.expectation.resize(r.numerator.size());
  for (std::size_t i = 0; i < r.numerator.size(); ++i) r.expectation[i] = r.numerator[i] / r.Z;
  return r;
}

} // namespace

PosteriorResult posterior_expectation(const BayesSetup& bs, const ParametricMap& phi, const IndexSet& set) {
  std::size_t n = 0;
  auto q = quadrature(set, posterior_integrand(bs, phi), &n);
  return finish(std::move(q), n);
}

PosteriorResult posterior_expectation(const LevelAllocation& alloc, std::span<const BayesSetup> levels,
                                      const ParametricMap& phi) {
  std::vector<ParametricMap> maps;
  for (const auto& bs : levels) maps.push_back(posterior_integrand(bs, phi));
  std::vector<std::size_t> evals;
  auto q = ml_quadrature(alloc, maps, &evals);
  if (q.size() != phi.output_dim + 1) q.assign(phi.output_dim + 1, 0.0);
  std::size_t n = 0;
  for (auto e : evals) n += e;
  return finish(std::move(q), n);
}

} // namespace hsg
