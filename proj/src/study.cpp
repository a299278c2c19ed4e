#include "hsg/study.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hsg/errors.hpp"
#include "hsg/grf.hpp"
#include "hsg/lambda.hpp"
#include "hsg/model.hpp"
#include "hsg/rng.hpp"
#include "hsg/smolyak.hpp"
#include "hsg/weights.hpp"

namespace hsg {

namespace {

constexpr std::size_t kStudyCap = 2'000'000;

WeightFamily weights(const StudyConfig& cfg, std::vector<double> b, unsigned k, double K) {
  try {
    return WeightFamily::make(std::move(b), cfg.p, cfg.xi, cfg.r, cfg.tau, k, K);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("weight parameters: ") + e.what());
  }
}

WeightFamily weights(const StudyConfig& cfg, unsigned k) { return weights(cfg, decay_sequence(cfg), k, cfg.K); }

IndexSet lambda_set(const WeightFamily& w, double eps) { return build_lambda(w, eps, kStudyCap); }

double points_of(const WeightFamily& w, double eps) {
  return double(count_evaluation_points(lambda_set(w, eps)));
}

struct Step {
  double budget;
  double eps;
};

// Budgets are met by bisection unless an explicit eps grid is configured.
std::vector<Step> schedule(const StudyConfig& cfg, const std::function<double(double)>& measure,
                           const std::vector<double>& defaults) {
  std::vector<Step> steps;
  if (!cfg.eps.empty()) {
    for (double e : cfg.eps) steps.push_back({measure(e), e});
    return steps;
  }
  for (double n : cfg.budgets.empty() ? defaults : cfg.budgets) steps.push_back({n, bisect_eps(measure, n)});
  return steps;
}

double max_budget(const std::vector<Step>& steps) {
  double m = 0.0;
  for (const auto& s : steps) m = std::max(m, s.budget);
  return m;
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string rate_cell(const std::optional<double>& rate, bool last) {
  return (last && rate) ? num(*rate) : std::string();
}

std::size_t ml_evaluations(const LevelAllocation& alloc) {
  const auto gammas = gamma_sets(alloc);
  std::vector<CombinationExpansion> exps(gammas.size() + 1);
  for (std::size_t j = 0; j < gammas.size(); ++j) exps[j] = combination_coeffs(gammas[j]);
  std::size_t n = 0;
  for (std::size_t j = 1; j <= gammas.size(); ++j) n += evaluation_points(difference(exps[j - 1], exps[j])).size();
  return n;
}

double point_weight_sum(const IndexSet& set) {
  double s = 0.0;
  for (const auto& nu : set) s += p_weight(nu, 1.0);
  return s;
}

} // namespace

std::optional<double> fit_rate(const std::vector<double>& x, const std::vector<double>& y, std::size_t tail) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (tail < 2 || lx.size() < tail) return std::nullopt;
  const std::size_t first = lx.size() - tail;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = first; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= double(tail);
  my /= double(tail);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = first; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

double bisect_eps(const std::function<double(double)>& measure, double budget, int iterations) {
  auto fits = [&](double e) {
    try {
      return measure(e) <= budget;
    } catch (const ThresholdTooSmall&) {
      return false;
    } catch (const LevelTooLarge&) {
      return false;
    }
  };
  double lo = 1.0, hi = 1.0;
  if (fits(hi)) {
    for (lo = 0.1; fits(lo); lo *= 0.1) {
      hi = lo;
      if (lo < 1e-300) return hi;
    }
  } else {
    for (hi = 10.0; !fits(hi); hi *= 10.0) {
      lo = hi;
      if (hi > 1e300) {
        std::ostringstream msg;
        msg << "budget " << budget << " is too small for any threshold";
        throw EmptyAllocation(msg.str());
      }
    }
  }
  for (int i = 0; i < iterations; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (fits(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

QuadStudy run_quad_study(const StudyConfig& cfg) {
  const auto mp = make_problem(cfg);
  const auto fidelity = make_fidelity(cfg);
  const auto u = as_parametric_map(mp, fidelity);
  const auto w = weights(cfg, 2);
  const std::uint64_t cost = std::holds_alternative<Fem>(fidelity) ? cfg.n_cells : 1;
  auto measure = [&](double e) { return points_of(w, e); };
  const auto steps = schedule(cfg, measure, {100, 400, 1600, 6400, 20000});

  QuadStudy study;
  if (std::holds_alternative<Exact>(fidelity)) {
    study.reference = expected_qoi(mp);
    study.reference_kind = "analytic Gaussian moment of the exact solution";
  } else {
    const double n_ref = cfg.reference_factor * max_budget(steps);
    const auto ref_set = lambda_set(w, bisect_eps(measure, n_ref));
    study.reference = quadrature(ref_set, u)[0];
    study.reference_kind = "over-resolved quadrature with at most " + num(n_ref) + " points";
  }

  std::vector<double> xs, ys;
  for (const auto& s : steps) {
    const auto set = lambda_set(w, s.eps);
    QuadRow row;
    row.budget = s.budget;
    row.eps = s.eps;
    row.value = quadrature(set, u, &row.n_points)[0];
    row.work = row.n_points * cost;
    row.abs_error = std::abs(row.value - study.reference);
    study.rows.push_back(row);
    xs.push_back(double(row.n_points));
    ys.push_back(row.abs_error);
  }
  study.rate = fit_rate(xs, ys);
  return study;
}

InterpStudy run_interp_study(const StudyConfig& cfg) {
  const auto mp = make_problem(cfg);
  const auto u = as_parametric_map(mp, make_fidelity(cfg));
  const auto w = weights(cfg, 1);
  auto measure = [&](double e) { return points_of(w, e); };
  const auto steps = schedule(cfg, measure, {25, 50, 100, 200, 400});

  InterpStudy study;
  const double n_ref = cfg.reference_factor * max_budget(steps);
  const auto ref_set = lambda_set(w, bisect_eps(measure, n_ref));
  study.reference_points = count_evaluation_points(ref_set);
  const auto reference = interpolate(ref_set, u);

  std::vector<double> xs, ys;
  for (const auto& s : steps) {
    const auto set = lambda_set(w, s.eps);
    InterpRow row;
    row.budget = s.budget;
    row.eps = s.eps;
    row.n_points = count_evaluation_points(set);
    row.l2_error = l2_norm(subtract(interpolate(set, u), reference));
    study.rows.push_back(row);
    xs.push_back(double(row.n_points));
    ys.push_back(row.l2_error);
  }
  study.rate = fit_rate(xs, ys);
  return study;
}

LevelAllocation ml_allocation(const StudyConfig& cfg, double eps, bool quadrature) {
  const unsigned k = quadrature ? 2 : 1;
  const auto b1 = decay_sequence(cfg);
  std::vector<double> b2(b1.size());
  for (std::size_t j = 0; j < b2.size(); ++j) b2[j] = std::pow(double(j + 1), -cfg.d_decay);
  const auto w1 = weights(cfg, b1, k, cfg.K_ml);
  const auto w2 = weights(cfg, b2, k, cfg.K_ml);
  ConstructLevelsParams params;
  params.q1 = cfg.q1;
  params.alpha = cfg.alpha;
  params.eps = eps;
  params.lambda.d_max = std::uint32_t(b1.size());
  params.lambda.cap = kStudyCap;
  return construct_levels([w1](const MultiIndex& nu) { return c_weight(w1, nu); },
                          [w2](const MultiIndex& nu) { return c_weight(w2, nu); }, params,
                          default_work_sequence(cfg.levels));
}

MlStudy run_ml_study(const StudyConfig& cfg, bool quadrature) {
  const auto mp = make_problem(cfg);
  const auto sw = default_work_sequence(cfg.levels);
  const auto u_levels = fem_levels(mp, sw);
  const auto exact = as_parametric_map(mp, Exact{});
  const auto w_sl = weights(cfg, decay_sequence(cfg), quadrature ? 2 : 1, cfg.K_ml);

  auto measure = [&](double e) {
    try {
      return double(work(ml_allocation(cfg, e, quadrature)));
    } catch (const EmptyAllocation&) {
      return 0.0;
    }
  };
  const auto steps = schedule(cfg, measure, {2048, 4096, 8192, 16384});

  MlStudy study;
  std::vector<LevelAllocation> allocs;
  for (const auto& s : steps) {
    allocs.push_back(ml_allocation(cfg, s.eps, quadrature));
    if (allocs.back().levels.empty())
      throw EmptyAllocation("budget " + num(s.budget) + " admits no multilevel allocation");
  }

  double ref_value = 0.0;
  HermitePolynomial ref_poly;
  if (quadrature) {
    ref_value = expected_qoi(mp);
    study.reference_kind = "analytic Gaussian moment of the exact solution";
  } else {
    std::size_t largest = 0;
    for (const auto& a : allocs) largest = std::max(largest, count_evaluation_points(gamma_sets(a)[0]));
    const double n_ref = cfg.reference_factor * double(largest);
    const auto ref_set = lambda_set(w_sl, bisect_eps([&](double e) { return points_of(w_sl, e); }, n_ref));
    ref_poly = interpolate(ref_set, exact);
    study.reference_kind = "exact-fidelity interpolant with at most " + num(n_ref) + " points";
  }

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& alloc = allocs[i];
    MlRow row;
    row.budget = steps[i].budget;
    row.eps = steps[i].eps;
    row.work = work(alloc);
    row.max_level = alloc.max_level();
    row.evaluations = ml_evaluations(alloc);

    if (quadrature)
      row.error = std::abs(ml_quadrature(alloc, u_levels)[0] - ref_value);
    else
      row.error = l2_norm(subtract(ml_interpolate(alloc, u_levels), ref_poly));

    // Single-level baseline: the best level whose Smolyak set fits the budget.
    row.sl_error = std::numeric_limits<double>::infinity();
    for (unsigned L = 1; L <= cfg.levels; ++L) {
      if (double(sw[L]) > row.budget) break;
      auto sl_measure = [&](double e) { return double(sw[L]) * point_weight_sum(lambda_set(w_sl, e)); };
      const double sl_eps = bisect_eps(sl_measure, row.budget);
      const auto sl_set = lambda_set(w_sl, sl_eps);
      double err;
      try {
        err = quadrature ? std::abs(hsg::quadrature(sl_set, u_levels[L - 1])[0] - ref_value)
                         : l2_norm(subtract(interpolate(sl_set, u_levels[L - 1]), ref_poly));
      } catch (const LevelTooLarge&) {
        continue;  // the set needs rules beyond the supported level
      }
      if (err < row.sl_error) {
        row.sl_error = err;
        row.sl_level = L;
        row.sl_indices = sl_set.size();
        row.sl_work = std::uint64_t(sl_measure(sl_eps));
      }
    }
    study.rows.push_back(row);
    xs.push_back(double(row.work));
    ys.push_back(row.error);
  }
  study.rate = fit_rate(xs, ys);
  return study;
}

GrfReport run_grf(const StudyConfig& cfg, const std::optional<std::filesystem::path>& out) {
  std::optional<Cutoff> cutoff;
  if (cfg.kappa > 0.0) cutoff = Cutoff{cfg.kappa, cfg.P};
  const auto plan = circulant_embed_1d(make_covariance(cfg), cfg.m, cfg.ell, cutoff, true);

  GrfReport rep;
  const std::size_t N = cfg.samples;
  rep.samples = N;
  if (out) {
    for (std::size_t i = 0; i < std::min(cfg.dump, N); ++i) {
      const std::uint64_t seed = cfg.seed + i;
      std::ofstream os(*out / ("sample_" + std::to_string(seed) + ".csv"));
      write_sample_csv(os, plan, sample_grf(plan, seed));
    }
  }
  const auto stats = grf_statistics(plan, N, cfg.seed);
  rep.max_mean = stats.max_mean;
  rep.max_cov_deviation = stats.max_cov_deviation;
  rep.mean_bound = N ? 3.0 / std::sqrt(double(N)) : 0.0;
  rep.cov_bound = N ? 4.0 * std::sqrt(2.0 / double(N)) : 0.0;
  rep.min_eigenvalue = *std::min_element(plan.eigenvalues.begin(), plan.eigenvalues.end());

  const NormalStream kl_stream(cfg.seed, 1), lc_stream(cfg.seed, 2);
  const std::size_t K = cfg.bb_terms;
  const std::uint64_t lc_stride = levy_index(cfg.lc_levels + 1, 0);
  std::vector<double> z(K);
  double kl_sum = 0.0, kl_sq = 0.0, lc_sum = 0.0, lc_sq = 0.0;
  for (std::size_t r = 0; r < N; ++r) {
    kl_stream.fill(std::uint64_t(r) * K, z);
    const double a = brownian_bridge_kl(1.0, 0.5, z);
    const double b = levy_ciesielski(cfg.lc_levels, 0.5, lc_stream, std::uint64_t(r) * lc_stride);
    kl_sum += a;
    kl_sq += a * a;
    lc_sum += b;
    lc_sq += b * b;
  }
  if (N > 1) {
    const double n = double(N);
    rep.kl_variance = (kl_sq - kl_sum * kl_sum / n) / (n - 1.0);
    rep.lc_variance = (lc_sq - lc_sum * lc_sum / n) / (n - 1.0);
    rep.variance_se = 0.25 * std::sqrt(2.0 / (n - 1.0));
  }
  return rep;
}

BayesStudy run_bayes(const StudyConfig& cfg) {
  const std::size_t m = cfg.data.size();
  // The linear forward map only sees the first m coordinates.
  std::vector<double> b = decay_sequence(cfg);
  if (cfg.forward == "linear") b.resize(std::min(b.size(), m));
  const auto w = weights(cfg, std::move(b), 2, cfg.K);
  std::vector<double> gamma(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) gamma[i * m + i] = cfg.noise;

  ParametricMap forward, phi;
  if (cfg.forward == "linear") {
    forward.output_dim = m;
    forward.fn = [m](std::span<const double> y) {
      std::vector<double> o(m, 0.0);
      for (std::size_t i = 0; i < std::min(m, y.size()); ++i) o[i] = y[i];
      return o;
    };
    phi = ParametricMap::scalar([](std::span<const double> y) { return y.empty() ? 0.0 : y[0]; });
  } else {
    forward = as_parametric_map(make_problem(cfg), make_fidelity(cfg));
    phi = forward;
  }
  const auto bs = BayesSetup::make(forward, cfg.data, gamma);

  auto measure = [&](double e) { return points_of(w, e); };
  const auto steps = schedule(cfg, measure, {5, 10, 20, 40, 80});

  BayesStudy study;
  if (cfg.forward == "linear") {
    study.reference = cfg.data[0] / (1.0 + cfg.noise);
    study.reference_kind = "conjugate Gaussian posterior mean";
  } else {
    const double n_ref = cfg.reference_factor * max_budget(steps);
    study.reference = posterior_expectation(bs, phi, lambda_set(w, bisect_eps(measure, n_ref))).expectation[0];
    study.reference_kind = "over-resolved quadrature with at most " + num(n_ref) + " points";
  }
  for (const auto& s : steps) {
    const auto res = posterior_expectation(bs, phi, lambda_set(w, s.eps));
    BayesRow row;
    row.budget = s.budget;
    row.eps = s.eps;
    row.n_points = res.evaluations;
    row.Z = res.Z;
    row.posterior_mean = res.expectation[0];
    row.abs_error = std::abs(row.posterior_mean - study.reference);
    study.rows.push_back(row);
  }
  return study;
}

void run_study(const std::string& kind, const StudyConfig& cfg, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  std::ostringstream meta;
  meta << "study = " << kind << '\n' << to_string(cfg);

  auto open = [&](const std::string& name) {
    std::ofstream os(out / name);
    if (!os) throw std::runtime_error("cannot write " + (out / name).string());
    os << std::setprecision(17);
    return os;
  };

  if (kind == "quad") {
    const auto st = run_quad_study(cfg);
    auto os = open("quad.csv");
    os << "budget,eps,n_points,work,value,abs_error,fitted_rate\n";
    for (std::size_t i = 0; i < st.rows.size(); ++i) {
      const auto& r = st.rows[i];
      os << r.budget << ',' << r.eps << ',' << r.n_points << ',' << r.work << ',' << r.value << ','
         << r.abs_error << ',' << rate_cell(st.rate, i + 1 == st.rows.size()) << '\n';
    }
    meta << "reference = " << st.reference_kind << "\nreference_value = " << num(st.reference) << '\n';
  } else if (kind == "interp") {
    const auto st = run_interp_study(cfg);
    auto os = open("interp.csv");
    os << "budget,eps,n_points,l2_error,fitted_rate\n";
    for (std::size_t i = 0; i < st.rows.size(); ++i) {
      const auto& r = st.rows[i];
      os << r.budget << ',' << r.eps << ',' << r.n_points << ',' << r.l2_error << ','
         << rate_cell(st.rate, i + 1 == st.rows.size()) << '\n';
    }
    meta << "reference = interpolant on " << st.reference_points << " points\n";
  } else if (kind == "ml-quad" || kind == "ml-interp") {
    const bool quad = kind == "ml-quad";
    const auto st = run_ml_study(cfg, quad);
    auto os = open(quad ? "ml_quad.csv" : "ml_interp.csv");
    os << "budget,eps,work,max_level,evaluations,error,sl_level,sl_work,sl_indices,sl_error,fitted_rate\n";
    for (std::size_t i = 0; i < st.rows.size(); ++i) {
      const auto& r = st.rows[i];
      os << r.budget << ',' << r.eps << ',' << r.work << ',' << r.max_level << ',' << r.evaluations << ','
         << r.error << ',' << r.sl_level << ',' << r.sl_work << ',' << r.sl_indices << ',' << r.sl_error << ','
         << rate_cell(st.rate, i + 1 == st.rows.size()) << '\n';
    }
    meta << "reference = " << st.reference_kind << "\nwork_sequence = 2^l\n";
  } else if (kind == "grf") {
    const auto rep = run_grf(cfg, out);
    auto os = open("grf_stats.csv");
    os << "samples,max_mean,mean_bound,max_cov_deviation,cov_bound,min_eigenvalue,kl_variance,lc_variance,"
          "variance_se\n";
    os << rep.samples << ',' << rep.max_mean << ',' << rep.mean_bound << ',' << rep.max_cov_deviation << ','
       << rep.cov_bound << ',' << rep.min_eigenvalue << ',' << rep.kl_variance << ',' << rep.lc_variance << ','
       << rep.variance_se << '\n';
    meta << "covariance_check = " << (rep.max_cov_deviation <= rep.cov_bound ? "pass" : "fail") << '\n';
  } else if (kind == "bayes") {
    const auto st = run_bayes(cfg);
    auto os = open("bayes.csv");
    os << "budget,eps,n_points,Z,posterior_mean,abs_error\n";
    for (const auto& r : st.rows)
      os << r.budget << ',' << r.eps << ',' << r.n_points << ',' << r.Z << ',' << r.posterior_mean << ','
         << r.abs_error << '\n';
    meta << "reference = " << st.reference_kind << "\nreference_value = " << num(st.reference) << '\n';
  } else {
    throw ConfigError("unknown study '" + kind + "'");
  }
  std::ofstream(out / "meta.txt") << meta.str();
}

} // namespace hsg
