#include "hsg/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "hsg/errors.hpp"

namespace hsg {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  const double x = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument("trailing characters");
  return x;
}

std::uint64_t to_u64(const std::string& v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw std::invalid_argument("not an unsigned integer");
  return x;
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw std::invalid_argument("empty list entry");
    out.push_back(to_double(item));
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

using Setter = std::function<void(StudyConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"system", [](StudyConfig& c, const std::string& v) { c.system = v; }},
      {"r_decay", [](StudyConfig& c, const std::string& v) { c.r_decay = to_double(v); }},
      {"c", [](StudyConfig& c, const std::string& v) { c.c = to_double(v); }},
      {"d_max", [](StudyConfig& c, const std::string& v) { c.d_max = to_u64(v); }},
      {"f", [](StudyConfig& c, const std::string& v) { c.f = to_double(v); }},
      {"qoi", [](StudyConfig& c, const std::string& v) { c.qoi = v; }},
      {"x0", [](StudyConfig& c, const std::string& v) { c.x0 = to_double(v); }},
      {"n_cells", [](StudyConfig& c, const std::string& v) { c.n_cells = to_u64(v); }},
      {"fidelity", [](StudyConfig& c, const std::string& v) { c.fidelity = v; }},
      {"p", [](StudyConfig& c, const std::string& v) { c.p = to_double(v); }},
      {"xi", [](StudyConfig& c, const std::string& v) { c.xi = to_double(v); }},
      {"r", [](StudyConfig& c, const std::string& v) { c.r = unsigned(to_u64(v)); }},
      {"tau", [](StudyConfig& c, const std::string& v) { c.tau = to_double(v); }},
      {"K", [](StudyConfig& c, const std::string& v) { c.K = to_double(v); }},
      {"K_ml", [](StudyConfig& c, const std::string& v) { c.K_ml = to_double(v); }},
      {"q1", [](StudyConfig& c, const std::string& v) { c.q1 = to_double(v); }},
      {"alpha", [](StudyConfig& c, const std::string& v) { c.alpha = to_double(v); }},
      {"d_decay", [](StudyConfig& c, const std::string& v) { c.d_decay = to_double(v); }},
      {"budgets", [](StudyConfig& c, const std::string& v) { c.budgets = to_list(v); }},
      {"eps", [](StudyConfig& c, const std::string& v) { c.eps = to_list(v); }},
      {"levels", [](StudyConfig& c, const std::string& v) { c.levels = unsigned(to_u64(v)); }},
      {"reference_factor", [](StudyConfig& c, const std::string& v) { c.reference_factor = to_double(v); }},
      {"cov", [](StudyConfig& c, const std::string& v) { c.cov = v; }},
      {"lambda", [](StudyConfig& c, const std::string& v) { c.lambda = to_double(v); }},
      {"nu", [](StudyConfig& c, const std::string& v) { c.nu = to_double(v); }},
      {"m", [](StudyConfig& c, const std::string& v) { c.m = to_u64(v); }},
      {"ell", [](StudyConfig& c, const std::string& v) { c.ell = to_double(v); }},
      {"samples", [](StudyConfig& c, const std::string& v) { c.samples = to_u64(v); }},
      {"dump", [](StudyConfig& c, const std::string& v) { c.dump = to_u64(v); }},
      {"kappa", [](StudyConfig& c, const std::string& v) { c.kappa = to_double(v); }},
      {"P", [](StudyConfig& c, const std::string& v) { c.P = unsigned(to_u64(v)); }},
      {"bb_terms", [](StudyConfig& c, const std::string& v) { c.bb_terms = to_u64(v); }},
      {"lc_levels", [](StudyConfig& c, const std::string& v) { c.lc_levels = unsigned(to_u64(v)); }},
      {"forward", [](StudyConfig& c, const std::string& v) { c.forward = v; }},
      {"data", [](StudyConfig& c, const std::string& v) { c.data = to_list(v); }},
      {"noise", [](StudyConfig& c, const std::string& v) { c.noise = to_double(v); }},
      {"seed", [](StudyConfig& c, const std::string& v) { c.seed = to_u64(v); }},
  };
  return table;
}

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

} // namespace

StudyConfig parse_config(std::istream& is, const std::string& source) {
  StudyConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail(where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) fail(where + ": unknown key '" + key + "'");
    if (value.empty()) fail(where + ": key '" + key + "' has no value");
    try {
      it->second(cfg, value);
    } catch (const std::exception& e) {
      fail(where + ": invalid value '" + value + "' for key '" + key + "' (" + e.what() + ")");
    }
  }
  validate(cfg);
  return cfg;
}

StudyConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

void validate(const StudyConfig& c) {
  auto require = [](bool ok, const std::string& key, const std::string& what) {
    if (!ok) fail("key '" + key + "': " + what);
  };
  require(c.system == "sin" || c.system == "constant" || c.system == "blocks", "system",
          "expected sin, constant or blocks");
  require(c.qoi == "point" || c.qoi == "mean", "qoi", "expected point or mean");
  require(c.fidelity == "exact" || c.fidelity == "fem", "fidelity", "expected exact or fem");
  require(c.cov == "exponential" || c.cov == "matern", "cov", "expected exponential or matern");
  require(c.forward == "linear" || c.forward == "model", "forward", "expected linear or model");
  require(c.r_decay > 1.0, "r_decay", "must exceed 1");
  require(c.d_max >= 1, "d_max", "must be positive");
  require(c.x0 >= 0.0 && c.x0 <= 1.0, "x0", "must lie in [0,1]");
  require(c.n_cells >= 1, "n_cells", "must be positive");
  require(c.p > 0.0 && c.p < 1.0, "p", "must lie in (0,1)");
  require(c.xi > 0.0, "xi", "must be positive");
  require(c.tau > 0.0, "tau", "must be positive");
  require(double(c.r) > c.tau && c.r > 2, "r", "must exceed tau and 2");
  require(c.K > 0.0, "K", "must be positive");
  require(c.K_ml > 0.0, "K_ml", "must be positive");
  require(c.q1 > 0.0 && c.q1 < 2.0, "q1", "must lie in (0,2)");
  require(c.alpha > 0.0, "alpha", "must be positive");
  require(c.d_decay > 0.0, "d_decay", "must be positive");
  require(c.levels >= 1 && c.levels <= 24, "levels", "must lie in [1,24]");
  require(c.reference_factor > 1.0, "reference_factor", "must exceed 1");
  for (std::size_t i = 0; i < c.budgets.size(); ++i) {
    require(c.budgets[i] >= 1.0, "budgets", "entries must be at least 1");
    require(i == 0 || c.budgets[i] > c.budgets[i - 1], "budgets", "must be strictly increasing");
  }
  for (std::size_t i = 0; i < c.eps.size(); ++i) {
    require(c.eps[i] > 0.0 && c.eps[i] <= 1.0, "eps", "entries must lie in (0,1]");
    require(i == 0 || c.eps[i] < c.eps[i - 1], "eps", "must be strictly decreasing");
  }
  require(c.lambda > 0.0, "lambda", "must be positive");
  require(c.m >= 1, "m", "must be positive");
  require(c.ell >= 1.0, "ell", "must be at least 1");
  require(c.kappa == 0.0 || c.kappa > 1.0, "kappa", "must be 0 (no cutoff) or exceed 1");
  require(c.kappa == 0.0 || 2.0 * c.ell >= c.kappa + 1.0, "ell", "must be at least (kappa + 1) / 2");
  require(c.P >= 1, "P", "must be positive");
  require(!c.data.empty(), "data", "must not be empty");
  require(c.noise > 0.0, "noise", "must be positive");
  require(c.forward == "model" || c.data.size() <= c.d_max, "data", "linear forward map needs at most d_max entries");
  require(c.forward == "linear" || c.data.size() == 1, "data", "model forward map has one output");
}

std::string to_string(const StudyConfig& c) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "system = " << c.system << "\nr_decay = " << c.r_decay << "\nc = " << c.c << "\nd_max = " << c.d_max
     << "\nf = " << c.f << "\nqoi = " << c.qoi << "\nx0 = " << c.x0 << "\nn_cells = " << c.n_cells
     << "\nfidelity = " << c.fidelity << "\np = " << c.p << "\nxi = " << c.xi << "\nr = " << c.r
     << "\ntau = " << c.tau << "\nK = " << c.K << "\nK_ml = " << c.K_ml << "\nq1 = " << c.q1 << "\nalpha = " << c.alpha
     << "\nd_decay = " << c.d_decay << "\nbudgets = " << join(c.budgets) << "\neps = " << join(c.eps)
     << "\nlevels = " << c.levels << "\nreference_factor = " << c.reference_factor << "\ncov = " << c.cov
     << "\nlambda = " << c.lambda << "\nnu = " << c.nu << "\nm = " << c.m << "\nell = " << c.ell
     << "\nsamples = " << c.samples << "\ndump = " << c.dump << "\nkappa = " << c.kappa << "\nP = " << c.P
     << "\nbb_terms = " << c.bb_terms << "\nlc_levels = " << c.lc_levels << "\nforward = " << c.forward
     << "\ndata = " << join(c.data) << "\nnoise = " << c.noise << "\nseed = " << c.seed << '\n';
  return os.str();
}

ModelProblem1D make_problem(const StudyConfig& c) {
  RepresentationSystem sys;
  if (c.system == "sin") {
    sys = {SinDecay{c.r_decay}, c.d_max};
  } else if (c.system == "constant") {
    sys = {ConstantMode{c.c}, 1};
  } else {
    sys = {PiecewiseConstantBlocks{c.r_decay}, c.d_max};
  }
  const Qoi qoi{c.qoi == "mean" ? QoiKind::mean : QoiKind::point, c.x0};
  auto mp = ModelProblem1D::constant_rhs(std::move(sys), c.f, qoi);
  mp.n_cells = c.n_cells;
  return mp;
}

Fidelity make_fidelity(const StudyConfig& c) {
  if (c.fidelity == "fem") return Fem{c.n_cells};
  return Exact{};
}

CovarianceSpec make_covariance(const StudyConfig& c) {
  if (c.cov == "matern") return {Matern{c.lambda, c.nu}};
  return {Exponential{c.lambda}};
}

std::vector<double> decay_sequence(const StudyConfig& c) {
  if (c.system == "constant") return {std::max(std::abs(c.c), 1e-300)};
  std::vector<double> b(c.d_max);
  for (std::size_t j = 0; j < c.d_max; ++j) b[j] = std::pow(double(j + 1), -c.r_decay);
  return b;
}

} // namespace hsg
