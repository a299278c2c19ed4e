#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "hsg/config.hpp"
#include "hsg/errors.hpp"
#include "hsg/grf.hpp"
#include "hsg/hermite.hpp"
#include "hsg/lambda.hpp"
#include "hsg/model.hpp"
#include "hsg/multilevel.hpp"
#include "hsg/smolyak.hpp"
#include "hsg/study.hpp"
#include "hsg/weights.hpp"

namespace py = pybind11;
using namespace hsg;

namespace {

// Python callables run under the GIL, so batches stay on one thread.
ParametricMap wrap_callable(py::function f, std::size_t output_dim) {
  ParametricMap u;
  u.output_dim = output_dim;
  u.thread_safe = false;
  u.fn = [f = std::move(f), output_dim](std::span<const double> y) {
    py::gil_scoped_acquire gil;
    py::object r = f(std::vector<double>(y.begin(), y.end()));
    if (output_dim == 1 && (py::isinstance<py::float_>(r) || py::isinstance<py::int_>(r)))
      return std::vector<double>{r.cast<double>()};
    return r.cast<std::vector<double>>();
  };
  return u;
}

StudyConfig config_from_text(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is, "<python>");
}

py::dict coeff_dict(const HermitePolynomial& p) {
  py::dict d;
  for (const auto& [nu, c] : p.coeffs) d[py::cast(nu)] = c;
  return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse-grid Hermite collocation: rules, index sets, Smolyak operators, multilevel allocations, "
            "random fields and the model problem";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("hermite_eval", &hermite_eval, py::arg("k"), py::arg("x"), "Normalized probabilists' Hermite polynomial H_k(x).");
  m.def("gauss_hermite_rule", [](unsigned n) {
    const auto r = gauss_hermite_rule(n);
    return py::make_tuple(r.nodes, r.weights);
  }, py::arg("n"), "Nodes and weights (summing to 1) of the (n+1)-point rule.");

  py::class_<MultiIndex>(m, "MultiIndex")
      .def(py::init<>())
      .def(py::init([](const std::vector<std::uint32_t>& dense) { return MultiIndex::from_dense(dense); }),
           py::arg("exponents"))
      .def_static("unit", &MultiIndex::unit, py::arg("dim"), py::arg("exponent") = 1)
      .def_property_readonly("entries", &MultiIndex::entries)
      .def_property_readonly("order", &MultiIndex::order)
      .def("__getitem__", &MultiIndex::operator[])
      .def("__eq__", [](const MultiIndex& a, const MultiIndex& b) { return a == b; })
      .def("__lt__", [](const MultiIndex& a, const MultiIndex& b) { return a < b; })
      .def("__hash__", [](const MultiIndex& a) { return MultiIndexHash{}(a); })
      .def("__repr__", [](const MultiIndex& a) { return "MultiIndex(" + a.to_string() + ")"; })
      .def("__str__", &MultiIndex::to_string);

  py::class_<IndexSet>(m, "IndexSet")
      .def(py::init<>())
      .def(py::init([](const std::vector<MultiIndex>& members) {
        IndexSet s;
        for (const auto& nu : members) s.insert(nu);
        return s;
      }))
      .def("add", &IndexSet::insert)
      .def("__len__", &IndexSet::size)
      .def("__contains__", &IndexSet::contains)
      .def("__iter__", [](const IndexSet& s) { return py::make_iterator(s.begin(), s.end()); }, py::keep_alive<0, 1>())
      .def("__eq__", [](const IndexSet& a, const IndexSet& b) { return a == b; })
      .def("is_downward_closed", &IndexSet::is_downward_closed)
      .def_property_readonly("span", &IndexSet::span);

  py::class_<WeightFamily>(m, "WeightFamily")
      .def(py::init(&WeightFamily::make), py::arg("b"), py::arg("p") = 0.5, py::arg("xi") = 1.0, py::arg("r") = 4,
           py::arg("tau") = 3.0, py::arg("k") = 1, py::arg("K") = 1.0)
      .def_readonly("rho", &WeightFamily::rho)
      .def("c", [](const WeightFamily& w, const MultiIndex& nu) { return c_weight(w, nu); }, py::arg("nu"));

  m.def("build_lambda", [](const WeightFamily& w, double eps) { return build_lambda(w, eps); }, py::arg("weights"),
        py::arg("eps"), "Threshold set {nu : 1/c_nu >= eps}.");
  m.def("combination_coeffs", [](const IndexSet& s) { return combination_coeffs(s).terms; }, py::arg("set"));
  m.def("count_evaluation_points", &count_evaluation_points, py::arg("set"));

  m.def("interpolate", [](const IndexSet& s, py::function f, std::size_t output_dim) {
    return coeff_dict(interpolate(s, wrap_callable(std::move(f), output_dim)));
  }, py::arg("set"), py::arg("f"), py::arg("output_dim") = 1,
     "Hermite coefficients {MultiIndex: [values]} of the sparse-grid interpolant of f.");
  m.def("quadrature", [](const IndexSet& s, py::function f, std::size_t output_dim) {
    std::size_t n = 0;
    const auto v = quadrature(s, wrap_callable(std::move(f), output_dim), &n);
    return py::make_tuple(v, n);
  }, py::arg("set"), py::arg("f"), py::arg("output_dim") = 1, "Sparse-grid quadrature and the number of evaluations.");

  m.def("matern_cov", &matern_cov, py::arg("x"), py::arg("lam"), py::arg("nu"));
  m.def("bspline_cutoff", &bspline_cutoff, py::arg("t"), py::arg("kappa"), py::arg("P"));
  m.def("sample_grf", [](const std::string& cov, double lam, double nu, std::size_t grid, double ell, std::uint64_t seed) {
    const CovarianceSpec spec = cov == "matern" ? CovarianceSpec{Matern{lam, nu}} : CovarianceSpec{Exponential{lam}};
    const auto plan = circulant_embed_1d(spec, grid, ell);
    std::vector<double> xs(plan.size());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = plan.x(i);
    return py::make_tuple(xs, sample_grf(plan, seed));
  }, py::arg("cov") = "exponential", py::arg("lam") = 1.0, py::arg("nu") = 0.5, py::arg("m") = 64, py::arg("ell") = 2.0,
     py::arg("seed") = 0, "Grid points and one circulant-embedding sample.");
  m.def("brownian_bridge_kl", [](double T, double t, const std::vector<double>& z) { return brownian_bridge_kl(T, t, z); },
        py::arg("T"), py::arg("t"), py::arg("z"));

  m.def("exact_qoi", [](const std::string& config, const std::vector<double>& y) {
    return exact_qoi(make_problem(config_from_text(config)), y);
  }, py::arg("config"), py::arg("y"), "QoI of the closed-form solution for the problem described by config text.");
  m.def("expected_qoi", [](const std::string& config) { return expected_qoi(make_problem(config_from_text(config))); },
        py::arg("config") = "");
  m.def("fem_solve", [](const std::string& config, const std::vector<double>& y, std::size_t n_cells) {
    return fem_solve_1d(make_problem(config_from_text(config)), y, n_cells);
  }, py::arg("config"), py::arg("y"), py::arg("n_cells"));

  m.def("posterior_mean_linear", [](const std::vector<double>& data, double noise, const IndexSet& s) {
    ParametricMap forward;
    forward.output_dim = data.size();
    forward.fn = [k = data.size()](std::span<const double> y) {
      std::vector<double> out(k, 0.0);
      for (std::size_t i = 0; i < k && i < y.size(); ++i) out[i] = y[i];
      return out;
    };
    std::vector<double> gamma(data.size() * data.size(), 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) gamma[i * data.size() + i] = noise;
    const auto bs = BayesSetup::make(forward, data, gamma);
    const auto phi = ParametricMap::scalar([](std::span<const double> y) { return y.empty() ? 0.0 : y[0]; });
    const auto r = posterior_expectation(bs, phi, s);
    return py::make_tuple(r.expectation[0], r.Z);
  }, py::arg("data"), py::arg("noise"), py::arg("set"),
     "Posterior mean of y_1 and normalization Z for the observation y_i = data_i with noise * I.");

  m.def("run_study", [](const std::string& kind, const std::string& config, const std::filesystem::path& out) {
    run_study(kind, config_from_text(config), out);
  }, py::arg("kind"), py::arg("config"), py::arg("out"),
     "Runs a study (interp, quad, ml-interp, ml-quad, grf, bayes) from config text, writing CSV files to out.");
  m.def("resolved_config", [](const std::string& config) { return to_string(config_from_text(config)); },
        py::arg("config") = "");
}
