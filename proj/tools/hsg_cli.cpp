// Command-line runner for the convergence studies and random-field sampler.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hsg/config.hpp"
#include "hsg/errors.hpp"
#include "hsg/study.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::vector<double> parse_budgets(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw hsg::ConfigError("--budgets: invalid entry '" + item + "'");
    }
  }
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-grid Hermite collocation studies"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", budgets;
  std::uint64_t seed = 0;
  bool seed_given = false;

  const char* kinds[][2] = {
      {"interp", "Interpolation convergence study"},
      {"quad", "Quadrature convergence study"},
      {"ml-interp", "Multilevel interpolation study"},
      {"ml-quad", "Multilevel quadrature study"},
      {"grf", "Circulant-embedding sampler and covariance check"},
      {"bayes", "Posterior expectation study"},
  };
  for (const auto& k : kinds) {
    auto* sub = app.add_subcommand(k[0], k[1]);
    sub->add_option("--config", config_path, "Configuration file (key = value)")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Random seed (overrides the config)")
        ->each([&](const std::string&) { seed_given = true; });
    sub->add_option("--budgets", budgets, "Comma-separated budgets (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const std::string kind = app.get_subcommands().front()->get_name();
  try {
    hsg::StudyConfig cfg = config_path.empty() ? hsg::StudyConfig{} : hsg::load_config(config_path);
    if (seed_given) cfg.seed = seed;
    if (!budgets.empty()) {
      cfg.budgets = parse_budgets(budgets);
      cfg.eps.clear();
    }
    hsg::validate(cfg);
    hsg::run_study(kind, cfg, out_dir);
  } catch (const hsg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const hsg::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
