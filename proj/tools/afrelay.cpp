// Command-line front end: closed-form exponents, simulation runs, bounds,
// gain design and the figure recipes.

#include "afrelay/config_io.hpp"
#include "afrelay/experiment.hpp"
#include "afrelay/recipes.hpp"
#include "afrelay/scaling.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace afrelay;

constexpr int kExitConfig = 2;
constexpr int kExitPrecision = 3;

struct ConfigFlags {
  std::string config_path;
  std::optional<std::size_t> d, hops;
  std::optional<std::string> gain, mu_lognormal, power_geom, precision;
  std::optional<double> mu, power_const, n0, p0;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config (or a run manifest)");
    app->add_option("--d", d, "antennas per node");
    app->add_option("--hops", hops, "number of hops n");
    app->add_option("--gain", gain, "fixed|variable");
    app->add_option("--mu", mu, "constant channel variance");
    app->add_option("--mu-lognormal", mu_lognormal, "a,b for log mu ~ N(a, b)");
    app->add_option("--power-const", power_const, "constant relay power p");
    app->add_option("--power-geom", power_geom, "p0,g for p_j = p0 g^j");
    app->add_option("--n0", n0, "noise variance");
    app->add_option("--p0", p0, "source power");
    app->add_option("--seed", seed, "base seed");
    app->add_option("--precision", precision, "double|big:<digits>");
  }

  network::NetworkConfig build() const {
    network::NetworkConfig cfg;
    if (!config_path.empty()) cfg = config::load_file(config_path);
    if (d) cfg.d = *d;
    if (hops) cfg.n = *hops;
    if (gain) cfg.gain = network::parse_gain(*gain);
    if (mu) cfg.mu = network::MuConstant{*mu};
    if (mu_lognormal) {
      auto [a, b] = config::parse_pair(*mu_lognormal, "mu_schedule.lognormal");
      cfg.mu = network::MuLognormal{a, b};
    }
    if (p0) cfg.p0 = *p0;
    if (power_const) cfg.power = network::PowerConstant{*power_const};
    if (power_geom) {
      auto [p, g] = config::parse_pair(*power_geom, "power_schedule.geometric");
      cfg.power = network::PowerGeometric{p, g};
      cfg.p0 = p;
    }
    if (n0) cfg.n0 = *n0;
    if (seed) cfg.seed = *seed;
    if (precision) {
      try {
        cfg.precision = numerics::PrecisionConfig::parse(*precision);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("precision", e.what());
      }
    }
    cfg.validate();
    return cfg;
  }
};

void print_fits(const std::vector<experiment::SlopeFit>& fits) { experiment::write_fits_csv(std::cout, fits); }

int run_cli(int argc, char** argv) {
  CLI::App app{"Lyapunov analysis of amplify-and-forward MIMO relay chains"};
  app.require_subcommand(1);

  ConfigFlags exp_flags;
  auto* exponents = app.add_subcommand("exponents", "closed-form Lyapunov exponents (exponents.csv on stdout)");
  exp_flags.attach(exponents);

  ConfigFlags sim_flags;
  std::size_t replicas = 1;
  std::string out_dir = "out";
  std::vector<std::string> emit = {"trajectory", "exponents", "slopes"};
  double burn_in = 0.2;
  std::size_t threads = 0;
  auto* simulate = app.add_subcommand("simulate", "run seeded replicas and write CSVs plus manifest.json");
  sim_flags.attach(simulate);
  simulate->add_option("--replicas", replicas, "replica count (seeds seed+0..)")->check(CLI::PositiveNumber);
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--emit", emit, "trajectory exponents bounds nu slopes")->delimiter(',');
  simulate->add_option("--burn-in", burn_in, "fraction of hops dropped before slope fits");
  simulate->add_option("--threads", threads, "worker threads (0: all cores)");

  ConfigFlags bound_flags;
  auto* bounds = app.add_subcommand("bounds", "upper bounds on the exponents and power growth");
  bound_flags.attach(bounds);

  scaling::DesignRequest design;
  std::string design_gain = "fixed";
  auto* design_cmd = app.add_subcommand("design-gain", "geometric power growth that zeroes exponent i");
  design_cmd->add_option("--d", design.d)->required();
  design_cmd->add_option("--mu", design.mu);
  design_cmd->add_option("--n0", design.n0);
  design_cmd->add_option("--p0", design.p0);
  design_cmd->add_option("--gain", design_gain, "fixed|variable");
  design_cmd->add_option("--index", design.target_index, "target eigenchannel i");
  design_cmd->add_option("--horizon", design.horizon, "hops in the finite-horizon average");

  std::string growth = "constant";
  std::optional<std::string> pair;
  auto* regime = app.add_subcommand("regime", "limit of n*phi_ij as antennas scale with hops");
  regime->add_option("--growth", growth, "constant|sublinear|linear|superlinear");
  regime->add_option("--pair", pair, "both-nonneg|both-nonpos|straddling");

  std::string figure;
  recipes::ReproduceOptions repro;
  std::string repro_out = "out";
  std::optional<std::size_t> repro_replicas, repro_hops;
  std::optional<std::string> repro_precision;
  auto* reproduce = app.add_subcommand("reproduce", "run a figure recipe");
  reproduce->add_option("figure", figure, "fig2..fig8")->required();
  reproduce->add_option("--out", repro_out, "output directory");
  reproduce->add_option("--seed", repro.seed, "base seed");
  reproduce->add_option("--replicas", repro_replicas);
  reproduce->add_option("--hops", repro_hops, "hops (fig2-6) or steps (fig8)");
  reproduce->add_option("--precision", repro_precision, "double|big:<digits> (fig2-6)");
  reproduce->add_option("--threads", repro.threads);

  std::string fit_path;
  double fit_burn = 0.2;
  std::optional<double> fit_predicted;
  auto* fit = app.add_subcommand("fit", "OLS slope of a two-column CSV (n,log value)");
  fit->add_option("csv", fit_path, "input file with a header row")->required();
  fit->add_option("--burn-in", fit_burn);
  fit->add_option("--predicted", fit_predicted, "predicted slope for rel_err");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*exponents) {
    auto cfg = exp_flags.build();
    experiment::write_exponents_csv(std::cout, scaling::exponents_closed_form(cfg));
  } else if (*simulate) {
    experiment::ExperimentSpec spec;
    // A manifest also carries replicas, emit and burn-in; flags still win.
    if (!sim_flags.config_path.empty()) {
      std::ifstream in(sim_flags.config_path);
      const auto j = nlohmann::json::parse(in, nullptr, false);
      if (j.is_object() && j.contains("config") && j.contains("seeds")) spec = experiment::spec_from_manifest(j);
    }
    spec.config = sim_flags.build();
    if (simulate->count("--replicas")) spec.replicas = replicas;
    if (simulate->count("--burn-in")) spec.burn_in = burn_in;
    if (simulate->count("--emit")) {
      spec.emit.clear();
      for (const auto& e : emit) spec.emit.insert(experiment::parse_emit(e));
    }
    spec.output_dir = out_dir;
    spec.threads = threads;
    auto result = experiment::run(spec);
    for (const auto& f : result.files) std::cerr << "wrote " << f.string() << '\n';
    if (!result.fits.empty()) print_fits(result.fits);
  } else if (*bounds) {
    auto cfg = bound_flags.build();
    experiment::write_bounds_csv(std::cout, cfg, scaling::exponents_closed_form(cfg));
  } else if (*design_cmd) {
    design.gain = network::parse_gain(design_gain);
    auto r = scaling::design_power_growth(design);
    std::cout << "growth,log_growth,asymptotic_growth,lambda_at_growth\n"
              << experiment::format_double(r.growth) << ',' << experiment::format_double(std::log(r.growth)) << ','
              << experiment::format_double(r.asymptotic_growth) << ','
              << experiment::format_double(r.lambda_at_growth) << '\n';
  } else if (*regime) {
    std::optional<scaling::DifferenceRegime> p;
    if (pair) {
      if (*pair == "both-nonneg") p = scaling::DifferenceRegime::both_nonneg;
      else if (*pair == "both-nonpos") p = scaling::DifferenceRegime::both_nonpos;
      else if (*pair == "straddling") p = scaling::DifferenceRegime::straddling;
      else throw ConfigError("pair", "expected both-nonneg|both-nonpos|straddling");
    }
    scaling::AntennaGrowth g;
    try {
      g = scaling::parse_antenna_growth(growth);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("growth", e.what());
    }
    std::cout << scaling::to_string(scaling::scaling_regime(g, p)) << '\n';
  } else if (*reproduce) {
    repro.output_dir = repro_out;
    repro.replicas = repro_replicas;
    repro.hops = repro_hops;
    if (repro_precision) {
      try {
        repro.precision = numerics::PrecisionConfig::parse(*repro_precision);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("precision", e.what());
      }
    }
    auto result = recipes::reproduce(figure, repro);
    for (const auto& f : result.files) std::cerr << "wrote " << f.string() << '\n';
    if (!result.fits.empty()) print_fits(result.fits);
  } else if (*fit) {
    std::ifstream in(fit_path);
    if (!in) throw ConfigError("csv", "cannot open '" + fit_path + "'");
    std::string line;
    std::getline(in, line);
    std::vector<std::pair<double, double>> series;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto [n, v] = config::parse_pair(line, "csv");
      series.emplace_back(n, v);
    }
    auto f = experiment::fit_slope(series, fit_burn);
    f.quantity = "series";
    if (fit_predicted) {
      f.predicted = *fit_predicted;
      f.rel_err = experiment::relative_error(f.slope, f.predicted);
    }
    print_fits({f});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const afrelay::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const afrelay::PrecisionEscalation& e) {
    std::cerr << "precision: " << e.what() << '\n';
    return kExitPrecision;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
