#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "afrelay/config_io.hpp"
#include "afrelay/experiment.hpp"
#include "afrelay/recipes.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

using namespace afrelay;
using namespace afrelay::experiment;

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("afrelay_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

NetworkConfig small_config() {
  NetworkConfig cfg;
  cfg.d = 3;
  cfg.n = 20;
  cfg.gain = network::GainKind::variable;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("slope fits") {
  std::vector<std::pair<double, double>> line, flat;
  for (int n = 1; n <= 50; ++n) {
    line.emplace_back(n, -0.5 * n + 2);
    flat.emplace_back(n, 3.0);
  }
  auto f = fit_slope(line, 0.2);
  CHECK(f.slope == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.points == 40);
  auto g = fit_slope(flat, 0.2);
  CHECK(g.slope == 0.0);
  CHECK(g.r2 == 1.0);
  std::vector<std::pair<double, double>> short_series(line.begin(), line.begin() + 11);
  CHECK_THROWS_AS(fit_slope(short_series, 0.2), std::invalid_argument);
  CHECK_NOTHROW(fit_slope(short_series, 0.0));
  CHECK_THROWS_AS(fit_slope(line, 1.0), std::invalid_argument);
}

TEST_CASE("relative error") {
  CHECK(relative_error(1.1, 1.0) == doctest::Approx(0.1));
  CHECK(relative_error(-0.9, -1.0) == doctest::Approx(0.1));
  CHECK(relative_error(0.03, 0.0) == doctest::Approx(0.03));
}

TEST_CASE("per-hop exponent estimates settle at the predicted value") {
  // (1/n) log c_{n,i} at the last hop, averaged over replicas.
  NetworkConfig cfg;
  cfg.d = 4;
  cfg.n = 400;
  cfg.seed = 1;
  const auto runs = run_replicas(cfg, 32, 1);
  const auto ex = scaling::exponents_closed_form(cfg);
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<double> v;
    for (const auto& r : runs) v.push_back(r.records.back().log_capacity[i] / 400.0);
    double m = 0, ss = 0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    for (double x : v) ss += (x - m) * (x - m);
    const double se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    CHECK(std::abs(m - ex.lambda_gamma[i]) <= 3 * se);
  }
}

TEST_CASE("runs are deterministic and byte-identical") {
  ExperimentSpec spec;
  spec.config = small_config();
  spec.replicas = 3;
  spec.emit = {Emit::trajectory, Emit::exponents, Emit::bounds, Emit::nu, Emit::slopes};
  const fs::path dir_a = scratch("det_a");
  spec.output_dir = dir_a;
  run(spec);
  spec.output_dir = scratch("det_b");
  spec.threads = 1;
  run(spec);
  for (const char* name : {"trajectory.csv", "exponents.csv", "bounds.csv", "nu.csv", "fits.csv"}) {
    const auto ta = slurp(dir_a / name);
    CHECK(!ta.empty());
    CHECK(ta == slurp(spec.output_dir / name));
  }
}

TEST_CASE("replica fan-out matches separate single-replica runs") {
  auto cfg = small_config();
  const auto many = run_replicas(cfg, 8, 4);
  for (std::size_t r = 0; r < 8; ++r) {
    NetworkConfig c = cfg;
    c.seed = cfg.seed + r;
    const auto one = run_replicas(c, 1, 1);
    CHECK(many[r].seed == c.seed);
    CHECK(many[r].replica == r);
    REQUIRE(one[0].records.size() == many[r].records.size());
    for (std::size_t n = 0; n < one[0].records.size(); ++n) {
      CHECK(one[0].records[n].log_snr == many[r].records[n].log_snr);
      CHECK(one[0].records[n].log_power_X == many[r].records[n].log_power_X);
    }
  }
}

TEST_CASE("emit selects the files written") {
  ExperimentSpec spec;
  spec.config = small_config();
  spec.emit = {Emit::exponents};
  spec.output_dir = scratch("emit");
  auto res = run(spec);
  CHECK(fs::exists(spec.output_dir / "exponents.csv"));
  CHECK(fs::exists(spec.output_dir / "manifest.json"));
  CHECK_FALSE(fs::exists(spec.output_dir / "trajectory.csv"));
  CHECK_FALSE(fs::exists(spec.output_dir / "fits.csv"));
  CHECK(res.files.size() == 2);
  CHECK_THROWS_AS(parse_emit("plots"), ConfigError);
}

TEST_CASE("csv headers") {
  ExperimentSpec spec;
  spec.config = small_config();
  spec.emit = {Emit::trajectory, Emit::exponents, Emit::slopes, Emit::nu, Emit::bounds};
  spec.output_dir = scratch("headers");
  run(spec);
  CHECK(lines(slurp(spec.output_dir / "trajectory.csv"))[0] ==
        "replica,hop,eig_index,log_snr,capacity_nats,log_power_X,log_power_I");
  CHECK(lines(slurp(spec.output_dir / "exponents.csv"))[0] == "index,lambda_H,lambda_Q,lambda_gamma,method,stderr");
  CHECK(lines(slurp(spec.output_dir / "fits.csv"))[0] == "quantity,eig_index,slope,predicted,rel_err,r2");
  CHECK(lines(slurp(spec.output_dir / "nu.csv"))[0] == "replica,hop,i,j,log_nu");
  CHECK(lines(slurp(spec.output_dir / "bounds.csv"))[0] ==
        "index,gain,rho,upper_bound,lambda_H,power_growth_bound");
  // one row per (replica, hop, eigenchannel)
  CHECK(lines(slurp(spec.output_dir / "trajectory.csv")).size() == 1 + 20 * 3);
  auto rows = lines(slurp(spec.output_dir / "exponents.csv"));
  CHECK(rows[1].find("quadrature-variable") != std::string::npos);
}

TEST_CASE("manifest round trip reproduces outputs") {
  ExperimentSpec spec;
  spec.config = small_config();
  spec.config.precision = numerics::PrecisionConfig::big(30);
  spec.replicas = 2;
  spec.burn_in = 0.25;
  spec.emit = {Emit::trajectory, Emit::slopes};
  spec.output_dir = scratch("manifest_a");
  auto first = run(spec);
  const auto manifest = nlohmann::json::parse(slurp(spec.output_dir / "manifest.json"));
  CHECK(manifest["seeds"] == nlohmann::json::array({5, 6}));
  CHECK(manifest["config"]["precision"] == "big:30");
  CHECK(manifest.contains("versions"));
  CHECK(manifest.contains("wall_time_seconds"));

  auto again = spec_from_manifest(manifest);
  again.output_dir = scratch("manifest_b");
  run(again);
  CHECK(slurp(spec.output_dir / "trajectory.csv") == slurp(again.output_dir / "trajectory.csv"));
  CHECK(slurp(spec.output_dir / "fits.csv") == slurp(again.output_dir / "fits.csv"));

  // load_file accepts a manifest as a config
  auto cfg = config::load_file((spec.output_dir / "manifest.json").string());
  CHECK(config::to_json(cfg) == config::to_json(spec.config));
}

TEST_CASE("config json") {
  auto cfg = small_config();
  cfg.mu = network::MuLognormal{0.5, 2.0};
  cfg.power = network::PowerGeometric{1.0, 1.5};
  auto j = config::to_json(cfg);
  CHECK(config::to_json(config::from_json(j)) == j);
  j["colour"] = "blue";
  try {
    config::from_json(j);
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "colour");
  }
  nlohmann::json bad = {{"d", 0}};
  CHECK_THROWS_AS(config::from_json(bad), ConfigError);
  CHECK(config::parse_pair("1,2.5", "x") == std::pair<double, double>{1, 2.5});
  CHECK_THROWS_AS(config::parse_pair("1;2", "x"), ConfigError);
  CHECK_THROWS_AS(config::load_file("/nonexistent/afrelay.json"), ConfigError);
}

TEST_CASE("standard fits cover every series") {
  NetworkConfig cfg = small_config();
  const auto runs = run_replicas(cfg, 2, 1);
  const auto fits = standard_fits(runs, scaling::exponents_closed_form(cfg), 0.2);
  CHECK(fits.size() == 3 + 2 + 2);
  CHECK(fits[0].quantity == "log_capacity");
  CHECK(fits[3].quantity == "log_nu");
  CHECK(fits[3].eig_index == 2);
  CHECK(fits[5].quantity == "log_power_X");
  CHECK(fits[6].quantity == "log_power_I");
  const auto nu = pooled_series(runs, Series::log_nu, 3);
  CHECK(nu.size() == 2 * 20);
  CHECK(nu[0].second == doctest::Approx(runs[0].records[0].log_capacity[0] - runs[0].records[0].log_capacity[2]));
}

TEST_CASE("figure recipes") {
  recipes::ReproduceOptions opt;
  auto c2 = recipes::figure_config("fig2", opt);
  CHECK(c2.d == 4);
  CHECK(c2.gain == network::GainKind::fixed);
  CHECK(c2.n == 60);
  CHECK(c2.precision.is_big());
  auto c4 = recipes::figure_config("fig4", opt);
  CHECK(c4.d == 3);
  CHECK(c4.gain == network::GainKind::variable);
  CHECK_THROWS_AS(recipes::figure_config("fig7", opt), ConfigError);

  opt.output_dir = scratch("fig7");
  auto res = recipes::reproduce("fig7", opt);
  CHECK(fs::exists(opt.output_dir / "phi_bar.csv"));
  CHECK(res.fits.size() == 4);
  for (const auto& f : res.fits) CHECK(std::abs(f.slope + 1) < 0.15);
  CHECK_THROWS_AS(recipes::reproduce("fig9", opt), ConfigError);

  // A short simulated recipe writes the figure files.
  opt.output_dir = scratch("fig4");
  opt.hops = 20;
  opt.replicas = 1;
  opt.precision = numerics::PrecisionConfig::native();
  res = recipes::reproduce("fig4", opt);
  for (const char* name : {"trajectory.csv", "exponents.csv", "nu.csv", "overlay.csv", "fits.csv", "manifest.json"})
    CHECK(fs::exists(opt.output_dir / name));
}

TEST_CASE("fig8 sweep respects the bound on a small grid") {
  recipes::Fig8Options opt;
  opt.b_values = {1};
  opt.p_over_n0 = {1e0, 1e6};
  opt.steps = 400;
  opt.replicas = 2;
  const auto points = recipes::fig8_sweep(opt);
  CHECK(points.size() == 2 * 3);
  for (const auto& p : points) CHECK(p.estimate <= p.bound + 3 * p.std_error);
}
