#include "afrelay/recipes.hpp"

#include "afrelay/config_io.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace afrelay::recipes {

using experiment::format_double;

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

bool simulated(const std::string& fig) {
  return fig == "fig2" || fig == "fig3" || fig == "fig4" || fig == "fig5" || fig == "fig6";
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"};
  return ids;
}

network::NetworkConfig figure_config(const std::string& figure, const ReproduceOptions& opt) {
  if (!simulated(figure)) throw ConfigError("figure", "'" + figure + "' is not a simulated figure (fig2..fig6)");
  network::NetworkConfig cfg;
  const bool fixed = figure == "fig2" || figure == "fig3";
  cfg.d = fixed ? 4 : 3;
  cfg.gain = fixed ? network::GainKind::fixed : network::GainKind::variable;
  cfg.n = opt.hops.value_or(60);
  cfg.mu = network::MuConstant{1.0};
  cfg.power = network::PowerConstant{1.0};
  cfg.n0 = 1;
  cfg.p0 = 1;
  cfg.seed = opt.seed;
  cfg.precision = opt.precision.value_or(numerics::PrecisionConfig::big(100));
  return cfg;
}

std::size_t figure_replicas(const ReproduceOptions& opt) { return opt.replicas.value_or(4); }

std::vector<Fig8Point> fig8_sweep(const Fig8Options& opt) {
  struct Job {
    double b, p;
  };
  std::vector<Job> grid;
  for (double b : opt.b_values)
    for (double p : opt.p_over_n0) grid.push_back({b, p});

  std::vector<rds::LyapunovSpectrum> parts(grid.size() * opt.replicas);
  experiment::parallel_for(parts.size(), opt.threads, [&](std::size_t k) {
    const Job& job = grid[k / opt.replicas];
    const std::size_t replica = k % opt.replicas;
    network::NetworkConfig cfg;
    cfg.d = opt.d;
    cfg.n = opt.steps;
    cfg.gain = network::GainKind::variable;
    cfg.mu = network::MuLognormal{0.0, job.b};
    cfg.power = network::PowerConstant{job.p};
    cfg.n0 = 1;
    cfg.p0 = job.p;
    cfg.seed = numerics::replica_seed(opt.seed, replica);
    numerics::Rng rng(cfg.seed);
    rds::EstimateOptions est;
    est.steps = opt.steps;
    parts[k] = rds::estimate_spectrum(network::information_process<double>(cfg), est, rng);
  });

  const auto bound = scaling::lyap_upper_bounds(network::GainKind::variable, opt.d, 0.0);
  std::vector<Fig8Point> out;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<rds::LyapunovSpectrum> mine(parts.begin() + static_cast<std::ptrdiff_t>(g * opt.replicas),
                                            parts.begin() + static_cast<std::ptrdiff_t>((g + 1) * opt.replicas));
    auto merged = rds::merge_spectra(mine);
    for (std::size_t i = 0; i < opt.d; ++i)
      out.push_back({grid[g].b, grid[g].p, i + 1, merged.exponents[i], merged.std_error[i], bound[i]});
  }
  return out;
}

std::vector<PhiBarRow> fig7_table(std::size_t max_d, std::size_t max_i) {
  std::vector<PhiBarRow> rows;
  for (std::size_t i = 2; i <= max_i; ++i)
    for (std::size_t d = i; d <= max_d; ++d) {
      PhiBarRow r;
      r.d = d;
      r.i = i;
      r.phi_bar = scaling::phi_bar_exact(d, 1, i).convert_to<double>();
      r.leading_order = static_cast<double>(i - 1) / static_cast<double>(d);
      rows.push_back(r);
    }
  return rows;
}

ReproduceResult reproduce(const std::string& figure, const ReproduceOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  bool known = false;
  for (const auto& id : figure_ids()) known = known || id == figure;
  if (!known) throw ConfigError("figure", "unknown figure '" + figure + "' (fig2..fig8)");
  std::filesystem::create_directories(opt.output_dir);
  ReproduceResult result;
  nlohmann::json manifest;
  manifest["figure"] = figure;
  auto emit_file = [&](const std::string& name, const std::function<void(std::ostream&)>& write) {
    const auto path = opt.output_dir / name;
    auto out = open_output(path);
    write(out);
    result.files.push_back(path);
  };

  if (simulated(figure)) {
    // About a minute per replica at 100 digits on one core.
    const auto cfg = figure_config(figure, opt);
    const std::size_t replicas = figure_replicas(opt);
    const auto exponents = scaling::exponents_closed_form(cfg);
    const auto runs = experiment::run_replicas(cfg, replicas, opt.threads);
    result.fits = experiment::standard_fits(runs, exponents, 0.2);
    emit_file("trajectory.csv", [&](std::ostream& os) { experiment::write_trajectory_csv(os, runs); });
    emit_file("exponents.csv", [&](std::ostream& os) { experiment::write_exponents_csv(os, exponents); });
    emit_file("nu.csv", [&](std::ostream& os) { experiment::write_nu_csv(os, runs); });
    emit_file("overlay.csv", [&](std::ostream& os) {
      os << "hop,eig_index,predicted_log_capacity,predicted_log_nu\n";
      for (std::size_t n = 1; n <= cfg.n; ++n)
        for (std::size_t i = 1; i <= cfg.d; ++i) {
          const double nn = static_cast<double>(n);
          const double nu = i == 1 ? 0.0 : scaling::predict_nu_slope(exponents, 1, i);
          os << n << ',' << i << ',' << format_double(nn * exponents.lambda_gamma[i - 1]) << ','
             << format_double(nn * nu) << '\n';
        }
    });
    emit_file("fits.csv", [&](std::ostream& os) { experiment::write_fits_csv(os, result.fits); });
    manifest["config"] = config::to_json(cfg);
    manifest["replicas"] = replicas;
  } else if (figure == "fig7") {
    // Analytic; milliseconds.
    const auto rows = fig7_table();
    emit_file("phi_bar.csv", [&](std::ostream& os) {
      os << "d,i,phi_bar,leading_order\n";
      for (const auto& r : rows)
        os << r.d << ',' << r.i << ',' << format_double(r.phi_bar) << ',' << format_double(r.leading_order) << '\n';
    });
    for (std::size_t i = 2; i <= 5; ++i) {
      std::vector<std::pair<double, double>> series;
      for (const auto& r : rows)
        if (r.i == i && r.d >= 16) series.emplace_back(std::log(static_cast<double>(r.d)), std::log(r.phi_bar));
      auto fit = experiment::fit_slope(series, 0.0);
      fit.quantity = "log_phi_bar_vs_log_d";
      fit.eig_index = i;
      fit.predicted = -1;
      fit.rel_err = experiment::relative_error(fit.slope, fit.predicted);
      result.fits.push_back(fit);
    }
    emit_file("fits.csv", [&](std::ostream& os) { experiment::write_fits_csv(os, result.fits); });
  } else {
    // Double precision; a few seconds for the default grid.
    Fig8Options f8;
    f8.seed = opt.seed;
    f8.threads = opt.threads;
    if (opt.replicas) f8.replicas = *opt.replicas;
    if (opt.hops) f8.steps = *opt.hops;
    const auto points = fig8_sweep(f8);
    emit_file("fig8.csv", [&](std::ostream& os) {
      os << "b,p_over_n0,index,estimate,stderr,bound,gap\n";
      for (const auto& p : points)
        os << format_double(p.b) << ',' << format_double(p.p_over_n0) << ',' << p.index << ','
           << format_double(p.estimate) << ',' << format_double(p.std_error) << ',' << format_double(p.bound) << ','
           << format_double(p.bound - p.estimate) << '\n';
    });
    manifest["replicas"] = f8.replicas;
    manifest["steps"] = f8.steps;
  }

  manifest["seed"] = opt.seed;
  std::vector<std::string> outputs;
  for (const auto& f : result.files) outputs.push_back(f.filename().string());
  manifest["outputs"] = outputs;
  manifest["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit_file("manifest.json", [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
  return result;
}

}  // namespace afrelay::recipes
