#include "afrelay/experiment.hpp"

#include "afrelay/config_io.hpp"

#include <boost/version.hpp>
#include <mpfr.h>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

namespace afrelay::experiment {

namespace {

constexpr const char* kVersion = "0.1.0";

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::string to_string(Emit e) {
  switch (e) {
    case Emit::trajectory:
      return "trajectory";
    case Emit::exponents:
      return "exponents";
    case Emit::bounds:
      return "bounds";
    case Emit::nu:
      return "nu";
    case Emit::slopes:
      return "slopes";
  }
  return "unknown";
}

Emit parse_emit(const std::string& s) {
  for (Emit e : {Emit::trajectory, Emit::exponents, Emit::bounds, Emit::nu, Emit::slopes})
    if (to_string(e) == s) return e;
  throw ConfigError("emit", "unknown output kind '" + s + "'");
}

void ExperimentSpec::validate() const {
  config.validate();
  if (replicas < 1) throw ConfigError("replicas", "must be >= 1");
  if (!(burn_in >= 0 && burn_in < 1)) throw ConfigError("burn_in", "must be in [0, 1)");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double relative_error(double slope, double predicted) {
  const double diff = std::abs(slope - predicted);
  return predicted == 0 ? diff : diff / std::abs(predicted);
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& series, double burn_in) {
  if (!(burn_in >= 0 && burn_in < 1)) throw std::invalid_argument("fit_slope: burn_in must be in [0, 1)");
  double max_n = -std::numeric_limits<double>::infinity();
  for (const auto& [n, v] : series) max_n = std::max(max_n, n);
  const double cut = burn_in * max_n;
  double sx = 0, sy = 0;
  std::size_t m = 0;
  for (const auto& [n, v] : series)
    if (n > cut) {
      sx += n;
      sy += v;
      ++m;
    }
  if (m < 10) throw std::invalid_argument("fit_slope: need at least 10 points after burn-in, have " + std::to_string(m));
  const double mx = sx / static_cast<double>(m), my = sy / static_cast<double>(m);
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [n, v] : series)
    if (n > cut) {
      sxx += (n - mx) * (n - mx);
      sxy += (n - mx) * (v - my);
      syy += (v - my) * (v - my);
    }
  if (!(sxx > 0)) throw std::invalid_argument("fit_slope: all points share one abscissa");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = m;
  if (syy == 0) {
    fit.r2 = 1;
  } else {
    fit.r2 = std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  }
  return fit;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          job(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<ReplicaRun> run_replicas(const NetworkConfig& cfg, std::size_t replicas, std::size_t threads) {
  cfg.validate();
  std::optional<numerics::BigFloatPrecision> guard;
  if (cfg.precision.is_big()) guard.emplace(cfg.precision.digits);
  std::vector<ReplicaRun> runs(replicas);
  parallel_for(replicas, threads, [&](std::size_t r) {
    NetworkConfig c = cfg;
    c.seed = numerics::replica_seed(cfg.seed, r);
    runs[r].replica = r;
    runs[r].seed = c.seed;
    runs[r].records = network::simulate(c);
  });
  return runs;
}

std::vector<std::pair<double, double>> pooled_series(const std::vector<ReplicaRun>& runs, Series s,
                                                     std::size_t index) {
  std::vector<std::pair<double, double>> out;
  for (const auto& run : runs)
    for (const auto& rec : run.records) {
      const double n = static_cast<double>(rec.hop);
      switch (s) {
        case Series::log_capacity:
          out.emplace_back(n, rec.log_capacity.at(index - 1));
          break;
        case Series::log_nu:
          out.emplace_back(n, rec.log_capacity.at(0) - rec.log_capacity.at(index - 1));
          break;
        case Series::log_power_X:
          out.emplace_back(n, rec.log_power_X);
          break;
        case Series::log_power_I:
          out.emplace_back(n, rec.log_power_I);
          break;
      }
    }
  return out;
}

std::vector<SlopeFit> standard_fits(const std::vector<ReplicaRun>& runs, const scaling::ExponentReport& exponents,
                                    double burn_in) {
  std::vector<SlopeFit> fits;
  const std::size_t d = exponents.lambda_H.size();
  auto add = [&](const std::string& name, Series s, std::size_t index, double predicted) {
    SlopeFit f = fit_slope(pooled_series(runs, s, index), burn_in);
    f.quantity = name;
    f.eig_index = index;
    f.predicted = predicted;
    f.rel_err = relative_error(f.slope, predicted);
    fits.push_back(f);
  };
  for (std::size_t i = 1; i <= d; ++i) add("log_capacity", Series::log_capacity, i, exponents.lambda_gamma[i - 1]);
  for (std::size_t j = 2; j <= d; ++j) add("log_nu", Series::log_nu, j, scaling::predict_nu_slope(exponents, 1, j));
  add("log_power_X", Series::log_power_X, 1, 2 * exponents.lambda_Q.front());
  add("log_power_I", Series::log_power_I, 1, 2 * exponents.lambda_H.front());
  return fits;
}

void write_trajectory_csv(std::ostream& os, const std::vector<ReplicaRun>& runs) {
  os << kTrajectoryHeader << '\n';
  for (const auto& run : runs)
    for (const auto& rec : run.records)
      for (std::size_t i = 0; i < rec.log_snr.size(); ++i)
        os << run.replica << ',' << rec.hop << ',' << i + 1 << ',' << format_double(rec.log_snr[i]) << ','
           << format_double(rec.capacity[i]) << ',' << format_double(rec.log_power_X) << ','
           << format_double(rec.log_power_I) << '\n';
}

void write_exponents_csv(std::ostream& os, const scaling::ExponentReport& report) {
  os << kExponentsHeader << '\n';
  for (std::size_t i = 0; i < report.lambda_H.size(); ++i)
    os << i + 1 << ',' << format_double(report.lambda_H[i]) << ',' << format_double(report.lambda_Q[i]) << ','
       << format_double(report.lambda_gamma[i]) << ',' << scaling::to_string(report.method) << ','
       << format_double(report.L_stderr / 2) << '\n';
}

void write_spectrum_rows(std::ostream& os, const rds::LyapunovSpectrum& spectrum) {
  for (std::size_t i = 0; i < spectrum.exponents.size(); ++i) {
    const double l = spectrum.exponents[i];
    os << i + 1 << ',' << format_double(l) << ',' << format_double(std::max(0.0, l)) << ','
       << format_double(std::min(0.0, 2 * l)) << ',' << rds::to_string(spectrum.method) << ','
       << format_double(spectrum.std_error[i]) << '\n';
  }
}

void write_fits_csv(std::ostream& os, const std::vector<SlopeFit>& fits) {
  os << kFitsHeader << '\n';
  for (const auto& f : fits)
    os << f.quantity << ',' << f.eig_index << ',' << format_double(f.slope) << ',' << format_double(f.predicted) << ','
       << format_double(f.rel_err) << ',' << format_double(f.r2) << '\n';
}

void write_nu_csv(std::ostream& os, const std::vector<ReplicaRun>& runs) {
  os << "replica,hop,i,j,log_nu\n";
  for (const auto& run : runs)
    for (const auto& rec : run.records)
      for (std::size_t j = 2; j <= rec.log_capacity.size(); ++j)
        os << run.replica << ',' << rec.hop << ",1," << j << ','
           << format_double(rec.log_capacity[0] - rec.log_capacity[j - 1]) << '\n';
}

void write_bounds_csv(std::ostream& os, const NetworkConfig& cfg, const scaling::ExponentReport& report) {
  const auto bounds = scaling::lyap_upper_bounds(cfg);
  const auto growth = scaling::power_growth_bounds(cfg);
  os << "index,gain,rho,upper_bound,lambda_H,power_growth_bound\n";
  const double rho = scaling::growth_rate(cfg);
  const double pg = cfg.gain == network::GainKind::fixed ? growth.fixed : growth.variable;
  for (std::size_t i = 0; i < bounds.size(); ++i)
    os << i + 1 << ',' << network::to_string(cfg.gain) << ',' << format_double(rho) << ','
       << format_double(bounds[i]) << ',' << format_double(report.lambda_H[i]) << ',' << format_double(pg) << '\n';
}

nlohmann::json manifest_json(const ExperimentSpec& spec, double wall_seconds) {
  nlohmann::json m;
  m["config"] = config::to_json(spec.config);
  m["replicas"] = spec.replicas;
  std::vector<std::uint64_t> seeds;
  for (std::size_t r = 0; r < spec.replicas; ++r) seeds.push_back(numerics::replica_seed(spec.config.seed, r));
  m["seeds"] = seeds;
  std::vector<std::string> emit;
  for (Emit e : spec.emit) emit.push_back(to_string(e));
  m["emit"] = emit;
  m["burn_in"] = spec.burn_in;
  m["versions"] = {{"afrelay", kVersion},
                   {"boost", BOOST_LIB_VERSION},
                   {"mpfr", mpfr_get_version()},
                   {"compiler", __VERSION__}};
  m["wall_time_seconds"] = wall_seconds;
  return m;
}

ExperimentSpec spec_from_manifest(const nlohmann::json& m) {
  ExperimentSpec spec;
  if (!m.is_object() || !m.contains("config")) throw ConfigError("manifest", "missing 'config'");
  spec.config = config::from_json(m["config"]);
  if (m.contains("replicas")) {
    if (!m["replicas"].is_number_unsigned()) throw ConfigError("replicas", "expected a positive integer");
    spec.replicas = m["replicas"].get<std::size_t>();
  }
  if (m.contains("emit")) {
    spec.emit.clear();
    for (const auto& e : m["emit"]) spec.emit.insert(parse_emit(e.get<std::string>()));
  }
  if (m.contains("burn_in")) spec.burn_in = m["burn_in"].get<double>();
  return spec;
}

RunResult run(const ExperimentSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(spec.output_dir);
  RunResult result;
  result.exponents = scaling::exponents_closed_form(spec.config);

  const bool need_runs = spec.emit.count(Emit::trajectory) || spec.emit.count(Emit::nu) || spec.emit.count(Emit::slopes);
  std::vector<ReplicaRun> runs;
  if (need_runs) runs = run_replicas(spec.config, spec.replicas, spec.threads);

  auto emit_file = [&](const std::string& name, const std::function<void(std::ostream&)>& write) {
    const auto path = spec.output_dir / name;
    auto out = open_output(path);
    write(out);
    result.files.push_back(path);
  };
  if (spec.emit.count(Emit::trajectory)) emit_file("trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, runs); });
  if (spec.emit.count(Emit::exponents))
    emit_file("exponents.csv", [&](std::ostream& os) { write_exponents_csv(os, result.exponents); });
  if (spec.emit.count(Emit::bounds))
    emit_file("bounds.csv", [&](std::ostream& os) { write_bounds_csv(os, spec.config, result.exponents); });
  if (spec.emit.count(Emit::nu)) emit_file("nu.csv", [&](std::ostream& os) { write_nu_csv(os, runs); });
  if (spec.emit.count(Emit::slopes)) {
    result.fits = standard_fits(runs, result.exponents, spec.burn_in);
    emit_file("fits.csv", [&](std::ostream& os) { write_fits_csv(os, result.fits); });
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.manifest = manifest_json(spec, wall);
  std::vector<std::string> outputs;
  for (const auto& f : result.files) outputs.push_back(f.filename().string());
  result.manifest["outputs"] = outputs;
  emit_file("manifest.json", [&](std::ostream& os) { os << result.manifest.dump(2) << '\n'; });
  return result;
}

}  // namespace afrelay::experiment
