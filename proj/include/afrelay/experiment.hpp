#pragma once

#include "afrelay/network.hpp"
#include "afrelay/rds.hpp"
#include "afrelay/scaling.hpp"

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace afrelay::experiment {

using network::NetworkConfig;
using network::TrajectoryRecord;

enum class Emit { trajectory, exponents, bounds, nu, slopes };

std::string to_string(Emit e);
Emit parse_emit(const std::string& s);

struct ExperimentSpec {
  NetworkConfig config;
  std::size_t replicas = 1;
  std::set<Emit> emit = {Emit::trajectory, Emit::exponents, Emit::slopes};
  std::filesystem::path output_dir = ".";
  double burn_in = 0.2;
  std::size_t threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct SlopeFit {
  std::string quantity;
  std::size_t eig_index = 0;
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  double predicted = 0;
  double rel_err = 0;
  std::size_t points = 0;
};

/// OLS of value on n after dropping points with n <= burn_in * max n.
/// Needs at least 10 remaining points.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& series, double burn_in = 0.2);

/// |slope - predicted| / |predicted|, or the absolute difference when the
/// prediction is exactly zero.
double relative_error(double slope, double predicted);

struct ReplicaRun {
  std::size_t replica = 0;
  std::uint64_t seed = 0;
  std::vector<TrajectoryRecord> records;
};

/// Replica r runs cfg with seed cfg.seed + r. Results are ordered by replica
/// regardless of which worker finished first.
std::vector<ReplicaRun> run_replicas(const NetworkConfig& cfg, std::size_t replicas, std::size_t threads = 0);

/// Runs `count` independent jobs on up to `threads` workers.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& job);

enum class Series { log_capacity, log_nu, log_power_X, log_power_I };

/// Pooled (hop, value) points across replicas. `index` is the eigenchannel
/// (1-based) for capacities and the second channel j of nu_{1,j}.
std::vector<std::pair<double, double>> pooled_series(const std::vector<ReplicaRun>& runs, Series s,
                                                     std::size_t index = 1);

/// Slope fits for every series the runs support, with predictions from `exponents`.
std::vector<SlopeFit> standard_fits(const std::vector<ReplicaRun>& runs, const scaling::ExponentReport& exponents,
                                    double burn_in);

void write_trajectory_csv(std::ostream& os, const std::vector<ReplicaRun>& runs);
void write_exponents_csv(std::ostream& os, const scaling::ExponentReport& report);
/// Estimated spectrum rows (method qr-estimate) in the exponents.csv schema.
void write_spectrum_rows(std::ostream& os, const rds::LyapunovSpectrum& spectrum);
void write_fits_csv(std::ostream& os, const std::vector<SlopeFit>& fits);
void write_nu_csv(std::ostream& os, const std::vector<ReplicaRun>& runs);
void write_bounds_csv(std::ostream& os, const NetworkConfig& cfg, const scaling::ExponentReport& report);

inline constexpr const char* kTrajectoryHeader = "replica,hop,eig_index,log_snr,capacity_nats,log_power_X,log_power_I";
inline constexpr const char* kExponentsHeader = "index,lambda_H,lambda_Q,lambda_gamma,method,stderr";
inline constexpr const char* kFitsHeader = "quantity,eig_index,slope,predicted,rel_err,r2";

/// Shortest round-trip decimal form.
std::string format_double(double x);

struct RunResult {
  std::vector<std::filesystem::path> files;
  std::vector<SlopeFit> fits;
  scaling::ExponentReport exponents;
  nlohmann::json manifest;
};

/// Writes one CSV per requested emit kind and manifest.json into output_dir.
RunResult run(const ExperimentSpec& spec);

nlohmann::json manifest_json(const ExperimentSpec& spec, double wall_seconds);
ExperimentSpec spec_from_manifest(const nlohmann::json& manifest);

}  // namespace afrelay::experiment
