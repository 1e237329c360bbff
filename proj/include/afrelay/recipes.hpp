#pragma once

#include "afrelay/experiment.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace afrelay::recipes {

struct ReproduceOptions {
  std::filesystem::path output_dir = ".";
  std::uint64_t seed = 1;
  std::optional<std::size_t> replicas;
  std::optional<std::size_t> hops;
  std::optional<numerics::PrecisionConfig> precision;
  std::size_t threads = 0;
};

struct ReproduceResult {
  std::vector<std::filesystem::path> files;
  std::vector<experiment::SlopeFit> fits;
};

/// Figure ids accepted by reproduce().
const std::vector<std::string>& figure_ids();

/// Caption parameters for the simulated figures fig2..fig6:
/// p_i = n0 = mu_i = 1, 60 hops, 4 replicas, 100 digits.
/// fig2/fig3: d = 4 fixed gain. fig4..fig6: d = 3 variable gain.
network::NetworkConfig figure_config(const std::string& figure, const ReproduceOptions& opt);
std::size_t figure_replicas(const ReproduceOptions& opt);

struct Fig8Point {
  double b = 0;
  double p_over_n0 = 0;
  std::size_t index = 0;
  double estimate = 0;
  double std_error = 0;
  double bound = 0;
};

struct Fig8Options {
  std::vector<double> b_values = {1, 2, 3};
  std::vector<double> p_over_n0 = {1e0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
  std::size_t d = 3;
  std::size_t steps = 1000;
  std::size_t replicas = 4;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
};

/// Estimated lambda_vH,i against the variable-gain upper bound for
/// log-normal mu and constant power.
std::vector<Fig8Point> fig8_sweep(const Fig8Options& opt);

struct PhiBarRow {
  std::size_t d = 0;
  std::size_t i = 0;
  double phi_bar = 0;        // H_{d-1} - H_{d-i}
  double leading_order = 0;  // (i-1)/d
};

std::vector<PhiBarRow> fig7_table(std::size_t max_d = 256, std::size_t max_i = 5);

/// Writes the figure's CSVs and fits.csv into opt.output_dir.
ReproduceResult reproduce(const std::string& figure, const ReproduceOptions& opt);

}  // namespace afrelay::recipes
