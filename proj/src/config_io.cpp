#include "afrelay/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace afrelay::config {

namespace {

double number_at(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  return j.get<double>();
}

std::size_t count_at(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 1) throw ConfigError(field, "expected a positive integer");
  return j.get<std::size_t>();
}

std::vector<double> numbers_at(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number_at(j[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

// {"kind": value} with exactly one key.
std::pair<std::string, json> single_key(const json& j, const std::string& field) {
  if (!j.is_object() || j.size() != 1) throw ConfigError(field, "expected an object with exactly one key");
  return {j.begin().key(), j.begin().value()};
}

network::MuSchedule mu_from_json(const json& j) {
  const std::string f = "mu_schedule";
  auto [kind, v] = single_key(j, f);
  if (kind == "constant") return network::MuConstant{number_at(v, f + ".constant")};
  if (kind == "list") return network::MuList{numbers_at(v, f + ".list")};
  if (kind == "lognormal") {
    auto ab = numbers_at(v, f + ".lognormal");
    if (ab.size() != 2) throw ConfigError(f + ".lognormal", "expected [a, b]");
    return network::MuLognormal{ab[0], ab[1]};
  }
  throw ConfigError(f, "unknown schedule '" + kind + "' (constant|list|lognormal)");
}

network::PowerSchedule power_from_json(const json& j) {
  const std::string f = "power_schedule";
  auto [kind, v] = single_key(j, f);
  if (kind == "constant") return network::PowerConstant{number_at(v, f + ".constant")};
  if (kind == "list") return network::PowerList{numbers_at(v, f + ".list")};
  if (kind == "geometric") {
    auto pg = numbers_at(v, f + ".geometric");
    if (pg.size() != 2) throw ConfigError(f + ".geometric", "expected [p0, g]");
    return network::PowerGeometric{pg[0], pg[1]};
  }
  throw ConfigError(f, "unknown schedule '" + kind + "' (constant|geometric|list)");
}

}  // namespace

NetworkConfig from_json(const json& j, NetworkConfig cfg) {
  if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");
  static const std::set<std::string> known = {"d",  "n",  "gain", "mu_schedule", "power_schedule",
                                              "n0", "p0", "seed", "precision"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError(key, "unknown configuration key");

  if (j.contains("d")) cfg.d = count_at(j["d"], "d");
  if (j.contains("n")) cfg.n = count_at(j["n"], "n");
  if (j.contains("gain")) {
    if (!j["gain"].is_string()) throw ConfigError("gain", "expected \"fixed\" or \"variable\"");
    cfg.gain = network::parse_gain(j["gain"].get<std::string>());
  }
  if (j.contains("mu_schedule")) cfg.mu = mu_from_json(j["mu_schedule"]);
  if (j.contains("power_schedule")) cfg.power = power_from_json(j["power_schedule"]);
  if (j.contains("n0")) cfg.n0 = number_at(j["n0"], "n0");
  if (j.contains("p0")) cfg.p0 = number_at(j["p0"], "p0");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("precision")) {
    if (!j["precision"].is_string()) throw ConfigError("precision", "expected \"double\" or \"big:<digits>\"");
    try {
      cfg.precision = numerics::PrecisionConfig::parse(j["precision"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError("precision", e.what());
    }
  }
  return cfg;
}

json to_json(const NetworkConfig& cfg) {
  json j;
  j["d"] = cfg.d;
  j["n"] = cfg.n;
  j["gain"] = network::to_string(cfg.gain);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, network::MuConstant>)
          j["mu_schedule"] = {{"constant", s.value}};
        else if constexpr (std::is_same_v<T, network::MuList>)
          j["mu_schedule"] = {{"list", s.values}};
        else
          j["mu_schedule"] = {{"lognormal", {s.a, s.b}}};
      },
      cfg.mu);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, network::PowerConstant>)
          j["power_schedule"] = {{"constant", s.value}};
        else if constexpr (std::is_same_v<T, network::PowerGeometric>)
          j["power_schedule"] = {{"geometric", {s.p0, s.growth}}};
        else
          j["power_schedule"] = {{"list", s.values}};
      },
      cfg.power);
  j["n0"] = cfg.n0;
  j["p0"] = cfg.p0;
  j["seed"] = cfg.seed;
  j["precision"] = cfg.precision.to_string();
  return j;
}

NetworkConfig load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  // A run manifest carries the configuration under "config".
  if (j.is_object() && j.contains("config") && j.contains("replicas")) return from_json(j["config"]);
  return from_json(j);
}

std::pair<double, double> parse_pair(const std::string& text, const std::string& field) {
  std::istringstream in(text);
  double a = 0, b = 0;
  char comma = 0;
  if (!(in >> a >> comma >> b) || comma != ',' || !(in >> std::ws).eof())
    throw ConfigError(field, "expected two comma-separated numbers, got '" + text + "'");
  return {a, b};
}

}  // namespace afrelay::config
