#pragma once

#include "afrelay/network.hpp"

#include "json.hpp"

#include <string>
#include <utility>

namespace afrelay::config {

using json = nlohmann::json;
using network::NetworkConfig;

/// Parses the JSON form of NetworkConfig. Keys: d, n, gain, mu_schedule,
/// power_schedule, n0, p0, seed, precision. Missing keys keep their defaults;
/// unknown keys and malformed values raise ConfigError with the key path.
NetworkConfig from_json(const json& j, NetworkConfig base = {});

json to_json(const NetworkConfig& cfg);

NetworkConfig load_file(const std::string& path);

/// "a,b" -> (a, b). `field` names the flag in error messages.
std::pair<double, double> parse_pair(const std::string& text, const std::string& field);

}  // namespace afrelay::config
