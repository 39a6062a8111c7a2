#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "rfmap/powermap.hpp"

namespace rfmap::cli {

// Scenario configuration file (JSON). Required keys: region, lambda_t,
// lambda_s, tx_power_dbm, path, seed. Everything else has a default:
//
//   {
//     "region": [0, 1, 0, 1],              km: x_min, x_max, y_min, y_max
//     "lambda_t": 3, "lambda_s": 94,       points per km^2
//     "tx_power_dbm": 30,
//     "path": {"alpha": 3, "f_hz": 1e9},   or {"alpha": 3, "k": ...}; "r0_m" optional
//     "shadowing": {"enabled": false, "mu_db": 0, "sigma_db": 4},
//     "grid": [100, 100],
//     "band_hz": [995e6, 1005e6],
//     "time": [0, 0],
//     "noise_floor": true,
//     "geo_origin": [0, 0],                lat, lon of the region centroid
//     "merge_radius_km": 0.001,
//     "seed": 1,
//     "output_dir": "out"
//   }
//
// Unknown keys are rejected. Errors are ConfigError with "file:line:" where
// the offending key can be located.
struct LoadedConfig {
  ScenarioConfig scenario;
  std::filesystem::path output_dir = "out";
  std::uint64_t hash = 0;  // FNV-1a of the canonical JSON dump
};

LoadedConfig load_scenario_config(const std::filesystem::path& path);
LoadedConfig parse_scenario_config(std::string_view text, std::string_view origin = "config");

nlohmann::json to_json(const ScenarioConfig& cfg);

// Side file written next to simulated records so `map` can rebuild the same
// grid: {"query": {...}, "geo_origin": [lat, lon], "merge_radius_km": r}.
struct MapQueryFile {
  QuerySpec query;
  LatLon geo_origin;
  double merge_radius_km = 0.001;
};

nlohmann::json to_json(const MapQueryFile& q);
MapQueryFile map_query_from_json(const nlohmann::json& j);

std::string hex64(std::uint64_t v);

}  // namespace rfmap::cli
