#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "rfmap/errors.hpp"
#include "rfmap/rng.hpp"

namespace rfmap::cli {

namespace {

class Reader {
 public:
  Reader(std::string_view text, std::string_view origin) : text_(text), origin_(origin) {}

  [[noreturn]] void fail(std::string_view key, const std::string& msg) const {
    throw ConfigError(where(key) + msg);
  }

  std::string where(std::string_view key) const {
    const std::string needle = "\"" + std::string(key) + "\"";
    const auto pos = text_.find(needle);
    if (pos == std::string_view::npos) return std::string(origin_) + ": ";
    const auto line = 1 + std::count(text_.begin(), text_.begin() + static_cast<long>(pos), '\n');
    return std::string(origin_) + ":" + std::to_string(line) + ": ";
  }

  void reject_unknown(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                      std::string_view scope) const {
    if (!obj.is_object()) fail(scope, "'" + std::string(scope) + "' must be an object");
    for (const auto& [k, v] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        fail(k, "unknown key '" + k + "' in " + std::string(scope));
      }
    }
  }

  const nlohmann::json& require(const nlohmann::json& obj, std::string_view key) const {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) {
      throw ConfigError(std::string(origin_) + ": missing required field '" + std::string(key) + "'");
    }
    return *it;
  }

  template <class T>
  T get(const nlohmann::json& v, std::string_view key) const {
    try {
      return v.get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(key, "field '" + std::string(key) + "' has the wrong type");
    }
  }

  template <class T>
  T number(const nlohmann::json& obj, std::string_view key) const {
    const auto& v = require(obj, key);
    if (!v.is_number()) fail(key, "field '" + std::string(key) + "' must be a number");
    return get<T>(v, key);
  }

  template <class T>
  T number_or(const nlohmann::json& obj, std::string_view key, T fallback) const {
    return obj.contains(std::string(key)) ? number<T>(obj, key) : fallback;
  }

  std::vector<double> numbers(const nlohmann::json& obj, std::string_view key, std::size_t n) const {
    const auto& v = require(obj, key);
    if (!v.is_array() || v.size() != n) {
      fail(key, "field '" + std::string(key) + "' must be an array of " + std::to_string(n) + " numbers");
    }
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(key, "field '" + std::string(key) + "' must contain numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

 private:
  std::string_view text_;
  std::string_view origin_;
};

}  // namespace

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

LoadedConfig parse_scenario_config(std::string_view text, std::string_view origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.what() carries "line L, column C".
    throw ConfigError(std::string(origin) + ": " + e.what());
  }
  const Reader rd(text, origin);
  rd.reject_unknown(j,
                    {"region", "lambda_t", "lambda_s", "tx_power_dbm", "path", "shadowing",
                     "grid", "band_hz", "time", "noise_floor", "geo_origin", "merge_radius_km",
                     "seed", "output_dir"},
                    "config");

  LoadedConfig out;
  ScenarioConfig& c = out.scenario;
  const auto r = rd.numbers(j, "region", 4);
  c.region = {r[0], r[1], r[2], r[3]};
  if (!c.region.valid()) rd.fail("region", "region must satisfy x_min < x_max and y_min < y_max");
  c.lambda_t = rd.number<double>(j, "lambda_t");
  c.lambda_s = rd.number<double>(j, "lambda_s");
  if (c.lambda_t < 0.0) rd.fail("lambda_t", "lambda_t must be >= 0");
  if (c.lambda_s < 0.0) rd.fail("lambda_s", "lambda_s must be >= 0");
  c.tx_power_dbm = rd.number<double>(j, "tx_power_dbm");

  const auto& p = rd.require(j, "path");
  rd.reject_unknown(p, {"alpha", "f_hz", "k", "r0_m"}, "path");
  const double alpha = rd.number<double>(p, "alpha");
  if (!(alpha > 0.0)) rd.fail("alpha", "alpha must be > 0");
  std::optional<double> r0;
  if (p.contains("r0_m")) r0 = rd.number<double>(p, "r0_m");
  if (p.contains("k")) {
    c.path = PathLossModel{};
    c.path.alpha = alpha;
    c.path.k = rd.number<double>(p, "k");
    c.path.r0_m = r0;
    if (p.contains("f_hz")) c.path.f_hz = rd.number<double>(p, "f_hz");
  } else if (p.contains("f_hz")) {
    const double f = rd.number<double>(p, "f_hz");
    if (!(f > 0.0)) rd.fail("f_hz", "f_hz must be > 0");
    c.path = PathLossModel::free_space(f, alpha, r0);
  } else {
    rd.fail("path", "path needs either 'f_hz' or 'k'");
  }

  if (j.contains("shadowing")) {
    const auto& s = j.at("shadowing");
    rd.reject_unknown(s, {"enabled", "mu_db", "sigma_db"}, "shadowing");
    c.shadowing.enabled = s.contains("enabled") ? rd.get<bool>(s.at("enabled"), "enabled") : false;
    c.shadowing.mu_db = rd.number_or<double>(s, "mu_db", 0.0);
    c.shadowing.sigma_db = rd.number_or<double>(s, "sigma_db", 0.0);
  }

  c.query.region = c.region;
  if (j.contains("grid")) {
    const auto g = rd.numbers(j, "grid", 2);
    if (g[0] < 2 || g[1] < 2) rd.fail("grid", "grid dimensions must be >= 2");
    c.query.grid_nx = static_cast<std::size_t>(g[0]);
    c.query.grid_ny = static_cast<std::size_t>(g[1]);
  }
  if (j.contains("band_hz")) {
    const auto b = rd.numbers(j, "band_hz", 2);
    if (!(b[1] > b[0])) rd.fail("band_hz", "band_hz must satisfy f_lo < f_hi");
    c.query.f_lo_hz = b[0];
    c.query.f_hi_hz = b[1];
  }
  if (j.contains("time")) {
    const auto t = rd.numbers(j, "time", 2);
    if (!(t[1] >= t[0])) rd.fail("time", "time must satisfy t_start <= t_end");
    c.query.t_start = t[0];
    c.query.t_end = t[1];
  }
  if (j.contains("noise_floor")) c.noise_floor = rd.get<bool>(j.at("noise_floor"), "noise_floor");
  if (j.contains("geo_origin")) {
    const auto g = rd.numbers(j, "geo_origin", 2);
    c.geo_origin = {g[0], g[1]};
  }
  c.fusion.merge_radius_km = rd.number_or<double>(j, "merge_radius_km", 0.001);
  const auto& seed = rd.require(j, "seed");
  if (!seed.is_number_unsigned()) rd.fail("seed", "seed must be a non-negative integer");
  c.seed = seed.get<std::uint64_t>();
  if (j.contains("output_dir")) out.output_dir = rd.get<std::string>(j.at("output_dir"), "output_dir");

  try {
    c.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string(origin) + ": " + e.what());
  }
  out.hash = fnv1a64(j.dump());
  return out;
}

LoadedConfig load_scenario_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_config(ss.str(), path.string());
}

nlohmann::json to_json(const ScenarioConfig& c) {
  nlohmann::json path = {{"alpha", c.path.alpha}, {"k", c.path.k}};
  if (c.path.f_hz) path["f_hz"] = *c.path.f_hz;
  if (c.path.r0_m) path["r0_m"] = *c.path.r0_m;
  return {{"region", {c.region.x_min, c.region.x_max, c.region.y_min, c.region.y_max}},
          {"lambda_t", c.lambda_t},
          {"lambda_s", c.lambda_s},
          {"tx_power_dbm", c.tx_power_dbm},
          {"path", path},
          {"shadowing",
           {{"enabled", c.shadowing.enabled},
            {"mu_db", c.shadowing.mu_db},
            {"sigma_db", c.shadowing.sigma_db}}},
          {"grid", {c.query.grid_nx, c.query.grid_ny}},
          {"band_hz", {c.query.f_lo_hz, c.query.f_hi_hz}},
          {"time", {c.query.t_start, c.query.t_end}},
          {"noise_floor", c.noise_floor},
          {"geo_origin", {c.geo_origin.lat, c.geo_origin.lon}},
          {"merge_radius_km", c.fusion.merge_radius_km},
          {"seed", c.seed}};
}

nlohmann::json to_json(const MapQueryFile& q) {
  return {{"query", rfmap::to_json(q.query)},
          {"geo_origin", {q.geo_origin.lat, q.geo_origin.lon}},
          {"merge_radius_km", q.merge_radius_km}};
}

MapQueryFile map_query_from_json(const nlohmann::json& j) {
  MapQueryFile q;
  q.query = query_from_json(j.at("query"));
  if (j.contains("geo_origin")) {
    q.geo_origin = {j.at("geo_origin").at(0).get<double>(), j.at("geo_origin").at(1).get<double>()};
  }
  q.merge_radius_km = j.value("merge_radius_km", 0.001);
  return q;
}

}  // namespace rfmap::cli
