#include "rfmap/powermap.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

#include "rfmap/errors.hpp"
#include "rfmap/rng.hpp"

namespace rfmap {

// ---------------------------------------------------------------- records

PeriodogramRecord record_from_json(const nlohmann::json& j, const LocalProjection& proj) {
  PeriodogramRecord r;
  r.sensor_id = j.at("sensor_id").get<std::string>();
  r.timestamp = j.at("timestamp").get<double>();
  r.geo = {j.at("lat").get<double>(), j.at("lon").get<double>()};
  r.location = proj.to_local(r.geo);
  r.gain_db = j.value("gain_db", 0.0);
  r.psd = psd_from_json(j);
  if (!std::isfinite(r.timestamp)) throw ConfigError("record timestamp is not finite");
  if (!(r.psd.resolution_hz > 0.0)) throw ConfigError("record bin_hz must be > 0");
  if (r.psd.size() == 0) throw ConfigError("record has an empty psd_dbm_per_hz array");
  return r;
}

nlohmann::json to_json(const PeriodogramRecord& r) {
  return {{"sensor_id", r.sensor_id},
          {"timestamp", r.timestamp},
          {"lat", r.geo.lat},
          {"lon", r.geo.lon},
          {"f_start_hz", r.psd.freqs_hz.empty() ? 0.0 : r.psd.freqs_hz.front()},
          {"bin_hz", r.psd.resolution_hz},
          {"psd_dbm_per_hz", r.psd.values_dbm_per_hz},
          {"gain_db", r.gain_db}};
}

RecordReadResult read_records_jsonl(const std::filesystem::path& path,
                                    const LocalProjection& proj) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open records file " + path.string());
  RecordReadResult out;
  std::string line;
  while (std::getline(in, line)) {
    ++out.lines;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.records.push_back(record_from_json(nlohmann::json::parse(line), proj));
    } catch (const std::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(out.lines) + ": " + e.what());
    }
  }
  return out;
}

void write_records_jsonl(const std::filesystem::path& path,
                         std::span<const PeriodogramRecord> records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

// ---------------------------------------------------------------- query

void QuerySpec::validate() const {
  region.validate();
  if (!(f_hi_hz > f_lo_hz)) throw ContractViolation("query band needs f_hi > f_lo");
  if (!(t_end >= t_start)) throw ContractViolation("query window needs t_end >= t_start");
  if (grid_nx < 2 || grid_ny < 2) throw ContractViolation("query grid needs >= 2 nodes per axis");
}

nlohmann::json to_json(const QuerySpec& q) {
  return {{"f_lo_hz", q.f_lo_hz},
          {"f_hi_hz", q.f_hi_hz},
          {"t_start", q.t_start},
          {"t_end", q.t_end},
          {"region", {q.region.x_min, q.region.x_max, q.region.y_min, q.region.y_max}},
          {"grid", {q.grid_nx, q.grid_ny}}};
}

QuerySpec query_from_json(const nlohmann::json& j) {
  QuerySpec q;
  q.f_lo_hz = j.at("f_lo_hz").get<double>();
  q.f_hi_hz = j.at("f_hi_hz").get<double>();
  q.t_start = j.at("t_start").get<double>();
  q.t_end = j.at("t_end").get<double>();
  const auto& r = j.at("region");
  q.region = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(),
              r.at(3).get<double>()};
  q.grid_nx = j.at("grid").at(0).get<std::size_t>();
  q.grid_ny = j.at("grid").at(1).get<std::size_t>();
  q.validate();
  return q;
}

// ---------------------------------------------------------------- fusion

FusionMode parse_fusion_mode(std::string_view name) {
  if (name == "mean") return FusionMode::kMean;
  if (name == "median") return FusionMode::kMedian;
  if (name == "max") return FusionMode::kMax;
  throw ContractViolation("unknown fusion mode '" + std::string(name) + "'");
}

namespace {

struct Reading {
  Point loc;
  double z_dbm;
};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

double combine(std::vector<double> zs, FusionMode mode) {
  std::sort(zs.begin(), zs.end());
  if (zs.size() == 1) return zs.front();
  switch (mode) {
    case FusionMode::kMax: return zs.back();
    case FusionMode::kMedian: {
      const std::size_t m = zs.size() / 2;
      if (zs.size() % 2 == 1) return zs[m];
      return mw_to_dbm(0.5 * (dbm_to_mw(zs[m - 1]) + dbm_to_mw(zs[m])));
    }
    case FusionMode::kMean: break;
  }
  double sum = 0.0;
  for (double z : zs) sum += dbm_to_mw(z);
  return mw_to_dbm(sum / static_cast<double>(zs.size()));
}

}  // namespace

FusionResult fuse_records(std::span<const PeriodogramRecord> records, const QuerySpec& query,
                          const FusionOptions& opts) {
  query.validate();
  if (!(opts.merge_radius_km >= 0.0)) throw ContractViolation("merge radius must be >= 0");

  FusionResult out;
  std::vector<Reading> readings;
  for (const auto& r : records) {
    if (!(r.timestamp >= query.t_start && r.timestamp <= query.t_end)) {
      ++out.dropped_time;
      continue;
    }
    if (!query.region.contains(r.location)) {
      ++out.dropped_region;
      continue;
    }
    try {
      readings.push_back({r.location, band_power_dbm(r.psd, query.f_lo_hz, query.f_hi_hz)});
    } catch (const EmptyInput&) {
      ++out.dropped_band;
    }
  }
  out.used = readings.size();
  if (readings.empty()) {
    throw EmptyInput("no record overlaps the query band, window and region (" +
                     std::to_string(records.size()) + " records read)");
  }

  std::sort(readings.begin(), readings.end(), [](const Reading& a, const Reading& b) {
    if (a.loc != b.loc) return a.loc < b.loc;
    return a.z_dbm < b.z_dbm;
  });

  // Sorted by x, so candidates for i are the run with x within the radius.
  const double r = opts.merge_radius_km;
  DisjointSets sets(readings.size());
  for (std::size_t i = 0; i < readings.size(); ++i) {
    for (std::size_t j = i + 1; j < readings.size(); ++j) {
      if (readings[j].loc.x - readings[i].loc.x > r) break;
      if (distance(readings[i].loc, readings[j].loc) <= r) sets.unite(i, j);
    }
  }

  // Roots are the smallest member index, so clusters come out in sorted order.
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> slot(readings.size(), static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < readings.size(); ++i) {
    const std::size_t root = sets.find(i);
    if (slot[root] == static_cast<std::size_t>(-1)) {
      slot[root] = clusters.size();
      clusters.emplace_back();
    }
    clusters[slot[root]].push_back(i);
  }

  for (const auto& members : clusters) {
    std::vector<double> zs;
    double sx = 0.0, sy = 0.0;
    for (std::size_t i : members) {
      zs.push_back(readings[i].z_dbm);
      sx += readings[i].loc.x;
      sy += readings[i].loc.y;
    }
    const double n = static_cast<double>(members.size());
    const Point loc = members.size() == 1 ? readings[members.front()].loc : Point{sx / n, sy / n};
    out.sites.push_back({loc.x, loc.y, combine(std::move(zs), opts.mode)});
  }
  std::sort(out.sites.begin(), out.sites.end(),
            [](const Site& a, const Site& b) { return a.point() < b.point(); });
  return out;
}

// ---------------------------------------------------------------- maps

PowerMap build_map(std::span<const Site> sites, const QuerySpec& query, HullFill fill) {
  query.validate();
  const Triangulation tri = triangulate(sites);
  PowerMap map;
  map.grid = tri.interpolate_grid(query.grid(), fill);
  map.query = query;
  map.sites.assign(sites.begin(), sites.end());
  map.method = "delaunay-planar";
  return map;
}

MseResult mse(const PowerMap& a, const PowerMap& b) {
  if (!(a.grid.spec == b.grid.spec)) throw ContractViolation("maps are on different grids");
  MseResult r;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.grid.values.size(); ++i) {
    if (!a.grid.mask[i] || !b.grid.mask[i]) continue;
    const double d = a.grid.values[i] - b.grid.values[i];
    sum += d * d;
    ++r.nodes;
  }
  if (r.nodes == 0) throw EmptyInput("maps share no valid node");
  r.mse = sum / static_cast<double>(r.nodes);
  return r;
}

PowerMap truth_map(const SourceField& field, const PathLossModel& model,
                   const QuerySpec& query, const ReceiveOptions& rx) {
  query.validate();
  const GridSpec grid = query.grid();
  PowerMap map;
  map.query = query;
  map.method = "truth";
  map.grid.spec = grid;
  map.grid.values.resize(grid.size());
  map.grid.mask.assign(grid.size(), 1);
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      map.grid.values[iy * grid.nx + ix] = received_power_dbm(field, model, grid.node(ix, iy), rx);
    }
  }
  return map;
}

// ---------------------------------------------------------------- scenario

ReceiveOptions ScenarioConfig::receive_options() const {
  ReceiveOptions rx;
  if (noise_floor) rx.noise_floor_dbm = thermal_noise_floor_dbm(query.bandwidth_hz());
  return rx;
}

void ScenarioConfig::validate() const {
  region.validate();
  if (!(lambda_t >= 0.0) || !(lambda_s >= 0.0)) {
    throw ContractViolation("intensities must be >= 0");
  }
  if (!std::isfinite(tx_power_dbm)) throw ContractViolation("tx power must be finite");
  path.validate();
  shadowing.validate();
  query.validate();
  if (!(query.region == region)) throw ContractViolation("query region must match scenario region");
}

std::vector<PeriodogramRecord> sensor_records(const PointSet& sensors,
                                              std::span<const double> readings_dbm,
                                              const QuerySpec& query,
                                              const LocalProjection& proj) {
  if (readings_dbm.size() != sensors.size()) {
    throw ContractViolation("one reading per sensor required");
  }
  const double bw = query.bandwidth_hz();
  const double center = 0.5 * (query.f_lo_hz + query.f_hi_hz);
  std::vector<PeriodogramRecord> out;
  out.reserve(sensors.size());
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    PeriodogramRecord r;
    r.sensor_id = "sim-" + std::to_string(i);
    r.timestamp = query.t_start;
    r.geo = proj.to_geo(sensors.points[i]);
    r.location = proj.to_local(r.geo);
    r.psd.resolution_hz = bw;
    r.psd.freqs_hz = {center};
    r.psd.values_dbm_per_hz = {std::max(kPsdFloorDbmPerHz, readings_dbm[i] - 10.0 * std::log10(bw))};
    out.push_back(std::move(r));
  }
  return out;
}

ScenarioResult simulate_scenario(const ScenarioConfig& config) {
  config.validate();
  ScenarioResult res;
  res.seed = config.seed;
  res.sources = sample_ppp(config.region, config.lambda_t, derive_seed(config.seed, "sources"));
  res.sensors = sample_ppp(config.region, config.lambda_s, derive_seed(config.seed, "sensors"));

  const SourceField field{res.sources, config.tx_power_dbm};
  const ReceiveOptions rx = config.receive_options();
  res.truth = truth_map(field, config.path, config.query, rx);
  res.truth.seed = config.seed;

  if (res.sensors.size() < 3) {
    throw DegenerateInput("scenario drew " + std::to_string(res.sensors.size()) +
                              " sensors; at least 3 are needed",
                          res.sensors.size());
  }

  std::vector<double> readings(res.sensors.size());
  for (std::size_t i = 0; i < res.sensors.size(); ++i) {
    const Point p = res.sensors.points[i];
    readings[i] = config.shadowing.enabled
                      ? received_power_dbm(field, config.path, config.shadowing, p,
                                           derive_seed(config.seed, "shadowing", i), rx)
                      : received_power_dbm(field, config.path, p, rx);
  }

  res.records = sensor_records(res.sensors, readings, config.query, config.projection());
  res.triples = fuse_records(res.records, config.query, config.fusion).sites;
  res.reconstruction = build_map(res.triples, config.query);
  res.reconstruction.seed = config.seed;
  res.error = mse(res.reconstruction, res.truth);
  return res;
}

std::vector<EnsembleEntry> run_ensemble(const ScenarioConfig& base, std::size_t n_seeds,
                                        std::size_t jobs) {
  std::vector<EnsembleEntry> entries(n_seeds);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n_seeds; i = next++) {
      ScenarioConfig cfg = base;
      cfg.seed = base.seed + i;
      EnsembleEntry& e = entries[i];
      e.seed = cfg.seed;
      try {
        const auto res = simulate_scenario(cfg);
        e.error = res.error;
        e.sensors = res.sensors.size();
      } catch (const DegenerateInput& ex) {
        e.sensors = ex.count();
        e.failure = ex.what();
      }
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, n_seeds));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return entries;
}

double ensemble_mean_mse(std::span<const EnsembleEntry> entries) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& e : entries) {
    if (!e.error) continue;
    sum += e.error->mse;
    ++n;
  }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

// ---------------------------------------------------------------- output

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_map_csv(const std::filesystem::path& path, const PowerMap& map) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const auto& g = map.grid;
  for (std::size_t iy = 0; iy < g.spec.ny; ++iy) {
    for (std::size_t ix = 0; ix < g.spec.nx; ++ix) {
      if (ix) out << ',';
      out << (g.valid(ix, iy) ? format_double(g.at(ix, iy)) : std::string("nan"));
    }
    out << '\n';
  }
}

nlohmann::json map_sidecar(const PowerMap& map) {
  const auto& g = map.grid;
  nlohmann::json xs = nlohmann::json::array(), ys = nlohmann::json::array();
  for (std::size_t ix = 0; ix < g.spec.nx; ++ix) xs.push_back(g.spec.node_x(ix));
  for (std::size_t iy = 0; iy < g.spec.ny; ++iy) ys.push_back(g.spec.node_y(iy));
  nlohmann::json masked = nlohmann::json::array();
  for (std::size_t iy = 0; iy < g.spec.ny; ++iy) {
    for (std::size_t ix = 0; ix < g.spec.nx; ++ix) {
      if (!g.valid(ix, iy)) masked.push_back({ix, iy});
    }
  }
  nlohmann::json sites = nlohmann::json::array();
  for (const auto& s : map.sites) sites.push_back({s.x, s.y, s.z_dbm});
  nlohmann::json j = {{"method", map.method},
                      {"query", to_json(map.query)},
                      {"seed", nullptr},
                      {"units", {{"coordinates", "km"}, {"values", "dBm"}}},
                      {"rows", "y ascending from y_min"},
                      {"x_nodes", std::move(xs)},
                      {"y_nodes", std::move(ys)},
                      {"valid_nodes", g.valid_count()},
                      {"masked_nodes", std::move(masked)},
                      {"sites", std::move(sites)}};
  if (map.seed) j["seed"] = *map.seed;
  return j;
}

void write_map_pgm(const std::filesystem::path& path, const PowerMap& map) {
  const auto& g = map.grid;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    if (!g.mask[i]) continue;
    lo = std::min(lo, g.values[i]);
    hi = std::max(hi, g.values[i]);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << g.spec.nx << ' ' << g.spec.ny << "\n255\n";
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t r = 0; r < g.spec.ny; ++r) {
    const std::size_t iy = g.spec.ny - 1 - r;
    for (std::size_t ix = 0; ix < g.spec.nx; ++ix) {
      unsigned char px = 0;
      if (g.valid(ix, iy)) {
        px = static_cast<unsigned char>(1.0 + std::round(254.0 * (g.at(ix, iy) - lo) / span));
      }
      out.put(static_cast<char>(px));
    }
  }
}

}  // namespace rfmap
