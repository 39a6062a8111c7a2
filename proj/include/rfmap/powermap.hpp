#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfmap/delaunay.hpp"
#include "rfmap/geo.hpp"
#include "rfmap/grid.hpp"
#include "rfmap/periodogram.hpp"
#include "rfmap/pointprocess.hpp"
#include "rfmap/propagation.hpp"

namespace rfmap {

// A periodogram tagged with sensor, time and place: the check-in payload.
struct PeriodogramRecord {
  std::string sensor_id;
  double timestamp = 0.0;  // UTC seconds
  Point location;          // local km
  LatLon geo;              // as received; location = projection(geo)
  Psd psd;
  double gain_db = 0.0;    // metadata; psd is already gain-corrected
};

// One JSON-lines record:
// {"sensor_id", "timestamp", "lat", "lon", "f_start_hz", "bin_hz",
//  "psd_dbm_per_hz", "gain_db"}
PeriodogramRecord record_from_json(const nlohmann::json& j, const LocalProjection& proj);
nlohmann::json to_json(const PeriodogramRecord& r);

struct RecordReadResult {
  std::vector<PeriodogramRecord> records;
  std::size_t lines = 0;
};

// Blank lines are skipped. Malformed lines throw ConfigError naming the line.
RecordReadResult read_records_jsonl(const std::filesystem::path& path,
                                    const LocalProjection& proj);
void write_records_jsonl(const std::filesystem::path& path,
                         std::span<const PeriodogramRecord> records);

struct QuerySpec {
  double f_lo_hz = 995e6;
  double f_hi_hz = 1005e6;
  double t_start = 0.0;
  double t_end = 0.0;
  Region region;
  std::size_t grid_nx = 100;
  std::size_t grid_ny = 100;

  GridSpec grid() const { return {region, grid_nx, grid_ny}; }
  double bandwidth_hz() const { return f_hi_hz - f_lo_hz; }
  void validate() const;  // throws ContractViolation

  friend bool operator==(const QuerySpec&, const QuerySpec&) = default;
};

nlohmann::json to_json(const QuerySpec& q);
QuerySpec query_from_json(const nlohmann::json& j);

enum class FusionMode { kMean, kMedian, kMax };

FusionMode parse_fusion_mode(std::string_view name);

struct FusionOptions {
  double merge_radius_km = 0.001;
  FusionMode mode = FusionMode::kMean;
};

struct FusionResult {
  std::vector<Site> sites;  // sorted by (x, y)
  std::size_t used = 0;
  std::size_t dropped_band = 0;
  std::size_t dropped_time = 0;
  std::size_t dropped_region = 0;

  std::size_t dropped() const { return dropped_band + dropped_time + dropped_region; }
};

// Band power per record, then one site per cluster of records within the
// merge radius (single linkage), combined in linear mW. The result does not
// depend on record order. Throws EmptyInput when no record is usable.
FusionResult fuse_records(std::span<const PeriodogramRecord> records, const QuerySpec& query,
                          const FusionOptions& opts = {});

struct PowerMap {
  GridValues grid;
  QuerySpec query;
  std::vector<Site> sites;
  std::string method;
  std::optional<std::uint64_t> seed;
};

// Delaunay + planar interpolation of dBm values over the query grid.
PowerMap build_map(std::span<const Site> sites, const QuerySpec& query,
                   HullFill fill = HullFill::kMask);

struct MseResult {
  double mse = 0.0;  // dB^2
  std::size_t nodes = 0;
};

// Mean of (a - b)^2 over nodes valid in both maps. Throws ContractViolation
// on grid mismatch and EmptyInput when no node is valid in both.
MseResult mse(const PowerMap& a, const PowerMap& b);

// Received power at every grid node, all nodes valid.
PowerMap truth_map(const SourceField& field, const PathLossModel& model,
                   const QuerySpec& query, const ReceiveOptions& rx);

struct ScenarioConfig {
  Region region;
  double lambda_t = 3.0;
  double lambda_s = 94.0;
  double tx_power_dbm = 30.0;
  PathLossModel path = PathLossModel::free_space(1e9, 3.0);
  ShadowingModel shadowing;  // applied to sensor readings only
  QuerySpec query;
  bool noise_floor = true;
  std::uint64_t seed = 1;
  LatLon geo_origin;  // maps to the region centroid
  FusionOptions fusion;

  LocalProjection projection() const { return {geo_origin, region.centroid()}; }
  ReceiveOptions receive_options() const;
  void validate() const;
};

struct ScenarioResult {
  PointSet sources;
  PointSet sensors;
  PowerMap truth;
  std::vector<PeriodogramRecord> records;  // sensor readings as exported
  std::vector<Site> triples;               // fused from records
  PowerMap reconstruction;
  MseResult error;
  std::uint64_t seed = 0;
};

// Readings exported the way a sensor would report them: one single-bin PSD
// spanning the query band, timestamped at t_start, located via lat/lon.
std::vector<PeriodogramRecord> sensor_records(const PointSet& sensors,
                                              std::span<const double> readings_dbm,
                                              const QuerySpec& query,
                                              const LocalProjection& proj);

// End-to-end run. Sources and sensors come from the "sources" and "sensors"
// sub-streams of config.seed, shadowing (if enabled) from "shadowing".
// Throws DegenerateInput when fewer than 3 usable sensors are drawn.
ScenarioResult simulate_scenario(const ScenarioConfig& config);

struct EnsembleEntry {
  std::uint64_t seed = 0;
  std::optional<MseResult> error;  // empty for degenerate draws
  std::size_t sensors = 0;
  std::string failure;
};

// Runs seeds base.seed, base.seed + 1, ... on up to `jobs` threads. Entries
// come back in seed order regardless of scheduling.
std::vector<EnsembleEntry> run_ensemble(const ScenarioConfig& base, std::size_t n_seeds,
                                        std::size_t jobs = 1);

double ensemble_mean_mse(std::span<const EnsembleEntry> entries);

// CSV matrix (row k = k-th y node from y_min, "nan" where invalid), with
// shortest round-trip number formatting.
void write_map_csv(const std::filesystem::path& path, const PowerMap& map);
nlohmann::json map_sidecar(const PowerMap& map);
// Binary PGM, top row = y_max, invalid nodes black, valid nodes scaled to
// [1, 255] between their min and max.
void write_map_pgm(const std::filesystem::path& path, const PowerMap& map);

std::string format_double(double v);

}  // namespace rfmap
