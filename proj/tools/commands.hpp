#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "rfmap/density.hpp"
#include "rfmap/periodogram.hpp"
#include "rfmap/powermap.hpp"

namespace rfmap::cli {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;       // bad flags, bad config, contract violations
inline constexpr int kDegenerate = 3;  // too few or collinear sites, no usable records
inline constexpr int kIo = 4;
}  // namespace exit_code

// Runs fn, maps exceptions onto exit codes and reports them on err.
int run_guarded(std::ostream& err, const std::function<int()>& fn);

struct SimulateArgs {
  std::filesystem::path config;
  std::optional<double> lambda_s;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  std::size_t seeds = 1;  // > 1 runs an ensemble
  std::size_t jobs = 1;
};

// Single run writes truth.{csv,json,pgm}, map.{csv,json,pgm}, sites.json,
// records.jsonl, query.json and manifest.json. An ensemble writes
// mse_per_seed.csv and manifest.json.
int cmd_simulate(const SimulateArgs& args, std::ostream& out);

struct DensityArgs {
  std::optional<std::filesystem::path> config;  // path + shadowing taken from it
  std::optional<double> beta;
  std::optional<std::string> sweep_beta;  // "lo:hi[:n]"
  std::optional<std::string> sweep_freq;  // "lo:hi[:n]" in Hz
  std::optional<double> area_km2;
  std::optional<std::filesystem::path> output;  // sweep CSV; stdout if absent
  double a_db = 90.0;
  double alpha = 3.0;
  double f_hz = 1e9;
  std::optional<double> r0_m;
  std::optional<double> k;
  double mu_db = 0.0;
  double sigma_db = 4.0;
  double sweep_beta_value = 0.95;  // beta held fixed during a frequency sweep
};

int cmd_density(const DensityArgs& args, std::ostream& out);

struct MapArgs {
  std::filesystem::path records;
  std::optional<std::filesystem::path> query_file;
  std::optional<std::string> region;  // "x_min,x_max,y_min,y_max"
  std::optional<std::string> band;    // "f_lo,f_hi"
  std::optional<std::string> time;    // "t_start,t_end"
  std::optional<std::string> grid;    // "nx,ny"
  std::optional<std::string> origin;  // "lat,lon"
  std::optional<double> merge_radius_km;
  std::string fusion = "mean";
  std::string fill = "mask";
  std::filesystem::path output_dir = "map_out";
};

struct MapOutcome {
  PowerMap map;
  FusionResult fusion;
};

// The pure part of `map`: read, fuse, build.
MapOutcome build_map_from_records(const MapArgs& args);
int cmd_map(const MapArgs& args, std::ostream& out);

struct WelchArgs {
  std::filesystem::path input;
  std::string format = "u8";
  double rate_hz = 2.048e6;
  double center_hz = 0.0;
  double gain_db = 0.0;
  std::size_t segment = 256;
  double overlap = 0.5;
  std::string window = "hann";
  double calibration = 1.0;
  std::optional<std::string> band;  // "f_lo,f_hi"
  std::optional<std::filesystem::path> output;  // Psd JSON; stdout if absent
};

int cmd_welch(const WelchArgs& args, std::ostream& out);

// Writes a map triple: <stem>.csv, <stem>.json, <stem>.pgm.
void write_map_artifacts(const std::filesystem::path& dir, const std::string& stem,
                         const PowerMap& map);

// Parses "a,b,..." or "a:b:..." into exactly n numbers (n_opt more allowed).
std::vector<double> parse_list(const std::string& text, char sep, std::size_t n_min,
                               std::size_t n_max, const std::string& what);

}  // namespace rfmap::cli
