#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace rfmap::cli;

int main(int argc, char** argv) {
  CLI::App app{"rfmap: RF power map simulation, reconstruction and sensor-density planning"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a PPP scenario, rebuild its map, score MSE");
  simulate->add_option("config", sim.config, "Scenario config (JSON)")->required();
  simulate->add_option("--lambda-s", sim.lambda_s, "Override sensor intensity (per km^2)");
  simulate->add_option("--seed", sim.seed, "Override master seed");
  simulate->add_option("--seeds", sim.seeds, "Run an ensemble over this many consecutive seeds")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--jobs", sim.jobs, "Worker threads for ensembles")->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim.output_dir, "Output directory (overrides config)");

  DensityArgs den;
  auto* density = app.add_subcommand("density", "Required sensor density under the relative-power constraint");
  density->add_option("--config", den.config, "Take path-loss and shadowing from a scenario config");
  density->add_option("--beta", den.beta, "Coverage confidence in (0,1)");
  density->add_option("--sweep-beta", den.sweep_beta, "Sweep beta as lo:hi[:n]");
  density->add_option("--sweep-freq", den.sweep_freq, "Sweep frequency (Hz) as lo:hi[:n]");
  density->add_option("--sweep-freq-beta", den.sweep_beta_value, "Beta held fixed in a frequency sweep");
  density->add_option("--area-km2", den.area_km2, "Also print total sensors for this area");
  density->add_option("--a-db", den.a_db, "Relative power threshold A (dB below P_T)");
  density->add_option("--alpha", den.alpha, "Path-loss exponent");
  density->add_option("--freq", den.f_hz, "Carrier frequency in Hz (derives K)");
  density->add_option("--r0", den.r0_m, "Reference distance in m (default c/2f)");
  density->add_option("--k", den.k, "Explicit path-loss constant K (r in m)");
  density->add_option("--mu", den.mu_db, "Shadowing mean (dB)");
  density->add_option("--sigma", den.sigma_db, "Shadowing std deviation (dB)");
  density->add_option("--out", den.output, "Write sweep CSV here instead of stdout");

  MapArgs map;
  auto* mapcmd = app.add_subcommand("map", "Build an RF power map from JSON-lines periodogram records");
  mapcmd->add_option("records", map.records, "Records file (JSON lines)")->required();
  mapcmd->add_option("--query", map.query_file, "Query JSON (as written by simulate)");
  mapcmd->add_option("--region", map.region, "x_min,x_max,y_min,y_max in km");
  mapcmd->add_option("--band", map.band, "f_lo,f_hi in Hz");
  mapcmd->add_option("--time", map.time, "t_start,t_end in UTC seconds");
  mapcmd->add_option("--grid", map.grid, "nx,ny");
  mapcmd->add_option("--origin", map.origin, "lat,lon mapped to the region centroid");
  mapcmd->add_option("--merge-radius-km", map.merge_radius_km, "Co-location merge radius");
  mapcmd->add_option("--fusion", map.fusion, "mean | median | max")
      ->check(CLI::IsMember({"mean", "median", "max"}));
  mapcmd->add_option("--fill", map.fill, "Outside-hull policy: mask | nearest")
      ->check(CLI::IsMember({"mask", "nearest"}));
  mapcmd->add_option("--out", map.output_dir, "Output directory");

  WelchArgs wel;
  auto* welch = app.add_subcommand("welch", "Welch PSD of a raw IQ capture");
  welch->add_option("input", wel.input, "IQ file")->required();
  welch->add_option("--format", wel.format, "u8 (RTL-SDR) | f32")->check(CLI::IsMember({"u8", "f32"}));
  welch->add_option("--rate", wel.rate_hz, "Sample rate in Hz");
  welch->add_option("--center", wel.center_hz, "Center frequency in Hz");
  welch->add_option("--gain", wel.gain_db, "Front-end gain in dB");
  welch->add_option("--segment", wel.segment, "Segment length (power of two)");
  welch->add_option("--overlap", wel.overlap, "Overlap fraction in [0,1)");
  welch->add_option("--window", wel.window, "hann | hamming | rect")
      ->check(CLI::IsMember({"hann", "hamming", "rect"}));
  welch->add_option("--calibration", wel.calibration, "mW per unit |x|^2");
  welch->add_option("--band", wel.band, "Print band power over f_lo,f_hi");
  welch->add_option("--out", wel.output, "Write PSD JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_code::kOk : exit_code::kUsage;
  }

  return run_guarded(std::cerr, [&] {
    if (*simulate) return cmd_simulate(sim, std::cout);
    if (*density) return cmd_density(den, std::cout);
    if (*mapcmd) return cmd_map(map, std::cout);
    return cmd_welch(wel, std::cout);
  });
}
