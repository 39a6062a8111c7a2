#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "config.hpp"
#include "rfmap/errors.hpp"

namespace rfmap::cli {

namespace fs = std::filesystem;

int run_guarded(std::ostream& err, const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const ContractViolation& e) {
    err << "invalid input: " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const DegenerateInput& e) {
    err << "degenerate input: " << e.what() << '\n';
    return exit_code::kDegenerate;
  } catch (const EmptyInput& e) {
    err << "no usable input: " << e.what() << '\n';
    return exit_code::kDegenerate;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return exit_code::kIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return exit_code::kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kFailure;
  }
}

std::vector<double> parse_list(const std::string& text, char sep, std::size_t n_min,
                               std::size_t n_max, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ContractViolation(what + ": '" + item + "' is not a number");
    }
  }
  if (out.size() < n_min || out.size() > n_max) {
    throw ContractViolation(what + ": expected " + std::to_string(n_min) +
                            (n_max != n_min ? "-" + std::to_string(n_max) : std::string()) +
                            " values, got '" + text + "'");
  }
  return out;
}

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json sites_json(const ScenarioResult& res) {
  nlohmann::json triples = nlohmann::json::array();
  for (const auto& s : res.triples) triples.push_back({s.x, s.y, s.z_dbm});
  return {{"sources", to_json(res.sources)},
          {"sensors", to_json(res.sensors)},
          {"triples", std::move(triples)}};
}

}  // namespace

void write_map_artifacts(const fs::path& dir, const std::string& stem, const PowerMap& map) {
  write_map_csv(dir / (stem + ".csv"), map);
  write_json(dir / (stem + ".json"), map_sidecar(map));
  write_map_pgm(dir / (stem + ".pgm"), map);
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
  LoadedConfig cfg = load_scenario_config(args.config);
  if (args.lambda_s) cfg.scenario.lambda_s = *args.lambda_s;
  if (args.seed) cfg.scenario.seed = *args.seed;
  cfg.scenario.validate();
  const fs::path dir = args.output_dir ? *args.output_dir : cfg.output_dir;
  ensure_dir(dir);

  nlohmann::json manifest = {{"command", "simulate"},
                             {"config_hash", hex64(cfg.hash)},
                             {"config", to_json(cfg.scenario)},
                             {"seed_streams", {"sources", "sensors", "shadowing"}}};

  if (args.seeds > 1) {
    const auto entries = run_ensemble(cfg.scenario, args.seeds, args.jobs);
    std::ofstream csv(dir / "mse_per_seed.csv");
    if (!csv) throw IoError("cannot write " + (dir / "mse_per_seed.csv").string());
    csv << "seed,sensors,mse_db2,nodes,status\n";
    std::size_t ok = 0;
    for (const auto& e : entries) {
      csv << e.seed << ',' << e.sensors << ',';
      if (e.error) {
        csv << format_double(e.error->mse) << ',' << e.error->nodes << ",ok\n";
        ++ok;
      } else {
        csv << "nan,0,degenerate\n";
      }
    }
    const double mean = ensemble_mean_mse(entries);
    manifest["seeds"] = {{"first", cfg.scenario.seed}, {"count", args.seeds}, {"usable", ok}};
    manifest["mean_mse_db2"] = ok ? nlohmann::json(mean) : nlohmann::json(nullptr);
    write_json(dir / "manifest.json", manifest);
    out << "runs " << args.seeds << " usable " << ok << " mean_mse_db2 " << format_double(mean)
        << '\n';
    return ok ? exit_code::kOk : exit_code::kDegenerate;
  }

  const ScenarioResult res = simulate_scenario(cfg.scenario);
  write_map_artifacts(dir, "truth", res.truth);
  write_map_artifacts(dir, "map", res.reconstruction);
  write_json(dir / "sites.json", sites_json(res));
  write_records_jsonl(dir / "records.jsonl", res.records);
  write_json(dir / "query.json", to_json(MapQueryFile{cfg.scenario.query, cfg.scenario.geo_origin,
                                                      cfg.scenario.fusion.merge_radius_km}));
  manifest["seed"] = res.seed;
  manifest["sources"] = res.sources.size();
  manifest["sensors"] = res.sensors.size();
  manifest["sites"] = res.triples.size();
  manifest["mse_db2"] = res.error.mse;
  manifest["mse_nodes"] = res.error.nodes;
  write_json(dir / "manifest.json", manifest);
  out << "sources " << res.sources.size() << " sensors " << res.sensors.size() << " mse_db2 "
      << format_double(res.error.mse) << " nodes " << res.error.nodes << '\n';
  return exit_code::kOk;
}

// ---------------------------------------------------------------- density

namespace {

std::vector<double> parse_sweep(const std::string& spec, std::size_t default_n,
                                const std::string& what) {
  const auto v = parse_list(spec, ':', 2, 3, what);
  const auto n = v.size() == 3 ? static_cast<std::size_t>(v[2]) : default_n;
  if (v.size() == 3 && (v[2] < 1 || v[2] != std::floor(v[2]))) {
    throw ContractViolation(what + ": point count must be a positive integer");
  }
  return linspace(v[0], v[1], n);
}

void write_curve(std::ostream& os, const char* x_header, std::span<const CurvePoint> curve) {
  os << x_header << ",lambda_s_per_km2\n";
  for (const auto& p : curve) os << format_double(p.x) << ',' << format_double(p.lambda_s) << '\n';
}

}  // namespace

int cmd_density(const DensityArgs& args, std::ostream& out) {
  DensityParams params;
  params.a_db = args.a_db;
  if (args.config) {
    const auto cfg = load_scenario_config(*args.config);
    params.path = cfg.scenario.path;
    params.shadow = cfg.scenario.shadowing;
  } else {
    if (args.k) {
      params.path = PathLossModel{};
      params.path.alpha = args.alpha;
      params.path.k = *args.k;
      params.path.r0_m = args.r0_m;
    } else {
      params.path = PathLossModel::free_space(args.f_hz, args.alpha, args.r0_m);
    }
    params.shadow = {args.mu_db, args.sigma_db, true};
  }
  params.path.validate();
  params.shadow.validate();

  const int modes = (args.beta ? 1 : 0) + (args.sweep_beta ? 1 : 0) + (args.sweep_freq ? 1 : 0);
  if (modes != 1) {
    throw ContractViolation("choose exactly one of --beta, --sweep-beta, --sweep-freq");
  }

  if (args.beta) {
    params.beta = *args.beta;
    const double lambda = min_density_power_constraint(params);
    out << "lambda_s " << format_double(lambda) << " sensors/km^2\n";
    out << "coverage_area " << format_double(expected_coverage_area_km2(params)) << " km^2\n";
    if (args.area_km2) {
      if (!(*args.area_km2 > 0.0)) throw ContractViolation("--area-km2 must be > 0");
      out << "total " << format_double(lambda * *args.area_km2) << " sensors\n";
    }
    return exit_code::kOk;
  }

  std::vector<CurvePoint> curve;
  const char* header = nullptr;
  if (args.sweep_beta) {
    const auto betas = parse_sweep(*args.sweep_beta, 99, "--sweep-beta");
    curve = sweep_beta(params, betas);
    header = "beta";
  } else {
    const auto freqs = parse_sweep(*args.sweep_freq, 100, "--sweep-freq");
    for (double f : freqs) {
      if (!(f > 0.0)) throw ContractViolation("--sweep-freq values must be > 0");
    }
    params.beta = args.sweep_beta_value;
    curve = sweep_frequency(params, freqs);
    header = "f_hz";
  }
  if (args.output) {
    std::ofstream f(*args.output);
    if (!f) throw IoError("cannot write " + args.output->string());
    write_curve(f, header, curve);
    out << "wrote " << curve.size() << " points to " << args.output->string() << '\n';
  } else {
    write_curve(out, header, curve);
  }
  return exit_code::kOk;
}

// ---------------------------------------------------------------- map

MapOutcome build_map_from_records(const MapArgs& args) {
  MapQueryFile q;
  if (args.query_file) {
    std::ifstream in(*args.query_file);
    if (!in) throw IoError("cannot open query file " + args.query_file->string());
    try {
      q = map_query_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(args.query_file->string() + ": " + e.what());
    }
  } else if (!args.region || !args.band) {
    throw ContractViolation("map needs --query or both --region and --band");
  }
  if (args.region) {
    const auto r = parse_list(*args.region, ',', 4, 4, "--region");
    q.query.region = make_region(r[0], r[1], r[2], r[3]);
  }
  if (args.band) {
    const auto b = parse_list(*args.band, ',', 2, 2, "--band");
    q.query.f_lo_hz = b[0];
    q.query.f_hi_hz = b[1];
  }
  if (args.time) {
    const auto t = parse_list(*args.time, ',', 2, 2, "--time");
    q.query.t_start = t[0];
    q.query.t_end = t[1];
  } else if (!args.query_file) {
    q.query.t_start = -std::numeric_limits<double>::infinity();
    q.query.t_end = std::numeric_limits<double>::infinity();
  }
  if (args.grid) {
    const auto g = parse_list(*args.grid, ',', 2, 2, "--grid");
    if (g[0] < 2 || g[1] < 2) throw ContractViolation("--grid dimensions must be >= 2");
    q.query.grid_nx = static_cast<std::size_t>(g[0]);
    q.query.grid_ny = static_cast<std::size_t>(g[1]);
  }
  if (args.origin) {
    const auto o = parse_list(*args.origin, ',', 2, 2, "--origin");
    q.geo_origin = {o[0], o[1]};
  }
  if (args.merge_radius_km) q.merge_radius_km = *args.merge_radius_km;
  q.query.validate();

  HullFill fill = HullFill::kMask;
  if (args.fill == "nearest") {
    fill = HullFill::kNearestSite;
  } else if (args.fill != "mask") {
    throw ContractViolation("--fill must be 'mask' or 'nearest'");
  }

  const LocalProjection proj(q.geo_origin, q.query.region.centroid());
  const auto read = read_records_jsonl(args.records, proj);
  FusionOptions fo;
  fo.merge_radius_km = q.merge_radius_km;
  fo.mode = parse_fusion_mode(args.fusion);
  MapOutcome outcome;
  outcome.fusion = fuse_records(read.records, q.query, fo);
  outcome.map = build_map(outcome.fusion.sites, q.query, fill);
  return outcome;
}

int cmd_map(const MapArgs& args, std::ostream& out) {
  const MapOutcome res = build_map_from_records(args);
  ensure_dir(args.output_dir);
  write_map_artifacts(args.output_dir, "map", res.map);
  const auto& f = res.fusion;
  out << "records used " << f.used << " dropped " << f.dropped() << " (band " << f.dropped_band
      << ", time " << f.dropped_time << ", region " << f.dropped_region << ")\n";
  out << "sites " << f.sites.size() << " valid nodes " << res.map.grid.valid_count() << " of "
      << res.map.grid.values.size() << '\n';
  return exit_code::kOk;
}

// ---------------------------------------------------------------- welch

int cmd_welch(const WelchArgs& args, std::ostream& out) {
  IqBlock block;
  block.samples = read_iq_file(args.input, parse_iq_format(args.format));
  block.sample_rate_hz = args.rate_hz;
  block.center_freq_hz = args.center_hz;
  block.gain_db = args.gain_db;
  WelchOptions opts;
  opts.segment_len = args.segment;
  opts.overlap = args.overlap;
  opts.window = parse_window(args.window);
  opts.calibration = args.calibration;
  const Psd psd = welch_psd(block, opts);

  nlohmann::json j = to_json(psd);
  j["sample_rate_hz"] = block.sample_rate_hz;
  j["center_freq_hz"] = block.center_freq_hz;
  j["gain_db"] = block.gain_db;
  j["segment_len"] = opts.segment_len;
  j["overlap"] = opts.overlap;
  j["window"] = args.window;
  if (args.output) {
    write_json(*args.output, j);
  } else {
    out << j.dump() << '\n';
  }
  if (args.band) {
    const auto b = parse_list(*args.band, ',', 2, 2, "--band");
    out << "band_power_dbm " << format_double(band_power_dbm(psd, b[0], b[1])) << '\n';
  }
  return exit_code::kOk;
}

}  // namespace rfmap::cli
