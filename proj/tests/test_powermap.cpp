#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "rfmap/errors.hpp"
#include "rfmap/powermap.hpp"

using namespace rfmap;

namespace {

// Single 10 MHz bin centred on 1 GHz carrying `dbm` of band power.
PeriodogramRecord record(double x, double y, double dbm, double t = 0.0, double f = 1e9) {
  PeriodogramRecord r;
  r.sensor_id = "s";
  r.timestamp = t;
  r.location = {x, y};
  r.psd.freqs_hz = {f};
  r.psd.resolution_hz = 10e6;
  r.psd.values_dbm_per_hz = {dbm - 70.0};
  return r;
}

QuerySpec unit_query(std::size_t n = 21) {
  QuerySpec q;
  q.grid_nx = n;
  q.grid_ny = n;
  return q;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioConfig scenario(double lambda_s, std::uint64_t seed) {
  ScenarioConfig c;
  c.lambda_t = 3.0;
  c.lambda_s = lambda_s;
  c.seed = seed;
  c.query.grid_nx = 100;
  c.query.grid_ny = 100;
  return c;
}

}  // namespace

TEST_CASE("fusion combines co-located readings in mW") {
  const std::vector<PeriodogramRecord> rs{record(0.5, 0.5, 0.0), record(0.5, 0.5, 10.0),
                                          record(0.2, 0.2, -50.0)};
  const auto f = fuse_records(rs, unit_query());
  REQUIRE(f.sites.size() == 2);
  CHECK(f.used == 3);
  CHECK(f.sites[0].z_dbm == doctest::Approx(-50.0).epsilon(1e-12));
  CHECK(f.sites[1].z_dbm == doctest::Approx(7.40362689494244).epsilon(1e-12));

  FusionOptions med{0.001, FusionMode::kMedian};
  const std::vector<PeriodogramRecord> three{record(0.5, 0.5, 0.0), record(0.5, 0.5, 3.0),
                                             record(0.5, 0.5, 9.0)};
  CHECK(fuse_records(three, unit_query(), med).sites[0].z_dbm == doctest::Approx(3.0));
  FusionOptions mx{0.001, FusionMode::kMax};
  CHECK(fuse_records(three, unit_query(), mx).sites[0].z_dbm == doctest::Approx(9.0));
  CHECK(parse_fusion_mode("median") == FusionMode::kMedian);
  CHECK_THROWS_AS(parse_fusion_mode("mode"), ContractViolation);
}

TEST_CASE("fusion is independent of record order") {
  std::vector<PeriodogramRecord> rs;
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 60; ++i) rs.push_back(record(u(g), u(g), -60.0 + 40.0 * u(g)));
  for (int i = 0; i < 10; ++i) rs.push_back(record(rs[i].location.x, rs[i].location.y, -20.0));
  const auto base = fuse_records(rs, unit_query());
  for (int k = 0; k < 4; ++k) {
    std::shuffle(rs.begin(), rs.end(), g);
    const auto f = fuse_records(rs, unit_query());
    REQUIRE(f.sites.size() == base.sites.size());
    for (std::size_t i = 0; i < f.sites.size(); ++i) {
      CHECK(f.sites[i].x == base.sites[i].x);
      CHECK(f.sites[i].y == base.sites[i].y);
      CHECK(f.sites[i].z_dbm == base.sites[i].z_dbm);
    }
  }
}

TEST_CASE("merge radius links nearby sensors") {
  const std::vector<PeriodogramRecord> rs{record(0.1, 0.1, 0.0), record(0.1004, 0.1, 0.0),
                                          record(0.1008, 0.1, 0.0), record(0.9, 0.9, 0.0)};
  CHECK(fuse_records(rs, unit_query(), {0.0, FusionMode::kMean}).sites.size() == 4);
  // Chain of 0.4 m steps collapses under single linkage at 0.5 m.
  const auto f = fuse_records(rs, unit_query(), {0.0005, FusionMode::kMean});
  REQUIRE(f.sites.size() == 2);
  CHECK(f.sites[0].x == doctest::Approx(0.1004));
  CHECK_THROWS_AS(fuse_records(rs, unit_query(), {-1.0, FusionMode::kMean}), ContractViolation);
}

TEST_CASE("records outside band, window or region are dropped") {
  QuerySpec q = unit_query();
  q.t_start = 100.0;
  q.t_end = 200.0;
  const std::vector<PeriodogramRecord> rs{
      record(0.5, 0.5, 0.0, 150.0),        record(0.5, 0.5, 0.0, 50.0),
      record(0.5, 0.5, 0.0, 250.0),        record(1.5, 0.5, 0.0, 150.0),
      record(0.5, 0.5, 0.0, 150.0, 2.4e9), record(1.0, 1.0, 0.0, 200.0)};
  const auto f = fuse_records(rs, q);
  CHECK(f.used == 2);
  CHECK(f.dropped_time == 2);
  CHECK(f.dropped_region == 1);
  CHECK(f.dropped_band == 1);
  CHECK(f.dropped() == 4);
  const std::vector<PeriodogramRecord> none{record(0.5, 0.5, 0.0, 0.0)};
  CHECK_THROWS_AS(fuse_records(none, q), EmptyInput);
}

TEST_CASE("a planar field is reconstructed exactly") {
  std::vector<Site> s;
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double c : {0.0, 1.0}) {
    s.push_back({c, 0.0, 0}), s.push_back({c, 1.0, 0});
  }
  for (int i = 0; i < 30; ++i) s.push_back({u(g), u(g), 0});
  for (auto& v : s) v.z_dbm = -80.0 + 12.0 * v.x - 5.0 * v.y;
  const auto m = build_map(s, unit_query());
  CHECK(m.method == "delaunay-planar");
  CHECK(m.grid.valid_count() == 21 * 21);
  for (std::size_t iy = 0; iy < 21; ++iy) {
    for (std::size_t ix = 0; ix < 21; ++ix) {
      const auto p = m.grid.spec.node(ix, iy);
      CHECK(std::fabs(m.grid.at(ix, iy) - (-80.0 + 12.0 * p.x - 5.0 * p.y)) <= 1e-9);
    }
  }
}

TEST_CASE("three triples give one plane; outside nodes are masked") {
  const std::vector<Site> s{{0.0, 0.0, -60.0}, {1.0, 0.0, -40.0}, {0.0, 1.0, -70.0}};
  const auto m = build_map(s, unit_query(5));
  // Lower-left half including the diagonal.
  CHECK(m.grid.valid_count() == 15);
  CHECK(m.grid.at(2, 2) == doctest::Approx(-55.0));
  CHECK(m.grid.at(1, 3) == doctest::Approx(-60.0 + 5.0 - 7.5));
  CHECK_FALSE(m.grid.valid(4, 4));
  CHECK_FALSE(m.grid.valid(2, 3));
  for (std::size_t iy = 0; iy < 5; ++iy) {
    for (std::size_t ix = 0; ix < 5; ++ix) {
      if (!m.grid.valid(ix, iy)) continue;
      CHECK(m.grid.at(ix, iy) >= -70.0 - 1e-9);
      CHECK(m.grid.at(ix, iy) <= -40.0 + 1e-9);
    }
  }
}

TEST_CASE("mse") {
  const std::vector<Site> s{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {1.0, 1.0, 0.0}};
  auto a = build_map(s, unit_query());
  auto b = a;
  CHECK(mse(a, b).mse == 0.0);
  CHECK(mse(a, b).nodes == 441);
  for (auto& v : b.grid.values) v += 2.0;
  CHECK(mse(a, b).mse == doctest::Approx(4.0));
  CHECK(mse(b, a).mse == mse(a, b).mse);
  // Masked nodes are ignored.
  b.grid.mask[0] = 0;
  b.grid.values[0] = std::nan("");
  CHECK(mse(a, b).nodes == 440);
  const auto c = build_map(s, unit_query(11));
  CHECK_THROWS_AS(mse(a, c), ContractViolation);
}

TEST_CASE("scenario runs are reproducible") {
  const auto a = simulate_scenario(scenario(94.0, 11));
  const auto b = simulate_scenario(scenario(94.0, 11));
  CHECK(a.sources == b.sources);
  CHECK(a.sensors == b.sensors);
  CHECK(a.truth.grid.values == b.truth.grid.values);
  CHECK(a.reconstruction.grid.mask == b.reconstruction.grid.mask);
  for (std::size_t i = 0; i < a.reconstruction.grid.values.size(); ++i) {
    if (a.reconstruction.grid.mask[i]) {
      REQUIRE(a.reconstruction.grid.values[i] == b.reconstruction.grid.values[i]);
    }
  }
  CHECK(a.error.mse == b.error.mse);
  const auto c = simulate_scenario(scenario(94.0, 12));
  CHECK_FALSE(c.sensors == a.sensors);
  // Source draws do not depend on the sensor density.
  const auto d = simulate_scenario(scenario(313.0, 11));
  CHECK(d.sources == a.sources);
}

TEST_CASE("no transmitters gives a flat noise-floor map") {
  auto cfg = scenario(94.0, 5);
  cfg.lambda_t = 0.0;
  const auto r = simulate_scenario(cfg);
  CHECK(r.sources.points.empty());
  CHECK(r.error.mse < 1e-12);
  CHECK(r.truth.grid.at(0, 0) == doctest::Approx(-104.0).epsilon(1e-3));
}

TEST_CASE("too few sensors is degenerate") {
  auto cfg = scenario(0.0, 5);
  CHECK_THROWS_AS(simulate_scenario(cfg), DegenerateInput);
  cfg.lambda_s = -1.0;
  CHECK_THROWS_AS(simulate_scenario(cfg), ContractViolation);
}

TEST_CASE("ensemble error falls with sensor density") {
  std::vector<double> means;
  for (double ls : {50.0, 94.0, 200.0, 313.0}) {
    const auto e = run_ensemble(scenario(ls, 1), 50, 4);
    REQUIRE(e.size() == 50);
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(e[i].seed == 1 + i);
    means.push_back(ensemble_mean_mse(e));
  }
  for (std::size_t i = 1; i < means.size(); ++i) CHECK(means[i] < means[i - 1]);
  // Thread count does not change results.
  const auto one = run_ensemble(scenario(94.0, 1), 8, 1);
  const auto many = run_ensemble(scenario(94.0, 1), 8, 8);
  for (std::size_t i = 0; i < 8; ++i) CHECK(one[i].error->mse == many[i].error->mse);
}

TEST_CASE("sensor records round trip through json lines") {
  const auto r = simulate_scenario(scenario(94.0, 3));
  const auto dir = std::filesystem::temp_directory_path() / "rfmap_powermap_test";
  std::filesystem::create_directories(dir);
  write_records_jsonl(dir / "r.jsonl", r.records);
  ScenarioConfig cfg = scenario(94.0, 3);
  const auto back = read_records_jsonl(dir / "r.jsonl", cfg.projection());
  REQUIRE(back.records.size() == r.records.size());
  for (std::size_t i = 0; i < back.records.size(); ++i) {
    CHECK(back.records[i].location == r.records[i].location);
    CHECK(back.records[i].psd.values_dbm_per_hz == r.records[i].psd.values_dbm_per_hz);
  }
  const auto sites = fuse_records(back.records, cfg.query).sites;
  REQUIRE(sites.size() == r.triples.size());
  for (std::size_t i = 0; i < sites.size(); ++i) CHECK(sites[i].z_dbm == r.triples[i].z_dbm);

  std::ofstream(dir / "bad.jsonl") << "{\"sensor_id\": \"a\"}\n\nnot json\n";
  try {
    read_records_jsonl(dir / "bad.jsonl", cfg.projection());
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(":1:") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("map writers") {
  const std::vector<Site> s{{0.0, 0.0, -60.0}, {1.0, 0.0, -40.0}, {0.0, 1.0, -70.0}};
  const auto m = build_map(s, unit_query(3));
  const auto dir = std::filesystem::temp_directory_path() / "rfmap_writer_test";
  std::filesystem::create_directories(dir);
  write_map_csv(dir / "m.csv", m);
  CHECK(slurp(dir / "m.csv") == "-60,-50,-40\n-65,-55,nan\n-70,nan,nan\n");
  write_map_pgm(dir / "m.pgm", m);
  const auto pgm = slurp(dir / "m.pgm");
  CHECK(pgm.rfind("P5\n3 3\n255\n", 0) == 0);
  CHECK(pgm.size() == std::string("P5\n3 3\n255\n").size() + 9);
  const auto side = map_sidecar(m);
  CHECK(side.at("valid_nodes") == 6);
  CHECK(side.at("masked_nodes").size() == 3);
  CHECK(side.at("method") == "delaunay-planar");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-104.0) == "-104");
  std::filesystem::remove_all(dir);
}
