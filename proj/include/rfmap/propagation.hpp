#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "rfmap/geometry.hpp"
#include "rfmap/pointprocess.hpp"

namespace rfmap {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s
inline constexpr double kThermalNoiseDbmPerHz = -174.0;

double dbm_to_mw(double dbm);
// Zero maps to -inf; callers that need a finite value add a floor first.
double mw_to_dbm(double mw);

// Power-law path loss l(r) = K r^-alpha with r in meters.
struct PathLossModel {
  double alpha = 3.0;
  double k = 1.0;
  // Derivation inputs; r0_m is also the near-field clamp distance.
  std::optional<double> f_hz;
  std::optional<double> r0_m;

  // Rejects alpha <= 0 and K <= 0; returns false (no throw) when alpha lies
  // outside the usual [2, 4] range so callers can warn.
  bool validate() const;

  // K from the free-space reference at f_hz, r0 defaulting to c / (2 f).
  static PathLossModel free_space(double f_hz, double alpha,
                                  std::optional<double> r0_m = std::nullopt);
};

struct ShadowingModel {
  double mu_db = 0.0;
  double sigma_db = 0.0;
  bool enabled = false;

  void validate() const;
};

struct SourceField {
  PointSet sources;
  double tx_power_dbm = 30.0;
};

double half_wave_far_field_m(double f_hz);

// K = (c / (4 pi f r0))^2 * r0^alpha.
double free_space_k(double f_hz, double r0_m, double alpha);
double free_space_k(double f_hz, double alpha);  // r0 = c / (2 f)

// 10 log10(K) - 10 alpha log10(r). No clamping; r_m must be > 0.
double path_loss_db(const PathLossModel& model, double r_m);

struct ReceiveOptions {
  // Linear-domain floor added to every received power; nullopt disables it.
  std::optional<double> noise_floor_dbm;
  // Points are in km, the path-loss law in meters.
  double meters_per_unit = 1000.0;
};

// Thermal floor integrated over a bandwidth.
double thermal_noise_floor_dbm(double bandwidth_hz);

// Linear sum of P_T l(r_i) / Z_i over all sources, plus the floor.
// Distances below model.r0_m are clamped to r0_m; without r0_m a coincident
// point throws ContractViolation. Shadowing draws one Z_dB ~ N(mu, sigma^2)
// per source from Rng(seed), in source order.
double received_power_dbm(const SourceField& field, const PathLossModel& model,
                          const ShadowingModel& shadow, const Point& at,
                          std::uint64_t seed, const ReceiveOptions& opts = {});

// Same without shadowing; no seed needed.
double received_power_dbm(const SourceField& field, const PathLossModel& model,
                          const Point& at, const ReceiveOptions& opts = {});

}  // namespace rfmap
