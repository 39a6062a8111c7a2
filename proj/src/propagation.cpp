#include "rfmap/propagation.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rfmap/errors.hpp"
#include "rfmap/rng.hpp"

namespace rfmap {

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw) {
  if (mw <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(mw);
}

bool PathLossModel::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ContractViolation("path-loss exponent must be > 0");
  }
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw ContractViolation("path-loss constant K must be > 0");
  }
  if (r0_m && !(*r0_m > 0.0)) throw ContractViolation("reference distance must be > 0");
  return alpha >= 2.0 && alpha <= 4.0;
}

PathLossModel PathLossModel::free_space(double f_hz, double alpha,
                                        std::optional<double> r0_m) {
  PathLossModel m;
  m.alpha = alpha;
  m.f_hz = f_hz;
  m.r0_m = r0_m ? *r0_m : half_wave_far_field_m(f_hz);
  m.k = free_space_k(f_hz, *m.r0_m, alpha);
  return m;
}

void ShadowingModel::validate() const {
  if (!(sigma_db >= 0.0) || !std::isfinite(sigma_db) || !std::isfinite(mu_db)) {
    throw ContractViolation("shadowing requires finite mu and sigma >= 0");
  }
}

double half_wave_far_field_m(double f_hz) {
  if (!(f_hz > 0.0)) throw ContractViolation("frequency must be > 0");
  return kSpeedOfLight / (2.0 * f_hz);
}

double free_space_k(double f_hz, double r0_m, double alpha) {
  if (!(f_hz > 0.0)) throw ContractViolation("frequency must be > 0");
  if (!(r0_m > 0.0)) throw ContractViolation("reference distance must be > 0");
  if (!(alpha > 0.0)) throw ContractViolation("path-loss exponent must be > 0");
  const double g = kSpeedOfLight / (4.0 * std::numbers::pi * f_hz * r0_m);
  return g * g * std::pow(r0_m, alpha);
}

double free_space_k(double f_hz, double alpha) {
  return free_space_k(f_hz, half_wave_far_field_m(f_hz), alpha);
}

double path_loss_db(const PathLossModel& model, double r_m) {
  if (!(r_m > 0.0)) throw ContractViolation("path loss is singular at r = 0");
  return 10.0 * std::log10(model.k) - 10.0 * model.alpha * std::log10(r_m);
}

double thermal_noise_floor_dbm(double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw ContractViolation("bandwidth must be > 0");
  return kThermalNoiseDbmPerHz + 10.0 * std::log10(bandwidth_hz);
}

namespace {

double effective_distance_m(const PathLossModel& model, const Point& a, const Point& b,
                            double meters_per_unit) {
  double r = distance(a, b) * meters_per_unit;
  if (model.r0_m && r < *model.r0_m) r = *model.r0_m;
  if (!(r > 0.0)) {
    throw ContractViolation("evaluation point coincides with a source and no r0 is set");
  }
  return r;
}

double finish(double sum_mw, const ReceiveOptions& opts) {
  if (opts.noise_floor_dbm) sum_mw += dbm_to_mw(*opts.noise_floor_dbm);
  return mw_to_dbm(sum_mw);
}

}  // namespace

double received_power_dbm(const SourceField& field, const PathLossModel& model,
                          const Point& at, const ReceiveOptions& opts) {
  const double pt_mw = dbm_to_mw(field.tx_power_dbm);
  double sum = 0.0;
  for (const auto& s : field.sources.points) {
    const double r = effective_distance_m(model, s, at, opts.meters_per_unit);
    sum += pt_mw * model.k * std::pow(r, -model.alpha);
  }
  return finish(sum, opts);
}

double received_power_dbm(const SourceField& field, const PathLossModel& model,
                          const ShadowingModel& shadow, const Point& at,
                          std::uint64_t seed, const ReceiveOptions& opts) {
  if (!shadow.enabled) return received_power_dbm(field, model, at, opts);
  shadow.validate();
  Rng rng(seed);
  const double pt_mw = dbm_to_mw(field.tx_power_dbm);
  double sum = 0.0;
  for (const auto& s : field.sources.points) {
    const double r = effective_distance_m(model, s, at, opts.meters_per_unit);
    const double z_db = rng.normal(shadow.mu_db, shadow.sigma_db);
    sum += pt_mw * model.k * std::pow(r, -model.alpha) / dbm_to_mw(z_db);
  }
  return finish(sum, opts);
}

}  // namespace rfmap
