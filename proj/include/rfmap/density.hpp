#pragma once

#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "rfmap/geometry.hpp"
#include "rfmap/propagation.hpp"

namespace rfmap {

// Converts dB exponents to natural ones: 10^(x/10) = exp(kZeta * x).
inline constexpr double kZeta = std::numbers::ln10 / 10.0;

// Inputs for the relative-power deployment constraint. a_db is a positive
// magnitude: a sensor must see the source no more than a_db below P_T.
struct DensityParams {
  double beta = 0.9;
  double a_db = 90.0;
  PathLossModel path = PathLossModel::free_space(1e9, 3.0);
  ShadowingModel shadow{0.0, 4.0, true};

  void validate() const;
};

// 1 - exp(-lambda pi r^2).
double coverage_probability_fixed_r(double lambda_s, double r_km);

// -ln(1 - beta) / (pi r^2).
double min_density_fixed_r(double beta, double r_km);

// Coverage radius without shadowing, (K 10^(A/10))^(1/alpha), in meters.
double deterministic_radius_m(const DensityParams& params);

// E|S| = pi K^(2/alpha) 10^(A/(5 alpha)) exp(-2 zeta mu / alpha + 2 zeta^2 sigma^2 / alpha^2),
// evaluated in m^2 (K is defined for meters) and returned in km^2. A
// disabled shadowing model counts as mu = sigma = 0.
double expected_coverage_area_km2(const DensityParams& params);

// 1 - exp(-lambda E|S|).
double coverage_probability_power(double lambda_s, const DensityParams& params);

// -ln(1 - beta) / E|S|, sensors per km^2.
double min_density_power_constraint(const DensityParams& params);

struct CurvePoint {
  double x = 0.0;
  double lambda_s = 0.0;
};

std::vector<CurvePoint> sweep_beta(const DensityParams& params, std::span<const double> betas);

// K recomputed per frequency with r0 = c / (2 f); params.beta is held fixed.
std::vector<CurvePoint> sweep_frequency(const DensityParams& params,
                                        std::span<const double> freqs_hz);

// Evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

// One draw of R = (K 10^(A/10))^(1/alpha) Z^(-1/alpha) in meters, with
// Z_dB ~ N(mu, sigma^2) and Z = 10^(Z_dB / 10).
class RadiusSampler {
 public:
  explicit RadiusSampler(const DensityParams& params);
  template <class Rng>
  double operator()(Rng& rng) const {
    if (!shadowed_) return base_m_;
    return base_m_ * std::exp(-kZeta * rng.normal(mu_, sigma_) / alpha_);
  }
  // Radius at the upper tail quantile, z standard deviations out.
  double upper_radius_m(double z_sigma) const;

 private:
  double base_m_;
  double alpha_;
  double mu_;
  double sigma_;
  bool shadowed_;
};

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// pi E[R^2] from n_draws radius samples, in km^2.
MonteCarloEstimate monte_carlo_coverage_area(const DensityParams& params, std::size_t n_draws,
                                             std::uint64_t seed);

struct CoverageOptions {
  std::size_t n_trials = 1000;        // independent sensor realizations
  std::size_t points_per_trial = 100; // uniform test sources per realization
  double tail_sigma = 3.719;          // dilation quantile (99.99th percentile)
  std::size_t jobs = 1;
};

// Fraction of uniform test points in `region` covered by the union of disks
// b(y_i, R_i) around a PPP of sensors. Sensors are drawn on the region
// dilated by the tail radius so the boundary sees a stationary process.
// Trial t uses the "mc-trials" sub-stream t of `seed`; the reduction is in
// trial order, so the result does not depend on `jobs`.
MonteCarloEstimate monte_carlo_coverage(double lambda_s, const DensityParams& params,
                                        const Region& region, const CoverageOptions& opts,
                                        std::uint64_t seed);

// Source-centred variant: the fraction of test sources with at least one
// sensor within a fixed radius r of them (disks drawn around the sources).
MonteCarloEstimate monte_carlo_source_disk_coverage(double lambda_s, double r_km,
                                                    const Region& region,
                                                    const CoverageOptions& opts,
                                                    std::uint64_t seed);

}  // namespace rfmap
