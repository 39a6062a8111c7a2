#include "rfmap/density.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "rfmap/errors.hpp"
#include "rfmap/rng.hpp"

namespace rfmap {

namespace {

constexpr double kM2PerKm2 = 1e6;

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw ContractViolation("beta must lie in (0, 1)");
}

struct ShadowMoments {
  double mu = 0.0;
  double sigma = 0.0;
};

ShadowMoments moments(const ShadowingModel& s) {
  if (!s.enabled) return {};
  return {s.mu_db, s.sigma_db};
}

MonteCarloEstimate summarize(const std::vector<double>& fractions, std::size_t samples) {
  MonteCarloEstimate est;
  est.samples = samples;
  const double n = static_cast<double>(fractions.size());
  double mean = 0.0;
  for (double f : fractions) mean += f;
  mean /= n;
  double ss = 0.0;
  for (double f : fractions) ss += (f - mean) * (f - mean);
  est.value = mean;
  est.std_error = fractions.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return est;
}

// Runs body(t) for t in [0, n) on `jobs` threads.
template <class Body>
void parallel_trials(std::size_t n, std::size_t jobs, Body body) {
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  if (jobs == 1) {
    for (std::size_t t = 0; t < n; ++t) body(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      for (std::size_t t = next++; t < n; t = next++) body(t);
    });
  }
}

void check_coverage_inputs(double lambda_s, const Region& region, const CoverageOptions& opts) {
  region.validate();
  if (!(lambda_s >= 0.0)) throw ContractViolation("sensor intensity must be >= 0");
  if (opts.n_trials < 1 || opts.points_per_trial < 1) {
    throw ContractViolation("coverage estimate needs at least one trial and one point");
  }
}

void check_link(const DensityParams& p) {
  if (!(std::isfinite(p.a_db) && p.a_db >= 0.0)) {
    throw ContractViolation("A must be a finite dB magnitude >= 0");
  }
  p.path.validate();
  p.shadow.validate();
}

}  // namespace

void DensityParams::validate() const {
  check_beta(beta);
  check_link(*this);
}

double coverage_probability_fixed_r(double lambda_s, double r_km) {
  if (!(lambda_s >= 0.0)) throw ContractViolation("sensor intensity must be >= 0");
  if (!(r_km > 0.0)) throw ContractViolation("radius must be > 0");
  return -std::expm1(-lambda_s * std::numbers::pi * r_km * r_km);
}

double min_density_fixed_r(double beta, double r_km) {
  check_beta(beta);
  if (!(r_km > 0.0)) throw ContractViolation("radius must be > 0");
  return -std::log1p(-beta) / (std::numbers::pi * r_km * r_km);
}

double deterministic_radius_m(const DensityParams& params) {
  check_link(params);
  return std::pow(params.path.k * std::pow(10.0, params.a_db / 10.0), 1.0 / params.path.alpha);
}

double expected_coverage_area_km2(const DensityParams& params) {
  check_link(params);
  const double alpha = params.path.alpha;
  const auto [mu, sigma] = moments(params.shadow);
  const double area_m2 = std::numbers::pi * std::pow(params.path.k, 2.0 / alpha) *
                         std::pow(10.0, params.a_db / (5.0 * alpha)) *
                         std::exp(-2.0 * kZeta * mu / alpha +
                                  2.0 * kZeta * kZeta * sigma * sigma / (alpha * alpha));
  return area_m2 / kM2PerKm2;
}

double coverage_probability_power(double lambda_s, const DensityParams& params) {
  if (!(lambda_s >= 0.0)) throw ContractViolation("sensor intensity must be >= 0");
  return -std::expm1(-lambda_s * expected_coverage_area_km2(params));
}

double min_density_power_constraint(const DensityParams& params) {
  check_beta(params.beta);
  return -std::log1p(-params.beta) / expected_coverage_area_km2(params);
}

std::vector<CurvePoint> sweep_beta(const DensityParams& params, std::span<const double> betas) {
  std::vector<CurvePoint> out;
  out.reserve(betas.size());
  DensityParams p = params;
  for (double b : betas) {
    p.beta = b;
    out.push_back({b, min_density_power_constraint(p)});
  }
  return out;
}

std::vector<CurvePoint> sweep_frequency(const DensityParams& params,
                                        std::span<const double> freqs_hz) {
  std::vector<CurvePoint> out;
  out.reserve(freqs_hz.size());
  DensityParams p = params;
  for (double f : freqs_hz) {
    p.path = PathLossModel::free_space(f, params.path.alpha);
    out.push_back({f, min_density_power_constraint(p)});
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = n == 1 ? lo
                    : (i + 1 == n ? hi
                                  : lo + (hi - lo) * static_cast<double>(i) /
                                             static_cast<double>(n - 1));
  }
  return out;
}

RadiusSampler::RadiusSampler(const DensityParams& params)
    : base_m_(deterministic_radius_m(params)),
      alpha_(params.path.alpha),
      mu_(params.shadow.mu_db),
      sigma_(params.shadow.sigma_db),
      shadowed_(params.shadow.enabled && params.shadow.sigma_db > 0.0) {
  // A constant offset still shifts the radius when sigma is zero.
  if (params.shadow.enabled && !shadowed_) {
    base_m_ *= std::exp(-kZeta * mu_ / alpha_);
  }
}

double RadiusSampler::upper_radius_m(double z_sigma) const {
  if (!shadowed_) return base_m_;
  return base_m_ * std::exp(-kZeta * (mu_ - z_sigma * sigma_) / alpha_);
}

MonteCarloEstimate monte_carlo_coverage_area(const DensityParams& params, std::size_t n_draws,
                                             std::uint64_t seed) {
  if (n_draws < 2) throw ContractViolation("need at least two draws");
  const RadiusSampler radius(params);
  Rng rng(seed, "mc-radii");
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n_draws; ++i) {
    const double r = radius(rng);
    const double a = std::numbers::pi * r * r / kM2PerKm2;
    const double d = a - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (a - mean);
  }
  MonteCarloEstimate est;
  est.samples = n_draws;
  est.value = mean;
  est.std_error = std::sqrt(m2 / static_cast<double>(n_draws - 1) / static_cast<double>(n_draws));
  return est;
}

MonteCarloEstimate monte_carlo_coverage(double lambda_s, const DensityParams& params,
                                        const Region& region, const CoverageOptions& opts,
                                        std::uint64_t seed) {
  check_coverage_inputs(lambda_s, region, opts);
  params.path.validate();
  params.shadow.validate();
  const RadiusSampler radius(params);
  const double margin_km = radius.upper_radius_m(opts.tail_sigma) / 1000.0;
  const Region window = region.dilated(margin_km);

  std::vector<double> fractions(opts.n_trials);
  parallel_trials(opts.n_trials, opts.jobs, [&](std::size_t t) {
    Rng rng(seed, "mc-trials", t);
    const std::uint64_t n = rng.poisson(lambda_s * window.area());
    std::vector<double> xs(n), ys(n), r2(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      xs[i] = rng.uniform(window.x_min, window.x_max);
      ys[i] = rng.uniform(window.y_min, window.y_max);
      const double r = radius(rng) / 1000.0;
      r2[i] = r * r;
    }
    std::size_t covered = 0;
    for (std::size_t k = 0; k < opts.points_per_trial; ++k) {
      const double px = rng.uniform(region.x_min, region.x_max);
      const double py = rng.uniform(region.y_min, region.y_max);
      for (std::uint64_t i = 0; i < n; ++i) {
        const double dx = xs[i] - px, dy = ys[i] - py;
        if (dx * dx + dy * dy <= r2[i]) {
          ++covered;
          break;
        }
      }
    }
    fractions[t] = static_cast<double>(covered) / static_cast<double>(opts.points_per_trial);
  });
  return summarize(fractions, opts.n_trials * opts.points_per_trial);
}

MonteCarloEstimate monte_carlo_source_disk_coverage(double lambda_s, double r_km,
                                                    const Region& region,
                                                    const CoverageOptions& opts,
                                                    std::uint64_t seed) {
  check_coverage_inputs(lambda_s, region, opts);
  if (!(r_km > 0.0)) throw ContractViolation("radius must be > 0");
  const Region window = region.dilated(r_km);
  const double r2 = r_km * r_km;

  std::vector<double> fractions(opts.n_trials);
  parallel_trials(opts.n_trials, opts.jobs, [&](std::size_t t) {
    Rng sensor_rng(seed, "mc-sensors", t);
    Rng source_rng(seed, "mc-sources", t);
    const std::uint64_t n = sensor_rng.poisson(lambda_s * window.area());
    std::vector<Point> sensors(n);
    for (auto& s : sensors) {
      s.x = sensor_rng.uniform(window.x_min, window.x_max);
      s.y = sensor_rng.uniform(window.y_min, window.y_max);
    }
    std::size_t detected = 0;
    for (std::size_t k = 0; k < opts.points_per_trial; ++k) {
      const Point src{source_rng.uniform(region.x_min, region.x_max),
                      source_rng.uniform(region.y_min, region.y_max)};
      // Count sensors inside the disk around the source.
      std::size_t inside = 0;
      for (const auto& s : sensors) {
        const double dx = s.x - src.x, dy = s.y - src.y;
        inside += dx * dx + dy * dy <= r2 ? 1 : 0;
      }
      detected += inside > 0 ? 1 : 0;
    }
    fractions[t] = static_cast<double>(detected) / static_cast<double>(opts.points_per_trial);
  });
  return summarize(fractions, opts.n_trials * opts.points_per_trial);
}

}  // namespace rfmap
