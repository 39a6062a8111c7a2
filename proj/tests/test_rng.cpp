#include <doctest.h>

#include <cmath>
#include <vector>

#include "rfmap/rng.hpp"

using namespace rfmap;

TEST_CASE("streams are deterministic and labels separate them") {
  Rng a(42, "sensors"), b(42, "sensors"), c(42, "sources"), d(42, "sensors", 1);
  const auto x = a.next_u64();
  CHECK(x == b.next_u64());
  CHECK(x != c.next_u64());
  CHECK(x != d.next_u64());
  CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
}

TEST_CASE("uniform stays in [0, 1) and has the right mean") {
  Rng rng(7);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000.0 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal moments") {
  Rng rng(11);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal(2.0, 3.0);
    s += z;
    s2 += z * z;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::fabs(mean - 2.0) < 0.03);
  CHECK(std::sqrt(var) == doctest::Approx(3.0).epsilon(0.01));
}

TEST_CASE("poisson mean and variance in both regimes") {
  for (double lambda : {0.5, 3.0, 9.9, 10.0, 42.0, 1500.0}) {
    CAPTURE(lambda);
    Rng rng(99, "poisson", static_cast<std::uint64_t>(lambda * 10));
    const int n = 100000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(rng.poisson(lambda));
      s += k;
      s2 += k * k;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    CHECK(mean == doctest::Approx(lambda).epsilon(0.02));
    CHECK(var == doctest::Approx(lambda).epsilon(0.03));
  }
  Rng rng(1);
  CHECK(rng.poisson(0.0) == 0);
}

TEST_CASE("PTRS matches the Poisson pmf (chi-square)") {
  // Mean 25 exercises the transformed-rejection branch.
  const double lambda = 25.0;
  const int n = 200000;
  std::vector<double> counts(60, 0.0);
  Rng rng(2024);
  for (int i = 0; i < n; ++i) {
    const auto k = rng.poisson(lambda);
    counts[std::min<std::size_t>(k, counts.size() - 1)] += 1.0;
  }
  // Bins 12..40 individually, tails pooled.
  double chi2 = 0.0;
  int df = -1;
  double lo_obs = 0.0, lo_exp = 0.0, hi_obs = 0.0, hi_exp = 0.0;
  for (int k = 0; k < 60; ++k) {
    const double pk = std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
    const double expected = (k == 59 ? 0.0 : pk * n);
    if (k < 12) {
      lo_obs += counts[k];
      lo_exp += expected;
    } else if (k > 40) {
      hi_obs += counts[k];
      hi_exp += expected;
    } else {
      chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
      ++df;
    }
  }
  hi_exp = n - lo_exp;
  for (int k = 12; k <= 40; ++k) {
    hi_exp -= std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0)) * n;
  }
  chi2 += (lo_obs - lo_exp) * (lo_obs - lo_exp) / lo_exp;
  chi2 += (hi_obs - hi_exp) * (hi_obs - hi_exp) / hi_exp;
  df += 2;
  // 30 degrees of freedom, p = 0.001 critical value 59.70.
  CHECK(df == 30);
  CHECK(chi2 < 59.70);
}
