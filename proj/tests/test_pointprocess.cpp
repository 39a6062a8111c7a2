#include <doctest.h>

#include "rfmap/errors.hpp"
#include "rfmap/pointprocess.hpp"
#include "rfmap/rng.hpp"

using namespace rfmap;

TEST_CASE("zero intensity gives an empty set") {
  const auto s = sample_ppp(make_region(0, 3, -1, 2), 0.0, 5);
  CHECK(s.empty());
}

TEST_CASE("invalid regions and intensities are rejected") {
  CHECK_THROWS_AS(make_region(1, 1, 0, 1), ContractViolation);
  CHECK_THROWS_AS(sample_ppp(Region{0, 1, 2, 1}, 1.0, 1), ContractViolation);
  CHECK_THROWS_AS(sample_ppp(Region{}, -1.0, 1), ContractViolation);
  CHECK_THROWS_AS(count_distribution_check(Region{}, 1.0, 0, 1), ContractViolation);
}

TEST_CASE("fixed seed reproduces the point list exactly") {
  const Region r{0, 1, 0, 1};
  const auto a = sample_ppp(r, 100.0, 1234);
  const auto b = sample_ppp(r, 100.0, 1234);
  CHECK(a == b);
  CHECK(a.size() > 50);
  CHECK(a != sample_ppp(r, 100.0, 1235));
  for (const auto& p : a.points) CHECK(r.contains(p));
}

TEST_CASE("three sources per km^2 on average over 10^4 seeds") {
  const Region r{0, 1, 0, 1};
  double total = 0.0;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    total += static_cast<double>(sample_ppp(r, 3.0, derive_seed(77, "sources", s)).size());
  }
  const double mean = total / 10000.0;
  CHECK(mean >= 2.9);
  CHECK(mean <= 3.1);
}

TEST_CASE("count moments match lambda * area") {
  const auto m = count_distribution_check(Region{0, 1, 0, 1}, 5.0, 100000, 3);
  CHECK(m.mean == doctest::Approx(5.0).epsilon(0.03));
  CHECK(m.variance == doctest::Approx(5.0).epsilon(0.03));

  const auto m4 = count_distribution_check(Region{0, 2, 0, 2}, 1.0, 100000, 4);
  CHECK(m4.mean == doctest::Approx(4.0).epsilon(0.03));
  CHECK(m4.variance == doctest::Approx(4.0).epsilon(0.03));

  const auto z = count_distribution_check(Region{0, 1, 0, 1}, 0.0, 10, 5);
  CHECK(z.mean == 0.0);
  CHECK(z.variance == 0.0);
}

TEST_CASE("count check agrees with sample_ppp for the same derived seed") {
  const Region r{0, 1, 0, 1};
  const auto m = count_distribution_check(r, 7.0, 1, 9);
  CHECK(m.mean == static_cast<double>(sample_ppp(r, 7.0, derive_seed(9, "count-check", 0)).size()));
}

TEST_CASE("points are uniform over a 4x4 partition (chi-square)") {
  const Region r{-1, 3, 10, 12};
  std::vector<double> cells(16, 0.0);
  double n = 0.0;
  for (std::uint64_t s = 0; n < 10000; ++s) {
    for (const auto& p : sample_ppp(r, 50.0, derive_seed(5, "uniformity", s)).points) {
      const int ix = std::min(3, static_cast<int>((p.x - r.x_min) / r.width() * 4));
      const int iy = std::min(3, static_cast<int>((p.y - r.y_min) / r.height() * 4));
      cells[iy * 4 + ix] += 1.0;
      n += 1.0;
    }
  }
  double chi2 = 0.0;
  for (double c : cells) chi2 += (c - n / 16) * (c - n / 16) / (n / 16);
  // 15 degrees of freedom, p = 0.001 critical value 37.70.
  CHECK(chi2 < 37.70);
}

TEST_CASE("json layout") {
  const auto s = sample_ppp(Region{0, 1, 0, 1}, 10.0, 8);
  const auto j = to_json(s);
  CHECK(j.at("seed").get<std::uint64_t>() == 8);
  CHECK(j.at("region").size() == 4);
  CHECK(j.at("points").size() == s.size());
  CHECK(point_set_from_json(nlohmann::json::parse(j.dump())) == s);
}
