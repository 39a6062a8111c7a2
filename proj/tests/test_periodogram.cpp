#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

#include "oracles.hpp"
#include "rfmap/errors.hpp"
#include "rfmap/fft.hpp"
#include "rfmap/periodogram.hpp"
#include "rfmap/rng.hpp"

using namespace rfmap;
using cd = std::complex<double>;

namespace {

std::vector<cd> white_noise(std::size_t n, double power, std::uint64_t seed) {
  Rng rng(seed);
  const double sd = std::sqrt(power / 2.0);
  std::vector<cd> x(n);
  for (auto& v : x) v = {rng.normal(0.0, sd), rng.normal(0.0, sd)};
  return x;
}

std::vector<cd> tone(std::size_t n, double amp, double f, double fs) {
  std::vector<cd> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::polar(amp, 2.0 * std::numbers::pi * f * static_cast<double>(i) / fs);
  }
  return x;
}

double linear_mean(const Psd& p) {
  double s = 0.0;
  for (double v : p.values_dbm_per_hz) s += std::pow(10.0, v / 10.0);
  return s / static_cast<double>(p.size());
}

}  // namespace

TEST_CASE("fft matches a naive DFT") {
  for (std::size_t n : {1u, 2u, 8u, 64u, 512u}) {
    auto x = white_noise(n, 1.0, n);
    const auto ref = oracle::naive_dft(x);
    fft_radix2(x);
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(x[k] - ref[k]));
    CHECK(worst <= 1e-10 * static_cast<double>(n));
  }
  std::vector<cd> bad(12);
  CHECK_THROWS_AS(fft_radix2(bad), ContractViolation);
}

TEST_CASE("windows") {
  const auto h = make_window(Window::kHann, 8);
  CHECK(h[0] == 0.0);
  CHECK(h[4] == doctest::Approx(1.0));
  CHECK(h[2] == doctest::Approx(0.5));
  const auto r = make_window(Window::kRectangular, 5);
  CHECK(std::accumulate(r.begin(), r.end(), 0.0) == 5.0);
  CHECK(parse_window("boxcar") == Window::kRectangular);
  CHECK(parse_window("hamming") == Window::kHamming);
  CHECK_THROWS_AS(parse_window("kaiser"), ContractViolation);
}

TEST_CASE("white noise gives a flat spectrum at the expected level") {
  const double fs = 2.048e6, power = 0.37;
  IqBlock b{white_noise(1 << 18, power, 3), fs, 1e9, 0.0};
  const auto p = welch_psd(b);
  REQUIRE(p.size() == 256);
  const double expect = power / fs;
  CHECK(std::fabs(linear_mean(p) / expect - 1.0) < 0.05);
  for (double v : p.values_dbm_per_hz) CHECK(std::fabs(v - 10.0 * std::log10(expect)) < 1.5);
  CHECK(p.resolution_hz == doctest::Approx(fs / 256));
  CHECK(p.freqs_hz.front() == doctest::Approx(1e9 - fs / 2));
  CHECK(p.freqs_hz[128] == doctest::Approx(1e9));
}

TEST_CASE("a complex tone integrates to its power and peaks at its bin") {
  const double fs = 1.024e6, amp = 0.3;
  const double f0 = 40.0 * fs / 256.0;
  IqBlock b{tone(4096, amp, f0, fs), fs, 915e6, 0.0};
  const auto p = welch_psd(b);
  const double total = linear_mean(p) * static_cast<double>(p.size()) * p.resolution_hz;
  CHECK(std::fabs(total / (amp * amp) - 1.0) < 0.01);
  const auto peak = std::max_element(p.values_dbm_per_hz.begin(), p.values_dbm_per_hz.end()) -
                    p.values_dbm_per_hz.begin();
  CHECK(p.freqs_hz[static_cast<std::size_t>(peak)] == doctest::Approx(915e6 + f0));
  // Negative frequency lands below the center.
  IqBlock n{tone(4096, amp, -f0, fs), fs, 915e6, 0.0};
  const auto q = welch_psd(n);
  const auto qpeak = std::max_element(q.values_dbm_per_hz.begin(), q.values_dbm_per_hz.end()) -
                     q.values_dbm_per_hz.begin();
  CHECK(q.freqs_hz[static_cast<std::size_t>(qpeak)] == doctest::Approx(915e6 - f0));
}

TEST_CASE("all-zero input is clamped to the floor") {
  IqBlock b{std::vector<cd>(1024), 1e6, 0.0, 0.0};
  const auto p = welch_psd(b);
  for (double v : p.values_dbm_per_hz) CHECK(v == kPsdFloorDbmPerHz);
}

TEST_CASE("band power") {
  Psd flat;
  flat.resolution_hz = 1000.0;
  for (int i = 0; i < 100; ++i) {
    flat.freqs_hz.push_back(1e9 + 1000.0 * i);
    flat.values_dbm_per_hz.push_back(-150.0);
  }
  // 100 bins x 1 kHz: 10 log10(1e5) over the density.
  CHECK(band_power_dbm(flat, 0.0, 2e9) == doctest::Approx(-150.0 + 50.0).epsilon(1e-12));
  const double half = band_power_dbm(flat, 1e9, 1e9 + 49'500.0);
  CHECK(half == doctest::Approx(-100.0 - 10.0 * std::log10(2.0)).epsilon(1e-12));
  // Edges are inclusive at bin centers.
  CHECK(band_power_dbm(flat, 1e9 + 5000.0, 1e9 + 5000.0) ==
        doctest::Approx(-150.0 + 30.0).epsilon(1e-12));
  CHECK_THROWS_AS(band_power_dbm(flat, 3e9, 4e9), EmptyInput);
  CHECK_THROWS_AS(band_power_dbm(flat, 2e9, 1e9), ContractViolation);
}

TEST_CASE("full-span band power equals mean sample power") {
  const double fs = 2.048e6;
  for (double power : {1e-6, 0.01, 2.5}) {
    IqBlock b{white_noise(1 << 16, power, 9), fs, 100e6, 0.0};
    const auto p = welch_psd(b);
    const double est = band_power_dbm(p, 0.0, 1e12);
    double mean = 0.0;
    for (auto v : b.samples) mean += std::norm(v);
    mean /= static_cast<double>(b.samples.size());
    CHECK(std::fabs(est - 10.0 * std::log10(mean)) < 0.25);
  }
}

TEST_CASE("gain and calibration shift the spectrum exactly") {
  IqBlock b{white_noise(8192, 1.0, 5), 2.048e6, 1e9, 0.0};
  const auto p0 = welch_psd(b);
  b.gain_db = 20.0;
  const auto p1 = welch_psd(b);
  WelchOptions cal;
  cal.calibration = 10.0;
  b.gain_db = 0.0;
  const auto p2 = welch_psd(b, cal);
  for (std::size_t i = 0; i < p0.size(); ++i) {
    CHECK(std::fabs(p0.values_dbm_per_hz[i] - p1.values_dbm_per_hz[i] - 20.0) < 1e-9);
    CHECK(std::fabs(p2.values_dbm_per_hz[i] - p0.values_dbm_per_hz[i] - 10.0) < 1e-9);
  }
  CHECK(p2.calibration == 10.0);
}

TEST_CASE("overlap choice does not bias band power") {
  IqBlock b{white_noise(1 << 17, 0.5, 21), 2.048e6, 1e9, 0.0};
  WelchOptions a, c;
  a.overlap = 0.0;
  c.overlap = 0.75;
  const double pa = band_power_dbm(welch_psd(b, a), 0, 1e12);
  const double pb = band_power_dbm(welch_psd(b), 0, 1e12);
  const double pc = band_power_dbm(welch_psd(b, c), 0, 1e12);
  CHECK(std::fabs(pa - pb) < 0.1);
  CHECK(std::fabs(pc - pb) < 0.1);
}

TEST_CASE("invalid welch arguments") {
  IqBlock b{white_noise(1024, 1.0, 1), 1e6, 0.0, 0.0};
  WelchOptions o;
  o.segment_len = 100;
  CHECK_THROWS_AS(welch_psd(b, o), ContractViolation);
  o.segment_len = 2048;
  CHECK_THROWS_AS(welch_psd(b, o), ContractViolation);
  o = {};
  o.overlap = 1.0;
  CHECK_THROWS_AS(welch_psd(b, o), ContractViolation);
  o = {};
  b.sample_rate_hz = 0.0;
  CHECK_THROWS_AS(welch_psd(b, o), ContractViolation);
  b.sample_rate_hz = 1e6;
  b.samples[3] = {std::nan(""), 0.0};
  CHECK_THROWS_AS(welch_psd(b, o), ContractViolation);
}

TEST_CASE("iq decoding") {
  const std::vector<std::uint8_t> u8{0, 255, 127, 128};
  const auto x = decode_iq(u8, IqFormat::kU8);
  REQUIRE(x.size() == 2);
  CHECK(x[0] == cd(-1.0, 1.0));
  CHECK(x[1].real() == doctest::Approx(-0.5 / 127.5));
  CHECK(x[1].imag() == doctest::Approx(0.5 / 127.5));
  const std::vector<std::uint8_t> odd{1, 2, 3};
  CHECK_THROWS_AS(decode_iq(odd, IqFormat::kU8), ContractViolation);

  const std::vector<std::uint8_t> f32{0x00, 0x00, 0x80, 0x3f, 0x00, 0x00, 0x00, 0xc0};
  const auto y = decode_iq(f32, IqFormat::kF32);
  REQUIRE(y.size() == 1);
  CHECK(y[0] == cd(1.0, -2.0));
  CHECK_THROWS_AS(decode_iq(std::span(f32).first(6), IqFormat::kF32), ContractViolation);
  CHECK(parse_iq_format("f32") == IqFormat::kF32);
  CHECK_THROWS_AS(parse_iq_format("s16"), ContractViolation);
  CHECK_THROWS_AS(read_iq_file("/nonexistent/file.iq", IqFormat::kU8), IoError);
}

TEST_CASE("psd json round trip") {
  IqBlock b{white_noise(512, 1.0, 2), 2.048e6, 1e9, 0.0};
  const auto p = welch_psd(b);
  const auto q = psd_from_json(to_json(p));
  REQUIRE(q.size() == p.size());
  CHECK(q.values_dbm_per_hz == p.values_dbm_per_hz);
  CHECK(q.freqs_hz.front() == doctest::Approx(p.freqs_hz.front()));
  CHECK(q.freqs_hz.back() == doctest::Approx(p.freqs_hz.back()));
}
