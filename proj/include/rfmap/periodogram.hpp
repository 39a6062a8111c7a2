#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rfmap {

inline constexpr double kPsdFloorDbmPerHz = -300.0;

struct IqBlock {
  std::vector<std::complex<double>> samples;
  double sample_rate_hz = 2.048e6;
  double center_freq_hz = 0.0;
  double gain_db = 0.0;
};

// Power spectral density over absolute RF frequency. Bins are uniformly
// spaced by resolution_hz and freqs_hz holds bin centers.
struct Psd {
  std::vector<double> freqs_hz;
  std::vector<double> values_dbm_per_hz;
  double resolution_hz = 0.0;
  // mW per unit |x|^2 before the gain correction.
  double calibration = 1.0;

  std::size_t size() const { return freqs_hz.size(); }
};

enum class Window { kHann, kHamming, kRectangular };

Window parse_window(std::string_view name);  // throws ContractViolation
std::vector<double> make_window(Window w, std::size_t n);

struct WelchOptions {
  std::size_t segment_len = 256;
  double overlap = 0.5;  // fraction in [0, 1)
  Window window = Window::kHann;
  double calibration = 1.0;
};

// Welch estimate for complex baseband samples. Segments of segment_len are
// windowed, transformed and their |X|^2 averaged; the two-sided spectrum is
// shifted so frequencies increase from center - fs/2. Scaling is
// |X|^2 / (fs * sum(w^2)), so sum(PSD) * resolution equals the mean |x|^2 of
// white input. Values are converted to dBm/Hz with
//   mW = calibration * |x|^2 / 10^(gain_db / 10)
// and clamped below at -300 dBm/Hz.
Psd welch_psd(const IqBlock& block, const WelchOptions& opts = {});

// Sum of linear PSD over bins whose centers lie in [f_lo, f_hi], times the
// bin width, in dBm. Throws EmptyInput when no bin center is in range.
double band_power_dbm(const Psd& psd, double f_lo_hz, double f_hi_hz);

nlohmann::json to_json(const Psd& psd);
Psd psd_from_json(const nlohmann::json& j);

enum class IqFormat { kU8, kF32 };

IqFormat parse_iq_format(std::string_view name);  // "u8" or "f32"

// Interleaved little-endian I/Q pairs. u8 is RTL-SDR offset binary,
// decoded as (b - 127.5) / 127.5.
std::vector<std::complex<double>> decode_iq(std::span<const std::uint8_t> bytes,
                                            IqFormat format);
std::vector<std::complex<double>> read_iq_file(const std::filesystem::path& path,
                                               IqFormat format);

}  // namespace rfmap
