#include "rfmap/periodogram.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>

#include "rfmap/errors.hpp"
#include "rfmap/fft.hpp"

namespace rfmap {

Window parse_window(std::string_view name) {
  if (name == "hann") return Window::kHann;
  if (name == "hamming") return Window::kHamming;
  if (name == "rect" || name == "rectangular" || name == "boxcar") return Window::kRectangular;
  throw ContractViolation("unknown window '" + std::string(name) + "'");
}

// Periodic (DFT-even) windows, the usual choice for spectral averaging.
std::vector<double> make_window(Window w, std::size_t n) {
  std::vector<double> out(n, 1.0);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(step * static_cast<double>(i));
    switch (w) {
      case Window::kHann: out[i] = 0.5 - 0.5 * c; break;
      case Window::kHamming: out[i] = 0.54 - 0.46 * c; break;
      case Window::kRectangular: break;
    }
  }
  return out;
}

Psd welch_psd(const IqBlock& block, const WelchOptions& opts) {
  const std::size_t n = opts.segment_len;
  if (!is_power_of_two(n)) {
    throw ContractViolation("segment length must be a power of two, got " + std::to_string(n));
  }
  if (!(opts.overlap >= 0.0 && opts.overlap < 1.0)) {
    throw ContractViolation("overlap must be in [0, 1)");
  }
  if (!(block.sample_rate_hz > 0.0)) throw ContractViolation("sample rate must be > 0");
  if (block.samples.size() < n) {
    throw ContractViolation("need at least " + std::to_string(n) + " samples, got " +
                            std::to_string(block.samples.size()));
  }
  for (const auto& s : block.samples) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      throw ContractViolation("IQ samples contain NaN or infinity");
    }
  }

  const auto window = make_window(opts.window, n);
  double window_power = 0.0;
  for (double w : window) window_power += w * w;

  const auto overlap_len = static_cast<std::size_t>(std::floor(opts.overlap * static_cast<double>(n)));
  const std::size_t hop = std::max<std::size_t>(1, n - overlap_len);

  std::vector<double> acc(n, 0.0);
  std::vector<std::complex<double>> buf(n);
  std::size_t segments = 0;
  for (std::size_t start = 0; start + n <= block.samples.size(); start += hop) {
    for (std::size_t i = 0; i < n; ++i) buf[i] = block.samples[start + i] * window[i];
    fft_radix2(buf);
    for (std::size_t k = 0; k < n; ++k) acc[k] += std::norm(buf[k]);
    ++segments;
  }

  const double fs = block.sample_rate_hz;
  const double scale = opts.calibration / std::pow(10.0, block.gain_db / 10.0) /
                       (static_cast<double>(segments) * fs * window_power);

  Psd psd;
  psd.resolution_hz = fs / static_cast<double>(n);
  psd.calibration = opts.calibration;
  psd.freqs_hz.resize(n);
  psd.values_dbm_per_hz.resize(n);
  const std::size_t half = n / 2;
  for (std::size_t j = 0; j < n; ++j) {
    // Output bin j holds FFT bin (j + N/2) mod N.
    const std::size_t k = (j + half) % n;
    psd.freqs_hz[j] = block.center_freq_hz +
                      (static_cast<double>(j) - static_cast<double>(half)) * psd.resolution_hz;
    const double lin = acc[k] * scale;
    psd.values_dbm_per_hz[j] =
        lin > 0.0 ? std::max(kPsdFloorDbmPerHz, 10.0 * std::log10(lin)) : kPsdFloorDbmPerHz;
  }
  return psd;
}

double band_power_dbm(const Psd& psd, double f_lo_hz, double f_hi_hz) {
  if (!(f_hi_hz >= f_lo_hz)) throw ContractViolation("band must satisfy f_lo <= f_hi");
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < psd.size(); ++i) {
    if (psd.freqs_hz[i] >= f_lo_hz && psd.freqs_hz[i] <= f_hi_hz) {
      sum += std::pow(10.0, psd.values_dbm_per_hz[i] / 10.0);
      ++used;
    }
  }
  if (used == 0) throw EmptyInput("no PSD bin center falls inside the requested band");
  return 10.0 * std::log10(sum * psd.resolution_hz);
}

nlohmann::json to_json(const Psd& psd) {
  return {{"f_start_hz", psd.freqs_hz.empty() ? 0.0 : psd.freqs_hz.front()},
          {"bin_hz", psd.resolution_hz},
          {"calibration", psd.calibration},
          {"freqs_hz", psd.freqs_hz},
          {"psd_dbm_per_hz", psd.values_dbm_per_hz}};
}

Psd psd_from_json(const nlohmann::json& j) {
  Psd psd;
  psd.resolution_hz = j.at("bin_hz").get<double>();
  const double f0 = j.at("f_start_hz").get<double>();
  psd.values_dbm_per_hz = j.at("psd_dbm_per_hz").get<std::vector<double>>();
  if (j.contains("calibration")) psd.calibration = j.at("calibration").get<double>();
  psd.freqs_hz.resize(psd.values_dbm_per_hz.size());
  for (std::size_t i = 0; i < psd.freqs_hz.size(); ++i) {
    psd.freqs_hz[i] = f0 + static_cast<double>(i) * psd.resolution_hz;
  }
  return psd;
}

IqFormat parse_iq_format(std::string_view name) {
  if (name == "u8") return IqFormat::kU8;
  if (name == "f32") return IqFormat::kF32;
  throw ContractViolation("unknown IQ format '" + std::string(name) + "' (expected u8 or f32)");
}

std::vector<std::complex<double>> decode_iq(std::span<const std::uint8_t> bytes,
                                            IqFormat format) {
  std::vector<std::complex<double>> out;
  if (format == IqFormat::kU8) {
    if (bytes.size() % 2 != 0) throw ContractViolation("u8 IQ data has an odd byte count");
    out.reserve(bytes.size() / 2);
    for (std::size_t i = 0; i + 1 < bytes.size(); i += 2) {
      out.emplace_back((bytes[i] - 127.5) / 127.5, (bytes[i + 1] - 127.5) / 127.5);
    }
    return out;
  }
  if (bytes.size() % 8 != 0) throw ContractViolation("f32 IQ data is not a whole number of pairs");
  auto read_f32 = [&](std::size_t off) {
    std::uint32_t bits = 0;
    for (int b = 3; b >= 0; --b) bits = (bits << 8) | bytes[off + static_cast<std::size_t>(b)];
    return static_cast<double>(std::bit_cast<float>(bits));
  };
  out.reserve(bytes.size() / 8);
  for (std::size_t i = 0; i < bytes.size(); i += 8) out.emplace_back(read_f32(i), read_f32(i + 4));
  return out;
}

std::vector<std::complex<double>> read_iq_file(const std::filesystem::path& path,
                                               IqFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open IQ file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_iq(bytes, format);
}

}  // namespace rfmap
