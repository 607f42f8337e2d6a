#include "gwshm/spectral.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>

#include "fft.hpp"
#include "gwshm/errors.hpp"

namespace gwshm {

void Signal::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw ValidationError("signal '" + label + "': sample_rate must be positive");
  }
  if (samples.empty()) throw ValidationError("signal '" + label + "': no samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      throw ValidationError("signal '" + label + "': non-finite sample at index " +
                            std::to_string(i));
    }
  }
}

std::string_view to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::Hamming:
      return "hamming";
    case WindowKind::Bartlett:
      return "bartlett";
    case WindowKind::Rectangular:
      return "rectangular";
  }
  return "unknown";
}

WindowKind parse_window_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "hamming") return WindowKind::Hamming;
  if (lower == "bartlett" || lower == "triangular") return WindowKind::Bartlett;
  if (lower == "rectangular" || lower == "boxcar" || lower == "rect") {
    return WindowKind::Rectangular;
  }
  throw ValidationError("unsupported window kind '" + std::string(name) + "'");
}

Window make_window(WindowKind kind, std::size_t length) {
  if (length < 2) throw ValidationError("window length must be at least 2");
  Window w;
  w.samples.resize(length);
  const double last = static_cast<double>(length - 1);
  switch (kind) {
    case WindowKind::Hamming:
      for (std::size_t t = 0; t < length; ++t) {
        w.samples[t] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / last);
      }
      break;
    case WindowKind::Bartlett: {
      const double half = last / 2.0;
      for (std::size_t t = 0; t < length; ++t) {
        w.samples[t] = 1.0 - std::abs((static_cast<double>(t) - half) / half);
      }
      break;
    }
    case WindowKind::Rectangular:
      std::fill(w.samples.begin(), w.samples.end(), 1.0);
      break;
    default:
      throw ValidationError("unsupported window kind");
  }
  double sum_sq = 0.0;
  for (double v : w.samples) sum_sq += v * v;
  w.power = sum_sq / static_cast<double>(length);
  return w;
}

std::size_t WelchConfig::step() const {
  const double d = std::round(static_cast<double>(segment_length) * (1.0 - overlap_fraction));
  return d < 1.0 ? 0 : static_cast<std::size_t>(d);
}

std::size_t WelchConfig::window_count(std::size_t n) const {
  const std::size_t d = step();
  if (d == 0 || n < segment_length) return 0;
  return (n - segment_length) / d + 1;
}

void WelchConfig::validate() const {
  if (segment_length < 2) throw ValidationError("welch: segment length must be >= 2");
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
    throw ValidationError("welch: overlap fraction must lie in [0, 1)");
  }
  if (nfft < segment_length) throw ValidationError("welch: nfft must be >= segment length");
  if (step() < 1) throw ValidationError("welch: overlap leaves a zero step between segments");
}

void WelchConfig::validate_for(std::size_t n) const {
  validate();
  if (n < segment_length) {
    throw ValidationError("welch: signal length " + std::to_string(n) +
                          " is shorter than the segment length " +
                          std::to_string(segment_length));
  }
}

std::vector<double> PsdEstimate::freq_grid() const {
  std::vector<double> f(values.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = frequency(k);
  return f;
}

bool same_grid(const PsdEstimate& a, const PsdEstimate& b) {
  return a.sample_rate == b.sample_rate && a.config == b.config && a.k_windows == b.k_windows &&
         a.values.size() == b.values.size();
}

PsdEstimate welch_psd(std::span<const double> samples, double sample_rate,
                      const WelchConfig& config) {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw ValidationError("welch: sample_rate must be positive");
  }
  config.validate_for(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      throw ValidationError("welch: non-finite sample at index " + std::to_string(i));
    }
  }

  const std::size_t n = samples.size();
  const std::size_t len = config.segment_length;
  const std::size_t hop = config.step();
  const std::size_t k = config.window_count(n);
  const std::size_t bins = config.bin_count();
  const Window window = make_window(config.window, len);

  double mean = 0.0;
  if (config.detrend_mean) {
    mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
  }

  auto& fft = detail::RealFft::cached(config.nfft);
  auto in = fft.input();
  std::vector<double> acc(bins, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t start = i * hop;
    for (std::size_t t = 0; t < len; ++t) in[t] = window.samples[t] * (samples[start + t] - mean);
    std::fill(in.begin() + static_cast<std::ptrdiff_t>(len), in.end(), 0.0);
    const auto spectrum = fft.execute();
    for (std::size_t b = 0; b < bins; ++b) acc[b] += std::norm(spectrum[b]);
  }

  const double scale =
      1.0 / (sample_rate * static_cast<double>(len) * window.power * static_cast<double>(k));
  const bool has_nyquist = config.nfft % 2 == 0;
  PsdEstimate out;
  out.values.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const bool edge = b == 0 || (has_nyquist && b == bins - 1);
    out.values[b] = acc[b] * scale * (edge ? 1.0 : 2.0);
  }
  out.sample_rate = sample_rate;
  out.config = config;
  out.k_windows = k;
  out.n_samples = n;
  return out;
}

PsdEstimate welch_psd(const Signal& signal, const WelchConfig& config,
                      std::optional<AnalysisRange> range) {
  signal.validate();
  AnalysisRange r = range.value_or(AnalysisRange{0, signal.samples.size()});
  if (r.length == 0 || r.start > signal.samples.size() ||
      r.length > signal.samples.size() - r.start) {
    throw ValidationError("welch: analysis range [" + std::to_string(r.start) + ", " +
                          std::to_string(r.start + r.length) + ") exceeds signal '" +
                          signal.label + "' of " + std::to_string(signal.samples.size()) +
                          " samples");
  }
  return welch_psd(std::span<const double>(signal.samples).subspan(r.start, r.length),
                   signal.sample_rate, config);
}

WelchMoments welch_theoretical_moments(double true_psd_value, const WelchConfig& config,
                                       std::size_t n_samples) {
  if (config.window != WindowKind::Bartlett) {
    throw ValidationError("welch variance approximation is only defined for the Bartlett window");
  }
  config.validate_for(n_samples);
  if (!(true_psd_value >= 0.0)) throw ValidationError("true PSD value must be non-negative");

  const Window w = make_window(config.window, config.segment_length);
  const double len = static_cast<double>(config.segment_length);
  const double dc_gain = std::accumulate(w.samples.begin(), w.samples.end(), 0.0);

  WelchMoments m;
  m.mean_raw = true_psd_value * dc_gain * dc_gain / (2.0 * std::numbers::pi * len * w.power);
  m.mean_normalized = true_psd_value;
  m.variance = 9.0 / 16.0 * len / static_cast<double>(n_samples) * true_psd_value * true_psd_value;
  return m;
}

}  // namespace gwshm
