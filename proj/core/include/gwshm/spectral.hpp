#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gwshm {

/// One actuator->sensor record: uniformly sampled real amplitudes (volts).
struct Signal {
  std::vector<double> samples;
  double sample_rate = 0.0;  // Hz
  std::string label;
  std::size_t t0_offset = 0;  // sample index where the analysis window begins

  /// Throws ValidationError unless sample_rate > 0, samples nonempty and finite.
  void validate() const;
};

enum class WindowKind { Hamming, Bartlett, Rectangular };

std::string_view to_string(WindowKind kind);
/// Case-insensitive; throws ValidationError for unknown names.
WindowKind parse_window_kind(std::string_view name);

struct Window {
  std::vector<double> samples;
  /// Mean squared window value, U = (1/L) sum w^2.
  double power = 0.0;
};

/// Symmetric (non-periodic) windows of length L >= 2. Bartlett is zero at both ends.
Window make_window(WindowKind kind, std::size_t length);

struct WelchConfig {
  std::size_t segment_length = 100;
  double overlap_fraction = 0.5;
  std::size_t nfft = 2000;
  WindowKind window = WindowKind::Hamming;
  bool detrend_mean = true;

  /// Hop between consecutive segments, round(L * (1 - overlap)).
  std::size_t step() const;
  /// Number of averaged (possibly overlapping) segments that fit in n samples;
  /// zero when n < L.
  std::size_t window_count(std::size_t n) const;
  /// Number of one-sided frequency bins, nfft/2 + 1.
  std::size_t bin_count() const { return nfft / 2 + 1; }

  void validate() const;
  /// validate() plus K >= 1 for a signal of n samples.
  void validate_for(std::size_t n) const;

  bool operator==(const WelchConfig&) const = default;
};

/// Contiguous slice [start, start + length) of a signal.
struct AnalysisRange {
  std::size_t start = 0;
  std::size_t length = 0;
};

struct PsdEstimate {
  std::vector<double> values;  // one-sided, power per Hz
  double sample_rate = 0.0;
  WelchConfig config;
  std::size_t k_windows = 0;
  std::size_t n_samples = 0;

  double resolution() const { return sample_rate / static_cast<double>(config.nfft); }
  double frequency(std::size_t bin) const { return static_cast<double>(bin) * resolution(); }
  std::vector<double> freq_grid() const;
};

/// True when both estimates share sample rate, configuration and K, i.e. their
/// bins are directly comparable.
bool same_grid(const PsdEstimate& a, const PsdEstimate& b);

/// One-sided Welch PSD of the samples in `range` (default: the whole signal).
///
/// Each segment of L samples is multiplied by the window, zero padded to nfft
/// and transformed; periodograms are scaled by 1/(fs * L * U) and averaged
/// over the K segments. Interior bins are doubled (DC and, for even nfft,
/// Nyquist are not), so that sum(values) * df equals the mean-square power.
/// When detrend_mean is set the mean of the whole range is removed once.
PsdEstimate welch_psd(const Signal& signal, const WelchConfig& config,
                      std::optional<AnalysisRange> range = std::nullopt);

/// Same estimator over a raw sample span.
PsdEstimate welch_psd(std::span<const double> samples, double sample_rate,
                      const WelchConfig& config);

/// Sampling moments of the Welch estimate for a Bartlett window.
///
/// The mean expression (1/(2 pi L U)) S |W(w)|^2 is reported two ways because
/// its normalisation mixes angular and ordinary frequency: `mean_raw` evaluates
/// it literally at the window's main-lobe peak, |W(0)|^2 = (sum w)^2, and
/// `mean_normalized` integrates |W|^2 over the band, which for a locally flat
/// spectrum returns S itself. `variance` is (9/16) (L/N) S^2.
struct WelchMoments {
  double mean_raw = 0.0;
  double mean_normalized = 0.0;
  double variance = 0.0;
};

/// Throws ValidationError for any window other than Bartlett.
WelchMoments welch_theoretical_moments(double true_psd_value, const WelchConfig& config,
                                       std::size_t n_samples);

}  // namespace gwshm
