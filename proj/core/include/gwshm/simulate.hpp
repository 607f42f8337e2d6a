#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gwshm/io.hpp"
#include "gwshm/spectral.hpp"

namespace gwshm {

enum class Envelope { Hamming, Hanning };

/// n-cycle windowed sine actuation. The carrier is phased so that its central
/// crest coincides with the envelope maximum at t = duration / 2.
struct ToneBurstSpec {
  double center_freq = 250e3;  // Hz
  int n_cycles = 5;
  double amplitude = 90.0;  // volts peak-to-peak
  Envelope envelope = Envelope::Hamming;
  double sample_rate = 24e6;  // Hz

  void validate() const;
  double duration() const { return static_cast<double>(n_cycles) / center_freq; }
  std::size_t sample_count() const;
  /// Continuous-time burst value; zero outside [0, duration).
  double value_at(double t) const;
};

Signal tone_burst(const ToneBurstSpec& spec);

/// Phenomenological damage: amplitude loss, extra time of flight and a
/// delayed secondary echo.
struct DamageSpec {
  double attenuation = 1.0;   // multiplicative gain in (0, 1]
  double delay = 0.0;         // seconds
  double scatter_gain = 0.0;  // echo amplitude relative to the direct arrival, [0, 1)
  std::string label = "healthy";

  void validate() const;
  bool is_identity() const { return attenuation == 1.0 && delay == 0.0 && scatter_gain == 0.0; }
};

struct Propagation {
  double arrival_delay = 50e-6;  // seconds from record start to the direct arrival
  double path_gain = 1e-3;
  std::size_t length = 8000;  // samples in the received record
};

/// Echo lag after the (damaged) direct arrival, in burst durations.
inline constexpr double kEchoOffsetDurations = 2.0;

/// Received record: path_gain * attenuation * burst(t - arrival - delay)
/// + path_gain * scatter_gain * burst(t - arrival - delay - echo_offset)
/// + N(0, noise_std^2) white noise drawn from `seed`.
Signal propagate(const ToneBurstSpec& burst, const Propagation& prop, const DamageSpec& damage,
                 double noise_std, std::uint64_t seed);

/// Noise standard deviation giving `snr_db` against the received burst power
/// (mean square over the burst duration, identity damage).
double noise_std_for_snr(const ToneBurstSpec& burst, double path_gain, double snr_db);

/// `steps` damage states with attenuation falling linearly from 1 to
/// `final_attenuation` (the undamaged state itself excluded) and delay and
/// echo gain rising linearly to their maxima. Labels are d1, d2, ...
std::vector<DamageSpec> attenuation_ladder(std::size_t steps, double final_attenuation = 0.5,
                                           double max_delay = 50e-9, double max_scatter = 0.0);

struct Scenario {
  ToneBurstSpec burst;
  Propagation propagation;
  std::string path_id = "2-6";
  std::string set_id = "1";
  std::string baseline_label = "healthy";
  std::size_t n_baseline = 20;
  std::vector<DamageSpec> damage;
  std::size_t damage_repeats = 1;
  double noise_std = 0.0;
  std::uint64_t seed = 1;
  /// Samples kept before the nominal arrival in the "first-packet" window.
  std::size_t packet_lead = 10;
  std::size_t packet_length = 500;

  void validate() const;
};

struct SyntheticDataset {
  DatasetManifest manifest;
  std::vector<Signal> signals;  // parallel to manifest.entries
};

/// Builds every record in memory. Baselines differ only by noise realisation;
/// record i draws its noise from a seed derived from (scenario.seed, i).
SyntheticDataset generate_dataset(const Scenario& scenario);

/// generate_dataset plus signal CSVs under dir/signals and dir/manifest.txt.
/// Returns the manifest path.
std::filesystem::path synth_dataset(const Scenario& scenario, const std::filesystem::path& dir);

/// Per-record seed derivation (SplitMix64 finaliser).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace gwshm
