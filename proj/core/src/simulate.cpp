#include "gwshm/simulate.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "gwshm/errors.hpp"

namespace gwshm {
namespace fs = std::filesystem;

void ToneBurstSpec::validate() const {
  if (!(sample_rate > 0.0)) throw ValidationError("tone burst: sample rate must be positive");
  if (!(center_freq > 0.0)) throw ValidationError("tone burst: centre frequency must be positive");
  if (center_freq >= sample_rate / 2.0) {
    throw ValidationError("tone burst: centre frequency must be below the Nyquist frequency (" +
                          format_double(sample_rate / 2.0) + " Hz)");
  }
  if (n_cycles < 1) throw ValidationError("tone burst: need at least one cycle");
  if (!(amplitude > 0.0)) throw ValidationError("tone burst: amplitude must be positive");
}

std::size_t ToneBurstSpec::sample_count() const {
  return static_cast<std::size_t>(std::llround(duration() * sample_rate));
}

double ToneBurstSpec::value_at(double t) const {
  const double span = duration();
  if (t < 0.0 || t >= span) return 0.0;
  const double phase = 2.0 * std::numbers::pi * t / span;
  const double env = envelope == Envelope::Hamming ? 0.54 - 0.46 * std::cos(phase)
                                                   : 0.5 - 0.5 * std::cos(phase);
  const double carrier = std::cos(2.0 * std::numbers::pi * center_freq * (t - span / 2.0));
  return 0.5 * amplitude * env * carrier;
}

Signal tone_burst(const ToneBurstSpec& spec) {
  spec.validate();
  Signal s;
  s.sample_rate = spec.sample_rate;
  s.label = "actuation";
  s.samples.resize(spec.sample_count());
  for (std::size_t n = 0; n < s.samples.size(); ++n) {
    s.samples[n] = spec.value_at(static_cast<double>(n) / spec.sample_rate);
  }
  return s;
}

void DamageSpec::validate() const {
  if (!(attenuation > 0.0 && attenuation <= 1.0)) {
    throw ValidationError("damage '" + label + "': attenuation must lie in (0, 1]");
  }
  if (!(delay >= 0.0)) throw ValidationError("damage '" + label + "': delay must be >= 0");
  if (!(scatter_gain >= 0.0 && scatter_gain < 1.0)) {
    throw ValidationError("damage '" + label + "': scatter gain must lie in [0, 1)");
  }
}

namespace {

void add_burst(std::vector<double>& out, const ToneBurstSpec& burst, double onset, double gain) {
  const double fs = burst.sample_rate;
  const auto first = static_cast<std::size_t>(std::max(0.0, std::floor(onset * fs)));
  const auto last = static_cast<std::size_t>(std::ceil((onset + burst.duration()) * fs));
  for (std::size_t n = first; n <= last && n < out.size(); ++n) {
    // Work in samples and snap near-integers so that an onset on the sample
    // grid reproduces tone_burst exactly instead of gaining a rounding-edge sample.
    double lag = static_cast<double>(n) - onset * fs;
    if (std::abs(lag - std::round(lag)) < 1e-9) lag = std::round(lag);
    out[n] += gain * burst.value_at(lag / fs);
  }
}

}  // namespace

Signal propagate(const ToneBurstSpec& burst, const Propagation& prop, const DamageSpec& damage,
                 double noise_std, std::uint64_t seed) {
  burst.validate();
  damage.validate();
  if (!(prop.arrival_delay >= 0.0)) throw ValidationError("propagate: arrival delay must be >= 0");
  if (!(noise_std >= 0.0)) throw ValidationError("propagate: noise std must be >= 0");

  const double fs = burst.sample_rate;
  const double onset = prop.arrival_delay + damage.delay;
  const double echo_onset = onset + kEchoOffsetDurations * burst.duration();
  const double record = static_cast<double>(prop.length) / fs;
  if (onset + burst.duration() > record) {
    throw ValidationError("propagate: burst arriving at " + format_double(onset) +
                          " s does not fit in a record of " + std::to_string(prop.length) +
                          " samples");
  }
  if (damage.scatter_gain > 0.0 && echo_onset + burst.duration() > record) {
    throw ValidationError("propagate: scattered echo does not fit in the record");
  }

  Signal s;
  s.sample_rate = fs;
  s.label = damage.label;
  s.samples.assign(prop.length, 0.0);
  add_burst(s.samples, burst, onset, prop.path_gain * damage.attenuation);
  if (damage.scatter_gain > 0.0) {
    add_burst(s.samples, burst, echo_onset, prop.path_gain * damage.scatter_gain);
  }
  if (noise_std > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_std);
    for (double& v : s.samples) v += noise(rng);
  }
  return s;
}

double noise_std_for_snr(const ToneBurstSpec& burst, double path_gain, double snr_db) {
  const Signal b = tone_burst(burst);
  double energy = 0.0;
  for (double v : b.samples) energy += v * v;
  const double power = path_gain * path_gain * energy / static_cast<double>(b.samples.size());
  return std::sqrt(power / std::pow(10.0, snr_db / 10.0));
}

std::vector<DamageSpec> attenuation_ladder(std::size_t steps, double final_attenuation,
                                           double max_delay, double max_scatter) {
  std::vector<DamageSpec> ladder;
  ladder.reserve(steps);
  for (std::size_t i = 1; i <= steps; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(steps);
    DamageSpec d;
    d.attenuation = 1.0 - (1.0 - final_attenuation) * frac;
    d.delay = max_delay * frac;
    d.scatter_gain = max_scatter * frac;
    d.label = "d" + std::to_string(i);
    d.validate();
    ladder.push_back(d);
  }
  return ladder;
}

void Scenario::validate() const {
  burst.validate();
  if (n_baseline < 2) throw ValidationError("scenario: need at least 2 baseline records");
  if (!(noise_std >= 0.0)) throw ValidationError("scenario: noise std must be >= 0");
  if (damage_repeats < 1 && !damage.empty()) {
    throw ValidationError("scenario: damage repeats must be >= 1");
  }
  for (const auto& d : damage) {
    d.validate();
    if (d.label == baseline_label) {
      throw ValidationError("scenario: damage label '" + d.label + "' collides with the baseline label");
    }
  }
  const auto arrival = static_cast<std::size_t>(
      std::llround(propagation.arrival_delay * burst.sample_rate));
  const std::size_t start = arrival > packet_lead ? arrival - packet_lead : 0;
  if (start + packet_length > propagation.length) {
    throw ValidationError("scenario: first-packet window exceeds the record length");
  }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SyntheticDataset generate_dataset(const Scenario& scenario) {
  scenario.validate();
  SyntheticDataset ds;
  DatasetManifest& m = ds.manifest;
  m.sample_rate = scenario.burst.sample_rate;
  m.baseline_label = scenario.baseline_label;
  m.center_frequency = scenario.burst.center_freq;
  m.n_cycles = scenario.burst.n_cycles;

  const auto arrival = static_cast<std::size_t>(
      std::llround(scenario.propagation.arrival_delay * scenario.burst.sample_rate));
  const std::size_t start = arrival > scenario.packet_lead ? arrival - scenario.packet_lead : 0;
  m.windows.push_back({"first-packet", start, scenario.packet_length, false, 0.1});
  m.windows.push_back({"full", 0, scenario.propagation.length, false, 0.1});
  m.windows.push_back({"auto-packet", 0, scenario.packet_length, true, 0.1});

  auto pad = [](std::size_t v, int width) {
    std::string s = std::to_string(v);
    return std::string(s.size() < static_cast<std::size_t>(width) ? width - s.size() : 0, '0') + s;
  };

  std::uint64_t index = 0;
  DamageSpec healthy;
  healthy.label = scenario.baseline_label;
  for (std::size_t i = 0; i < scenario.n_baseline; ++i, ++index) {
    ds.signals.push_back(propagate(scenario.burst, scenario.propagation, healthy, scenario.noise_std,
                                   derive_seed(scenario.seed, index)));
    m.entries.push_back({"signals/" + scenario.baseline_label + "_" + pad(i, 3) + ".csv",
                         scenario.baseline_label, scenario.path_id, scenario.set_id});
  }
  for (const auto& d : scenario.damage) {
    for (std::size_t r = 0; r < scenario.damage_repeats; ++r, ++index) {
      ds.signals.push_back(propagate(scenario.burst, scenario.propagation, d, scenario.noise_std,
                                     derive_seed(scenario.seed, index)));
      m.entries.push_back({"signals/" + d.label + "_" + pad(r, 3) + ".csv", d.label,
                           scenario.path_id, scenario.set_id});
    }
  }
  return ds;
}

fs::path synth_dataset(const Scenario& scenario, const fs::path& dir) {
  SyntheticDataset ds = generate_dataset(scenario);
  ds.manifest.base_dir = dir;
  for (std::size_t i = 0; i < ds.signals.size(); ++i) {
    write_signal_csv(ds.signals[i], dir / ds.manifest.entries[i].file);
  }
  const fs::path manifest = dir / "manifest.txt";
  write_manifest(ds.manifest, manifest);
  return manifest;
}

}  // namespace gwshm
