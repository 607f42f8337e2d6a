#include "run_config.hpp"

#include <algorithm>
#include <cctype>

#include "gwshm/errors.hpp"
#include "gwshm/io.hpp"

namespace gwshm::cli {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) {
    if (!part.empty()) out.push_back(parse_double(part, what));
  }
  if (out.empty()) throw ValidationError(what + ": empty list");
  return out;
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "run.manifest",         "run.output_dir",        "run.seed",
      "run.cases",            "welch.segment_length",  "welch.overlap",
      "welch.nfft",           "welch.window",          "welch.detrend",
      "detect.window",        "detect.metrics",        "detect.alphas",
      "detect.band",          "detect.holdout",        "detect.shuffle_seed",
      "detect.di_band",       "detect.janapati",       "roc.alpha_grid",
      "roc.labels",           "simulate.baselines",    "simulate.steps",
      "simulate.final_attenuation", "simulate.max_delay", "simulate.max_scatter",
      "simulate.snr_db",      "simulate.noise_std",    "simulate.center_freq",
      "simulate.cycles",      "simulate.amplitude",    "simulate.envelope",
      "simulate.sample_rate", "simulate.length",       "simulate.arrival",
      "simulate.path_gain",   "simulate.path_id",      "simulate.set_id",
      "simulate.repeats",
  };
  return keys;
}

Settings read_settings(const std::filesystem::path& file) {
  const KeyValueFile kv = KeyValueFile::load(file);
  Settings out;
  for (const auto& section : kv.sections()) {
    if (!section.rows.empty()) {
      throw ValidationError(file.string() + ": line '" + section.rows.front() +
                            "' is not a key = value pair");
    }
    for (const auto& [key, value] : section.values) {
      const std::string full = section.name.empty() ? key : section.name + "." + key;
      out[full] = value;
    }
  }
  return out;
}

RunConfig resolve_config(const Settings& file, const Settings& overrides,
                         const char* env_output_dir) {
  Settings s = file;
  if (env_output_dir != nullptr && *env_output_dir != '\0') s["run.output_dir"] = env_output_dir;
  for (const auto& [k, v] : overrides) s[k] = v;

  const auto& keys = known_keys();
  for (const auto& [k, v] : s) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw ValidationError("unknown setting '" + k + "'");
    }
  }

  RunConfig c;
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = s.find(key);
    return it == s.end() ? nullptr : &it->second;
  };

  if (auto v = get("run.manifest")) c.manifest = *v;
  if (auto v = get("run.output_dir")) {
    if (v->empty()) throw ValidationError("output directory must not be empty");
    c.output_dir = *v;
  }
  if (auto v = get("run.seed")) c.seed = parse_size(*v, "seed");
  if (auto v = get("run.cases")) c.cases = *v;

  WelchConfig& w = c.pipeline.welch;
  if (auto v = get("welch.segment_length")) w.segment_length = parse_size(*v, "segment length");
  if (auto v = get("welch.overlap")) w.overlap_fraction = parse_double(*v, "overlap");
  if (auto v = get("welch.nfft")) w.nfft = parse_size(*v, "nfft");
  if (auto v = get("welch.window")) w.window = parse_window_kind(*v);
  if (auto v = get("welch.detrend")) w.detrend_mean = parse_bool(*v, "detrend");
  w.validate();

  if (auto v = get("detect.window")) c.pipeline.window = *v;
  if (auto v = get("detect.metrics")) {
    c.metrics.clear();
    for (const auto& name : split(*v, ',')) {
      if (name.empty()) continue;
      const Metric m = parse_metric(name);
      if (std::find(c.metrics.begin(), c.metrics.end(), m) == c.metrics.end()) {
        c.metrics.push_back(m);
      }
    }
    if (c.metrics.empty()) throw ValidationError("metrics list is empty");
  }
  if (auto v = get("detect.alphas")) c.alphas = parse_list(*v, "alphas");
  for (double a : c.alphas) (void)Alpha(a);
  if (auto v = get("detect.band")) {
    const std::string b = lower(std::string(trim(*v)));
    if (b == "auto") {
      c.pipeline.band.reset();
    } else if (b == "full") {
      c.pipeline.band = FrequencyBand{};
    } else {
      const auto lohi = parse_list(*v, "band");
      if (lohi.size() != 2) throw ValidationError("band expects 'lo,hi' in Hz, 'auto' or 'full'");
      c.pipeline.band = FrequencyBand{lohi[0], lohi[1]};
    }
  }
  if (auto v = get("detect.holdout")) c.pipeline.holdout = parse_size(*v, "holdout");
  if (auto v = get("detect.shuffle_seed")) {
    c.pipeline.shuffle_seed = parse_size(*v, "shuffle seed");
  }
  if (auto v = get("detect.di_band")) c.pipeline.di_band_method = parse_band_method(*v);
  if (auto v = get("detect.janapati")) {
    const std::string j = lower(*v);
    if (j == "normalized") {
      c.pipeline.janapati_variant = JanapatiVariant::Normalized;
    } else if (j == "as-printed" || j == "asprinted") {
      c.pipeline.janapati_variant = JanapatiVariant::AsPrinted;
    } else {
      throw ValidationError("janapati variant must be 'normalized' or 'as-printed'");
    }
  }
  c.pipeline.validate();

  if (auto v = get("roc.alpha_grid")) {
    c.alpha_grid = parse_list(*v, "alpha grid");
    for (double a : c.alpha_grid) (void)Alpha(a);
  }
  if (auto v = get("roc.labels")) {
    for (const auto& l : split(*v, ',')) {
      if (!l.empty()) c.roc_labels.push_back(l);
    }
  }

  SimulateSettings& sim = c.simulate;
  Scenario& sc = sim.scenario;
  sc.seed = c.seed;
  if (auto v = get("simulate.baselines")) sc.n_baseline = parse_size(*v, "baselines");
  if (auto v = get("simulate.steps")) sim.ladder_steps = parse_size(*v, "ladder steps");
  if (auto v = get("simulate.final_attenuation")) {
    sim.final_attenuation = parse_double(*v, "final attenuation");
  }
  if (auto v = get("simulate.max_delay")) sim.max_delay = parse_double(*v, "max delay");
  if (auto v = get("simulate.max_scatter")) sim.max_scatter = parse_double(*v, "max scatter");
  if (auto v = get("simulate.snr_db")) sim.snr_db = parse_double(*v, "snr_db");
  if (auto v = get("simulate.noise_std")) {
    sc.noise_std = parse_double(*v, "noise std");
    sim.snr_db.reset();
  }
  if (auto v = get("simulate.center_freq")) sc.burst.center_freq = parse_double(*v, "center freq");
  if (auto v = get("simulate.cycles")) {
    sc.burst.n_cycles = static_cast<int>(parse_size(*v, "cycles"));
  }
  if (auto v = get("simulate.amplitude")) sc.burst.amplitude = parse_double(*v, "amplitude");
  if (auto v = get("simulate.envelope")) {
    const std::string e = lower(*v);
    if (e == "hamming") {
      sc.burst.envelope = Envelope::Hamming;
    } else if (e == "hanning" || e == "hann") {
      sc.burst.envelope = Envelope::Hanning;
    } else {
      throw ValidationError("envelope must be 'hamming' or 'hanning'");
    }
  }
  if (auto v = get("simulate.sample_rate")) sc.burst.sample_rate = parse_double(*v, "sample rate");
  if (auto v = get("simulate.length")) sc.propagation.length = parse_size(*v, "record length");
  if (auto v = get("simulate.arrival")) {
    sc.propagation.arrival_delay = parse_double(*v, "arrival delay");
  }
  if (auto v = get("simulate.path_gain")) sc.propagation.path_gain = parse_double(*v, "path gain");
  if (auto v = get("simulate.path_id")) sc.path_id = *v;
  if (auto v = get("simulate.set_id")) sc.set_id = *v;
  if (auto v = get("simulate.repeats")) sc.damage_repeats = parse_size(*v, "repeats");
  return c;
}

}  // namespace gwshm::cli
