#include "commands.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "gwshm/errors.hpp"
#include "gwshm/io.hpp"
#include "gwshm/pipeline.hpp"
#include "gwshm/simulate.hpp"

namespace gwshm::cli {
namespace fs = std::filesystem;

void OutputSet::add(fs::path path, std::string text) {
  files.push_back({std::move(path), std::move(text)});
}

void OutputSet::write(const fs::path& root) const {
  for (const auto& f : files) write_text_file(root / f.path, f.text);
}

namespace {

// Filesystem-safe name for an entry file: directories flattened, extension dropped.
std::string stem_of(const std::string& file) {
  fs::path p(file);
  p.replace_extension();
  std::string s = p.generic_string();
  for (char& c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return s;
}

std::string safe(const std::string& id) { return stem_of(id + ".x"); }

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

LoadedDataset load(const RunConfig& config) {
  if (config.manifest.empty()) {
    throw ValidationError("no manifest given (use --manifest or run.manifest in the config file)");
  }
  LoadedDataset data = load_dataset(config.manifest);
  const PacketWindow& w = data.manifest.window(config.pipeline.window);
  config.pipeline.welch.validate_for(w.length);
  return data;
}

std::string band_csv(const std::vector<double>& freq, const ConfidenceBand& band) {
  std::ostringstream os;
  os << "freq_hz,center,lower,upper\n";
  for (std::size_t k = 0; k < freq.size(); ++k) {
    os << format_double(freq[k]) << "," << format_double(band.center[k]) << ","
       << format_double(band.lower[k]) << "," << format_double(band.upper[k]) << "\n";
  }
  return os.str();
}

std::string curve_csv(const StatSeries& s) {
  std::ostringstream os;
  os << "freq_hz,value,lower,upper\n";
  for (std::size_t k : s.decision_bins) {
    os << format_double(s.frequencies[k]) << "," << format_double(s.values[k]) << ","
       << format_double(s.lower_threshold) << "," << format_double(s.upper_threshold) << "\n";
  }
  return os.str();
}

}  // namespace

OutputSet cmd_psd(const RunConfig& config) {
  const LoadedDataset data = load(config);
  const Alpha alpha(config.alphas.front());
  OutputSet out;
  for (const auto& path : data.manifest.path_ids()) {
    for (const auto& set : data.manifest.set_ids(path)) {
      const fs::path dir = fs::path("psd") / safe(path) / safe(set);
      std::vector<PsdEstimate> baselines;
      for (std::size_t i = 0; i < data.manifest.entries.size(); ++i) {
        const auto& e = data.manifest.entries[i];
        if (e.path_id != path || e.set_id != set) continue;
        const Signal pkt = extract_packet(data.signals[i], config.pipeline.window, data.manifest);
        PsdEstimate psd = welch_psd(pkt, config.pipeline.welch);
        std::ostringstream os;
        os << "freq_hz,psd\n";
        for (std::size_t k = 0; k < psd.values.size(); ++k) {
          os << format_double(psd.frequency(k)) << "," << format_double(psd.values[k]) << "\n";
        }
        out.add(dir / (stem_of(e.file) + ".csv"), os.str());
        if (data.manifest.is_baseline(e)) baselines.push_back(std::move(psd));
      }
      const auto freq = baselines.front().freq_grid();
      out.add(dir / "baseline_theoretical_band.csv",
              band_csv(freq, theoretical_band(baselines.front(), alpha)));
      if (baselines.size() >= 2 || config.pipeline.di_band_method == BandMethod::Percentile) {
        std::vector<std::vector<double>> curves;
        for (const auto& b : baselines) curves.push_back(b.values);
        out.add(dir / "baseline_experimental_band.csv",
                band_csv(freq, experimental_band(curves, alpha, config.pipeline.di_band_method)));
      }
    }
  }
  return out;
}

OutputSet cmd_detect(const RunConfig& config) {
  if (config.metrics.empty()) throw ValidationError("metrics list is empty");
  const LoadedDataset data = load(config);
  std::vector<DetectionReport> reports;
  OutputSet out;
  for (const auto& path : data.manifest.path_ids()) {
    std::vector<DetectionReport> per_alpha;
    for (double a : config.alphas) {
      DetectionReport r;
      r.path_id = path;
      r.window = config.pipeline.window;
      r.band = resolve_band(data.manifest, config.pipeline);
      r.alpha = a;
      r.holdout = config.pipeline.holdout;
      per_alpha.push_back(std::move(r));
    }
    for (Metric m : config.metrics) {
      const MetricCases scored = score_path(data, path, m, config.pipeline);
      for (auto& r : per_alpha) {
        if (m == Metric::Fm || m == Metric::Z) r.train_count = scored.train_count;
        r.results.push_back(tally(scored, data.manifest, Alpha(r.alpha)));
      }
      if (is_damage_index(m)) continue;
      // Curves at the first alpha. F is written against the first reference of each set only.
      const fs::path dir = fs::path("detect") / "curves" / safe(path) / std::string(to_string(m));
      std::map<std::string, std::size_t> first_reference;
      for (const auto& c : scored.cases) {
        const auto& entry = data.manifest.entries[c.entry];
        std::string name = stem_of(entry.file);
        if (c.reference) {
          const auto [it, inserted] = first_reference.emplace(entry.set_id, *c.reference);
          if (it->second != *c.reference) continue;
          name += "__vs__" + stem_of(data.manifest.entries[*c.reference].file);
        }
        const StatSeries s = rethreshold(c.series, Alpha(config.alphas.front()));
        out.add(dir / (name + ".csv"), curve_csv(s));
      }
    }
    for (auto& r : per_alpha) reports.push_back(std::move(r));
  }
  const auto tables = summary_table(reports);
  out.add(fs::path("detect") / "cases.csv", format_cases_csv(reports));
  out.add(fs::path("detect") / "summary.csv", render_csv(tables));
  out.add(fs::path("detect") / "summary.txt", render_text(tables));
  return out;
}

OutputSet cmd_roc(const RunConfig& config) {
  if (config.metrics.empty()) throw ValidationError("metrics list is empty");
  const LoadedDataset data = load(config);
  const std::vector<double> grid =
      config.alpha_grid.empty() ? default_alpha_grid() : config.alpha_grid;
  OutputSet out;
  std::ostringstream summary;
  summary << "path_id,metric,train_count,holdout,auc\n";
  for (const auto& path : data.manifest.path_ids()) {
    for (Metric m : config.metrics) {
      const MetricCases scored = score_path(data, path, m, config.pipeline);
      const RocCurve curve = roc_sweep(scored, data.manifest, grid, config.roc_labels);
      std::ostringstream os;
      os << "alpha,fpr,tpr\n";
      for (const auto& p : curve.points) {
        os << format_double(p.alpha) << "," << format_double(p.fpr) << "," << format_double(p.tpr)
           << "\n";
      }
      os << "# auc," << fixed6(curve.auc) << "\n";
      out.add(fs::path("roc") / ("roc_" + safe(path) + "_" + std::string(to_string(m)) + ".csv"),
              os.str());
      summary << path << "," << to_string(m) << "," << curve.train_count << "," << curve.holdout
              << "," << fixed6(curve.auc) << "\n";
    }
  }
  out.add(fs::path("roc") / "roc_summary.csv", summary.str());
  return out;
}

OutputSet cmd_simulate(const RunConfig& config) {
  const SimulateSettings& sim = config.simulate;
  Scenario sc = sim.scenario;
  sc.burst.validate();
  if (sim.snr_db) {
    sc.noise_std = noise_std_for_snr(sc.burst, sc.propagation.path_gain, *sim.snr_db);
  }
  sc.damage = attenuation_ladder(sim.ladder_steps, sim.final_attenuation, sim.max_delay,
                                 sim.max_scatter);
  SyntheticDataset ds = generate_dataset(sc);
  OutputSet out;
  for (std::size_t i = 0; i < ds.signals.size(); ++i) {
    out.add(ds.manifest.entries[i].file, format_signal_csv(ds.signals[i]));
  }
  out.add("manifest.txt", format_manifest(ds.manifest));
  return out;
}

OutputSet cmd_report(const RunConfig& config) {
  const fs::path cases =
      config.cases.empty() ? config.output_dir / "detect" / "cases.csv" : config.cases;
  std::ifstream in(cases, std::ios::binary);
  if (!in) throw IoError("cannot open '" + cases.string() + "' for reading");
  std::ostringstream text;
  text << in.rdbuf();
  const auto tables = summary_table(parse_cases_csv(text.str()));
  OutputSet out;
  out.add(fs::path("report") / "summary.txt", render_text(tables));
  out.add(fs::path("report") / "summary.csv", render_csv(tables));
  return out;
}

namespace {

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

const std::vector<Flag> kCommonFlags = {
    {"--output-dir,-o", "run.output_dir", "Output directory"},
    {"--seed", "run.seed", "Base random seed"},
};
const std::vector<Flag> kAnalysisFlags = {
    {"--manifest,-m", "run.manifest", "Dataset manifest file"},
    {"--segment-length", "welch.segment_length", "Welch segment length L (samples)"},
    {"--overlap", "welch.overlap", "Welch overlap fraction in [0,1)"},
    {"--nfft", "welch.nfft", "FFT length (>= L)"},
    {"--window-kind", "welch.window", "hamming, bartlett or rectangular"},
    {"--detrend", "welch.detrend", "Remove the mean before estimation (true/false)"},
    {"--window", "detect.window", "Packet window name from the manifest"},
    {"--alpha", "detect.alphas", "Comma-separated false-alarm levels"},
    {"--band", "detect.band", "Verdict band 'lo,hi' in Hz, 'auto' or 'full'"},
    {"--holdout", "detect.holdout", "Healthy records held out of the ensemble"},
    {"--shuffle-seed", "detect.shuffle_seed", "Shuffle baselines before the split"},
    {"--di-band", "detect.di_band", "Experimental band method: normal or percentile"},
    {"--janapati", "detect.janapati", "normalized or as-printed"},
};
const std::vector<Flag> kMetricFlags = {
    {"--metrics", "detect.metrics", "Comma-separated: F,Fm,Z,janapati,qiu"},
};
const std::vector<Flag> kRocFlags = {
    {"--alpha-grid", "roc.alpha_grid", "Comma-separated alpha sweep (default 61 log points)"},
    {"--labels", "roc.labels", "Restrict damage cases to these labels"},
};
const std::vector<Flag> kSimulateFlags = {
    {"--baselines", "simulate.baselines", "Number of healthy records"},
    {"--steps", "simulate.steps", "Attenuation ladder steps"},
    {"--final-attenuation", "simulate.final_attenuation", "Gain of the last ladder step"},
    {"--max-delay", "simulate.max_delay", "Extra delay of the last ladder step (s)"},
    {"--max-scatter", "simulate.max_scatter", "Echo gain of the last ladder step"},
    {"--snr-db", "simulate.snr_db", "Noise level as SNR against the received burst"},
    {"--noise-std", "simulate.noise_std", "Noise standard deviation (overrides --snr-db)"},
    {"--center-freq", "simulate.center_freq", "Tone-burst centre frequency (Hz)"},
    {"--cycles", "simulate.cycles", "Tone-burst cycles"},
    {"--amplitude", "simulate.amplitude", "Actuation amplitude (V peak-to-peak)"},
    {"--envelope", "simulate.envelope", "hamming or hanning"},
    {"--sample-rate", "simulate.sample_rate", "Sampling rate (Hz)"},
    {"--length", "simulate.length", "Samples per record"},
    {"--arrival", "simulate.arrival", "Direct-arrival delay (s)"},
    {"--path-gain", "simulate.path_gain", "Propagation gain"},
    {"--path-id", "simulate.path_id", "Path id written to the manifest"},
    {"--set-id", "simulate.set_id", "Set id written to the manifest"},
    {"--repeats", "simulate.repeats", "Records per damage state"},
};
const std::vector<Flag> kReportFlags = {
    {"--cases", "run.cases", "cases.csv written by detect"},
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Statistical damage detection for guided-wave SHM signals", "gwshm"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_file;
  app.add_option("--config,-c", config_file, "key = value configuration file");

  std::map<std::string, std::string> raw;  // flag values keyed by setting
  std::vector<std::pair<CLI::Option*, std::string>> bound;
  auto attach = [&](CLI::App* sub, const std::vector<Flag>& flags) {
    for (const auto& f : flags) {
      CLI::Option* opt = sub->add_option(f.name, raw[std::string(f.key) + "@" + sub->get_name()],
                                         f.help);
      bound.emplace_back(opt, f.key);
    }
  };

  struct Sub {
    CLI::App* app;
    OutputSet (*fn)(const RunConfig&);
  };
  std::vector<Sub> subs;
  auto* psd = app.add_subcommand("psd", "Welch PSD curves and baseline confidence bands");
  attach(psd, kCommonFlags);
  attach(psd, kAnalysisFlags);
  subs.push_back({psd, cmd_psd});
  auto* detect = app.add_subcommand("detect", "Score every record and write summary tables");
  attach(detect, kCommonFlags);
  attach(detect, kAnalysisFlags);
  attach(detect, kMetricFlags);
  subs.push_back({detect, cmd_detect});
  auto* roc = app.add_subcommand("roc", "ROC sweeps over alpha with AUC");
  attach(roc, kCommonFlags);
  attach(roc, kAnalysisFlags);
  attach(roc, kMetricFlags);
  attach(roc, kRocFlags);
  subs.push_back({roc, cmd_roc});
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic attenuation-ladder dataset");
  attach(simulate, kCommonFlags);
  attach(simulate, kSimulateFlags);
  subs.push_back({simulate, cmd_simulate});
  auto* report = app.add_subcommand("report", "Rebuild summary tables from cases.csv");
  attach(report, kCommonFlags);
  attach(report, kReportFlags);
  subs.push_back({report, cmd_report});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    Settings overrides;
    for (const auto& [opt, key] : bound) {
      if (opt->count() > 0) {
        overrides[key] = opt->as<std::string>();
      }
    }
    const Settings file = config_file.empty() ? Settings{} : read_settings(config_file);
    const RunConfig config = resolve_config(file, overrides, std::getenv(kOutputDirEnv));
    for (const auto& s : subs) {
      if (!s.app->parsed()) continue;
      const OutputSet files = s.fn(config);
      files.write(config.output_dir);
      if (s.app == simulate) {
        out << (config.output_dir / "manifest.txt").generic_string() << "\n";
      } else if (s.app == detect || s.app == report) {
        for (const auto& f : files.files) {
          if (f.path.filename() == "summary.txt") out << f.text;
        }
      } else {
        out << "wrote " << files.files.size() << " files under "
            << config.output_dir.generic_string() << "\n";
      }
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ComputationError& e) {
    err << "computation error: " << e.what() << "\n";
    return kExitComputation;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace gwshm::cli
