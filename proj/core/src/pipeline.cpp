#include "gwshm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "gwshm/errors.hpp"
#include "gwshm/statdist.hpp"

namespace gwshm {
namespace fs = std::filesystem;

void PipelineConfig::validate() const {
  welch.validate();
  if (window.empty()) throw ValidationError("pipeline: packet window name is empty");
  if (band) band->validate();
}

FrequencyBand default_band(const DatasetManifest& manifest) {
  if (manifest.center_frequency && manifest.n_cycles && *manifest.n_cycles > 0.0) {
    const double fc = *manifest.center_frequency;
    const double bw = fc / *manifest.n_cycles;
    return {std::max(0.0, fc - 2.0 * bw), fc + 2.0 * bw};
  }
  return {};
}

FrequencyBand resolve_band(const DatasetManifest& manifest, const PipelineConfig& config) {
  return config.band ? *config.band : default_band(manifest);
}

std::size_t locate_packet(const Signal& signal, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ValidationError("auto window: threshold must lie in (0, 1]");
  }
  const auto& x = signal.samples;
  const std::size_t n = x.size();
  const std::size_t half = kEnvelopeSamples / 2;

  // Centred moving mean square via prefix sums.
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i] * x[i];
  std::vector<double> env(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > half ? i - half : 0;
    const std::size_t hi = std::min(n, i + half + 1);
    env[i] = std::sqrt((prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo));
    peak = std::max(peak, env[i]);
  }
  if (!(peak > 0.0)) {
    throw ComputationError("auto window: signal '" + signal.label + "' has no energy to locate");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (env[i] >= threshold * peak) return i;
  }
  throw ComputationError("auto window: envelope never crosses the threshold");
}

Signal extract_packet(const Signal& signal, const PacketWindow& window) {
  const std::size_t start =
      window.automatic ? locate_packet(signal, window.threshold) : window.start;
  if (window.length == 0 || start + window.length > signal.samples.size()) {
    throw ValidationError("window '" + window.name + "' [" + std::to_string(start) + ", " +
                          std::to_string(start + window.length) + ") exceeds a signal of " +
                          std::to_string(signal.samples.size()) + " samples");
  }
  Signal out;
  out.sample_rate = signal.sample_rate;
  out.label = signal.label;
  out.t0_offset = signal.t0_offset + start;
  const auto first = signal.samples.begin() + static_cast<std::ptrdiff_t>(start);
  out.samples.assign(first, first + static_cast<std::ptrdiff_t>(window.length));
  return out;
}

Signal extract_packet(const Signal& signal, std::string_view window_name,
                      const DatasetManifest& manifest) {
  return extract_packet(signal, manifest.window(window_name));
}

LoadedDataset load_dataset(const DatasetManifest& manifest) {
  manifest.validate();
  LoadedDataset data;
  data.manifest = manifest;
  data.signals.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    Signal s = read_signal_csv(manifest.resolve(e));
    if (s.sample_rate != manifest.sample_rate) {
      throw ValidationError("signal '" + e.file + "' is sampled at " +
                            format_double(s.sample_rate) + " Hz but the manifest says " +
                            format_double(manifest.sample_rate) + " Hz");
    }
    data.signals.push_back(std::move(s));
  }
  return data;
}

LoadedDataset load_dataset(const fs::path& manifest_file) {
  return load_dataset(read_manifest(manifest_file));
}

BaselineSplit split_baselines(std::vector<std::size_t> baselines, std::size_t holdout,
                              std::optional<std::uint64_t> shuffle_seed) {
  if (baselines.size() < holdout + 2) {
    throw ValidationError("need at least " + std::to_string(holdout + 2) +
                          " baseline records for a hold-out of " + std::to_string(holdout) +
                          ", found " + std::to_string(baselines.size()));
  }
  if (shuffle_seed) {
    std::mt19937_64 rng(*shuffle_seed);
    std::shuffle(baselines.begin(), baselines.end(), rng);
  }
  BaselineSplit split;
  const std::size_t train = baselines.size() - holdout;
  split.train.assign(baselines.begin(), baselines.begin() + static_cast<std::ptrdiff_t>(train));
  split.test.assign(baselines.begin() + static_cast<std::ptrdiff_t>(train), baselines.end());
  return split;
}

namespace {

struct SetIndex {
  std::string set_id;
  std::vector<std::size_t> baselines;
  std::vector<std::size_t> damaged;
};

std::vector<SetIndex> index_path(const DatasetManifest& m, std::string_view path_id) {
  std::vector<SetIndex> sets;
  for (const auto& set : m.set_ids(path_id)) {
    SetIndex s;
    s.set_id = set;
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
      const auto& e = m.entries[i];
      if (e.path_id != path_id || e.set_id != set) continue;
      (m.is_baseline(e) ? s.baselines : s.damaged).push_back(i);
    }
    if (s.baselines.empty()) {
      throw ValidationError("path '" + std::string(path_id) + "' set '" + set +
                            "' has no baseline records");
    }
    sets.push_back(std::move(s));
  }
  if (sets.empty()) {
    throw ValidationError("manifest has no entries for path '" + std::string(path_id) + "'");
  }
  return sets;
}

Signal packet(const LoadedDataset& data, std::size_t entry, const PipelineConfig& config) {
  return extract_packet(data.signals.at(entry), config.window, data.manifest);
}

PsdEstimate entry_psd(const LoadedDataset& data, std::size_t entry, const PipelineConfig& config) {
  return welch_psd(packet(data, entry, config), config.welch);
}

double di_value(Metric metric, const std::vector<double>& ref, const std::vector<double>& unk,
                const PipelineConfig& config) {
  return metric == Metric::JanapatiDI ? janapati_di(ref, unk, config.janapati_variant)
                                      : qiu_di(ref, unk);
}

void mean_sd(const std::vector<double>& v, double& mean, double& sd) {
  mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
}

// Verdicts at one alpha without copying curves; thresholds are memoised per
// degrees of freedom and come from rethreshold() so they match decide().
class VerdictAt {
 public:
  VerdictAt(Metric metric, Alpha alpha, BandMethod method)
      : metric_(metric), alpha_(alpha), method_(method) {}

  Verdict operator()(const ScoredCase& c) {
    if (is_damage_index(metric_)) return c.decide(metric_, alpha_, method_).verdict;
    const auto key = std::make_pair(c.series.dof_num, c.series.dof_den);
    auto it = thresholds_.find(key);
    if (it == thresholds_.end()) {
      StatSeries probe;
      probe.kind = c.series.kind;
      probe.dof_num = key.first;
      probe.dof_den = key.second;
      probe = rethreshold(probe, alpha_);
      it = thresholds_.emplace(key, std::make_pair(probe.lower_threshold, probe.upper_threshold))
               .first;
    }
    const auto [lo, hi] = it->second;
    for (std::size_t k : c.series.decision_bins) {
      const double v = c.series.values[k];
      if (v < lo || v > hi) return Verdict::Damaged;
    }
    return Verdict::Healthy;
  }

 private:
  Metric metric_;
  Alpha alpha_;
  BandMethod method_;
  std::map<std::pair<double, double>, std::pair<double, double>> thresholds_;
};

}  // namespace

BaselineRun run_baseline(const LoadedDataset& data, std::string_view path_id,
                         std::string_view set_id, const PipelineConfig& config) {
  config.validate();
  std::vector<std::size_t> baselines;
  for (std::size_t i = 0; i < data.manifest.entries.size(); ++i) {
    const auto& e = data.manifest.entries[i];
    if (e.path_id == path_id && e.set_id == set_id && data.manifest.is_baseline(e)) {
      baselines.push_back(i);
    }
  }
  BaselineSplit split = split_baselines(std::move(baselines), config.holdout, config.shuffle_seed);
  std::vector<PsdEstimate> train;
  for (std::size_t i : split.train) train.push_back(entry_psd(data, i, config));
  std::vector<PsdEstimate> held;
  for (std::size_t i : split.test) held.push_back(entry_psd(data, i, config));
  return {std::string(path_id), std::string(set_id), std::move(split),
          BaselineEnsemble(std::move(train)), std::move(held)};
}

std::string_view to_string(CaseRole role) {
  return role == CaseRole::Healthy ? "healthy" : "damage";
}

StatSeries ScoredCase::decide(Metric metric, Alpha alpha, BandMethod method) const {
  if (is_damage_index(metric)) return di_decision(metric, di, scatter, alpha, method);
  return rethreshold(series, alpha);
}

double ScoredCase::score(Metric metric) const {
  if (!is_damage_index(metric)) return series.max_in_band();
  double mean = 0.0;
  double sd = 0.0;
  mean_sd(scatter, mean, sd);
  const double dev = std::abs(di - mean);
  if (sd > 0.0) return dev / sd;
  return dev > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

double ScoredCase::critical_alpha(Metric metric) const {
  if (!is_damage_index(metric)) return series.critical_alpha();
  return std::min(1.0, 2.0 * stats::normal_sf(score(metric)));
}

MetricCases score_path(const LoadedDataset& data, std::string_view path_id, Metric metric,
                       const PipelineConfig& config) {
  config.validate();
  const auto sets = index_path(data.manifest, path_id);
  const FrequencyBand band = resolve_band(data.manifest, config);
  // Thresholds stored with each series are placeholders; decide() re-thresholds.
  const Alpha base_alpha(0.05);

  MetricCases out;
  out.metric = metric;
  out.path_id = std::string(path_id);
  out.di_band_method = config.di_band_method;
  out.band = band;
  out.train_count = std::numeric_limits<std::size_t>::max();

  for (const auto& set : sets) {
    if (metric == Metric::Fm || metric == Metric::Z) {
      const BaselineRun run = run_baseline(data, path_id, set.set_id, config);
      out.train_count = std::min(out.train_count, run.ensemble.size());
      out.holdout = config.holdout;
      auto inspect = [&](std::size_t entry, const PsdEstimate& psd, CaseRole role) {
        ScoredCase c;
        c.entry = entry;
        c.role = role;
        c.series = metric == Metric::Fm ? fm_statistic(run.ensemble, psd, base_alpha, band)
                                        : z_statistic(run.ensemble, psd, base_alpha, band);
        out.cases.push_back(std::move(c));
      };
      for (std::size_t i = 0; i < run.split.test.size(); ++i) {
        inspect(run.split.test[i], run.held_out[i], CaseRole::Healthy);
      }
      for (std::size_t d : set.damaged) inspect(d, entry_psd(data, d, config), CaseRole::Damage);
      continue;
    }

    const std::size_t nb = set.baselines.size();
    out.train_count = std::min(out.train_count, nb);
    if (nb < 2) {
      throw ValidationError(std::string(to_string(metric)) + ": path '" + std::string(path_id) +
                            "' set '" + set.set_id + "' needs at least 2 baseline records");
    }

    if (metric == Metric::F) {
      std::map<std::size_t, PsdEstimate> psd;
      for (std::size_t i : set.baselines) psd.emplace(i, entry_psd(data, i, config));
      for (std::size_t d : set.damaged) psd.emplace(d, entry_psd(data, d, config));
      for (std::size_t r : set.baselines) {
        for (std::size_t h : set.baselines) {
          if (h == r) continue;
          ScoredCase c;
          c.entry = h;
          c.reference = r;
          c.role = CaseRole::Healthy;
          c.series = f_statistic(psd.at(r), psd.at(h), base_alpha, band);
          out.cases.push_back(std::move(c));
        }
        for (std::size_t d : set.damaged) {
          ScoredCase c;
          c.entry = d;
          c.reference = r;
          c.role = CaseRole::Damage;
          c.series = f_statistic(psd.at(r), psd.at(d), base_alpha, band);
          out.cases.push_back(std::move(c));
        }
      }
      continue;
    }

    // Damage indices.
    const std::size_t min_scatter = config.di_band_method == BandMethod::NormalMeanStd ? 2 : 1;
    if (nb < min_scatter + 2) {
      throw ValidationError(std::string(to_string(metric)) + ": path '" + std::string(path_id) +
                            "' set '" + set.set_id + "' needs at least " +
                            std::to_string(min_scatter + 2) +
                            " baseline records for leave-one-out healthy scatter");
    }
    std::map<std::size_t, std::vector<double>> pkt;
    for (std::size_t i : set.baselines) pkt.emplace(i, packet(data, i, config).samples);
    for (std::size_t d : set.damaged) pkt.emplace(d, packet(data, d, config).samples);
    for (std::size_t r : set.baselines) {
      std::vector<std::pair<std::size_t, double>> healthy;
      for (std::size_t h : set.baselines) {
        if (h != r) healthy.emplace_back(h, di_value(metric, pkt.at(r), pkt.at(h), config));
      }
      for (const auto& [h, value] : healthy) {
        ScoredCase c;
        c.entry = h;
        c.reference = r;
        c.role = CaseRole::Healthy;
        c.di = value;
        for (const auto& [other, v] : healthy) {
          if (other != h) c.scatter.push_back(v);
        }
        out.cases.push_back(std::move(c));
      }
      std::vector<double> all;
      for (const auto& hv : healthy) all.push_back(hv.second);
      for (std::size_t d : set.damaged) {
        ScoredCase c;
        c.entry = d;
        c.reference = r;
        c.role = CaseRole::Damage;
        c.di = di_value(metric, pkt.at(r), pkt.at(d), config);
        c.scatter = all;
        out.cases.push_back(std::move(c));
      }
    }
  }
  return out;
}

double LabelTally::missed_pct() const {
  return cases == 0 ? 0.0 : 100.0 * static_cast<double>(missed) / static_cast<double>(cases);
}

double MetricReport::false_alarm_pct() const {
  return healthy_cases == 0
             ? 0.0
             : 100.0 * static_cast<double>(false_alarms) / static_cast<double>(healthy_cases);
}

MetricReport tally(const MetricCases& scored, const DatasetManifest& manifest, Alpha alpha) {
  MetricReport r;
  r.metric = scored.metric;
  r.alpha = alpha.value();
  for (const auto& e : manifest.entries) {
    if (e.path_id != scored.path_id || manifest.is_baseline(e)) continue;
    const bool seen = std::any_of(r.damage.begin(), r.damage.end(),
                                  [&](const LabelTally& t) { return t.label == e.label; });
    if (!seen) r.damage.push_back({e.label, 0, 0});
  }

  for (const auto& c : scored.cases) {
    const StatSeries s = c.decide(scored.metric, alpha, scored.di_band_method);
    const auto& entry = manifest.entries.at(c.entry);
    CaseRecord rec;
    rec.file = entry.file;
    rec.label = entry.label;
    rec.reference = c.reference ? manifest.entries.at(*c.reference).file : "ensemble";
    rec.role = c.role;
    rec.score = c.score(scored.metric);
    rec.critical_alpha = c.critical_alpha(scored.metric);
    rec.lower = s.lower_threshold;
    rec.upper = s.upper_threshold;
    rec.verdict = s.verdict;
    const bool flagged = s.verdict == Verdict::Damaged;
    if (c.role == CaseRole::Healthy) {
      ++r.healthy_cases;
      if (flagged) ++r.false_alarms;
    } else {
      auto it = std::find_if(r.damage.begin(), r.damage.end(),
                             [&](const LabelTally& t) { return t.label == entry.label; });
      ++it->cases;
      if (!flagged) ++it->missed;
    }
    r.cases.push_back(std::move(rec));
  }
  return r;
}

DetectionReport run_inspection(const LoadedDataset& data, std::string_view path_id,
                               const std::vector<Metric>& metrics, Alpha alpha,
                               const PipelineConfig& config) {
  if (metrics.empty()) throw ValidationError("no metrics requested");
  DetectionReport report;
  report.path_id = std::string(path_id);
  report.window = config.window;
  report.band = resolve_band(data.manifest, config);
  report.alpha = alpha.value();
  report.holdout = config.holdout;
  report.train_count = 0;
  for (Metric m : metrics) {
    const MetricCases scored = score_path(data, path_id, m, config);
    if (m == Metric::Fm || m == Metric::Z) report.train_count = scored.train_count;
    report.results.push_back(tally(scored, data.manifest, alpha));
  }
  return report;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid(61);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = std::pow(10.0, -6.0 + static_cast<double>(i) / 10.0);
  }
  grid.front() = 1e-6;
  grid.back() = 1.0;
  return grid;
}

double auc_trapezoid(std::vector<RocPoint> points) {
  points.push_back({0.0, 0.0, 0.0});
  points.push_back({1.0, 1.0, 1.0});
  std::sort(points.begin(), points.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.fpr != b.fpr ? a.fpr < b.fpr : a.tpr < b.tpr;
  });
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) / 2.0;
  }
  return area;
}

RocCurve roc_sweep(const MetricCases& scored, const DatasetManifest& manifest,
                   const std::vector<double>& alpha_grid, const std::vector<std::string>& labels) {
  if (alpha_grid.empty()) throw ValidationError("ROC: empty alpha grid");
  std::vector<const ScoredCase*> healthy;
  std::vector<const ScoredCase*> damage;
  for (const auto& c : scored.cases) {
    if (c.role == CaseRole::Healthy) {
      healthy.push_back(&c);
    } else {
      const auto& label = manifest.entries.at(c.entry).label;
      if (labels.empty() || std::find(labels.begin(), labels.end(), label) != labels.end()) {
        damage.push_back(&c);
      }
    }
  }
  if (healthy.empty()) throw ValidationError("ROC: no held-out healthy cases");
  if (damage.empty()) throw ValidationError("ROC: no damage cases");

  RocCurve curve;
  curve.metric = scored.metric;
  curve.path_id = scored.path_id;
  curve.train_count = scored.train_count;
  curve.holdout = scored.holdout;
  for (double a : alpha_grid) {
    VerdictAt verdict(scored.metric, Alpha(a), scored.di_band_method);
    auto rate = [&](const std::vector<const ScoredCase*>& cases) {
      std::size_t flagged = 0;
      for (const auto* c : cases) {
        if (verdict(*c) == Verdict::Damaged) ++flagged;
      }
      return static_cast<double>(flagged) / static_cast<double>(cases.size());
    };
    curve.points.push_back({a, rate(healthy), rate(damage)});
  }
  curve.auc = auc_trapezoid(curve.points);
  return curve;
}

}  // namespace gwshm
