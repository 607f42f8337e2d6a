#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gwshm/detectors.hpp"
#include "gwshm/io.hpp"
#include "gwshm/spectral.hpp"

namespace gwshm {

struct PipelineConfig {
  WelchConfig welch;
  std::string window = "first-packet";
  /// Verdict band; default_band(manifest) when unset.
  std::optional<FrequencyBand> band;
  /// Healthy records per (path, set) kept out of the F_m / Z ensemble.
  std::size_t holdout = 5;
  std::optional<std::uint64_t> shuffle_seed;
  BandMethod di_band_method = BandMethod::NormalMeanStd;
  JanapatiVariant janapati_variant = JanapatiVariant::Normalized;

  void validate() const;
};

/// centre +/- 2 * (centre / n_cycles) when the manifest records the actuation,
/// otherwise the whole grid.
FrequencyBand default_band(const DatasetManifest& manifest);
FrequencyBand resolve_band(const DatasetManifest& manifest, const PipelineConfig& config);

/// Samples in the centred moving-RMS envelope used by automatic windows: one
/// carrier period of the default 250 kHz burst at 24 MHz. Shorter windows lag
/// the Hamming ramp and start the packet late.
inline constexpr std::size_t kEnvelopeSamples = 96;

/// First sample at which the short-time RMS envelope reaches `threshold` times
/// its maximum. Throws ComputationError if the signal is flat.
std::size_t locate_packet(const Signal& signal, double threshold);

/// Slice described by `window` (auto-located when window.automatic). The
/// result keeps rate and label; t0_offset records the slice start.
Signal extract_packet(const Signal& signal, const PacketWindow& window);
Signal extract_packet(const Signal& signal, std::string_view window_name,
                      const DatasetManifest& manifest);

/// Manifest plus every signal it references, parallel to manifest.entries.
struct LoadedDataset {
  DatasetManifest manifest;
  std::vector<Signal> signals;
};

/// Reads every entry. Sample rates must agree with the manifest.
LoadedDataset load_dataset(const DatasetManifest& manifest);
LoadedDataset load_dataset(const std::filesystem::path& manifest_file);

/// Baseline entries of one (path, set), split into ensemble members and
/// held-out healthy test records. Indices refer to manifest.entries.
struct BaselineSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// First (n - holdout) in manifest order train, unless a shuffle seed is given.
/// Throws ValidationError with fewer than holdout + 2 baselines.
BaselineSplit split_baselines(std::vector<std::size_t> baselines, std::size_t holdout,
                              std::optional<std::uint64_t> shuffle_seed);

struct BaselineRun {
  std::string path_id;
  std::string set_id;
  BaselineSplit split;
  BaselineEnsemble ensemble;
  std::vector<PsdEstimate> held_out;
};

BaselineRun run_baseline(const LoadedDataset& data, std::string_view path_id,
                         std::string_view set_id, const PipelineConfig& config);

enum class CaseRole { Healthy, Damage };
std::string_view to_string(CaseRole role);

/// One inspection of one record by one metric, kept in a form that can be
/// re-decided at any alpha.
struct ScoredCase {
  std::size_t entry = 0;
  /// Reference record for pairwise metrics; unset for ensemble metrics.
  std::optional<std::size_t> reference;
  CaseRole role = CaseRole::Damage;
  /// F, Fm, Z curves (thresholds at whatever alpha they were built with).
  StatSeries series;
  /// Damage-index value and the healthy scatter it is judged against.
  double di = 0.0;
  std::vector<double> scatter;

  StatSeries decide(Metric metric, Alpha alpha, BandMethod method) const;
  /// Maximum in-band statistic, or |DI - mean| / sd of the scatter.
  double score(Metric metric) const;
  /// Smallest alpha that flags the case (minimum two-sided p-value). For DIs
  /// this uses the normal mean/std rule.
  double critical_alpha(Metric metric) const;
};

/// Every case for one metric on one path, across all of its sets.
struct MetricCases {
  Metric metric = Metric::F;
  std::string path_id;
  BandMethod di_band_method = BandMethod::NormalMeanStd;
  std::size_t train_count = 0;  // smallest ensemble size over the sets
  std::size_t holdout = 0;
  FrequencyBand band;
  std::vector<ScoredCase> cases;
};

/// Scores every record of a path. Pairwise metrics (F, DIs) use every ordered
/// pair of distinct healthy records as healthy cases and every (healthy
/// reference, damaged record) pair as damage cases; DI scatter for a reference
/// is its healthy-pair DIs, leaving out the record under test. Ensemble
/// metrics (Fm, Z) use the split from run_baseline.
MetricCases score_path(const LoadedDataset& data, std::string_view path_id, Metric metric,
                       const PipelineConfig& config);

struct LabelTally {
  std::string label;
  std::size_t cases = 0;
  std::size_t missed = 0;
  double missed_pct() const;
};

struct CaseRecord {
  std::string file;
  std::string label;
  std::string reference;  // reference file, or "ensemble"
  CaseRole role = CaseRole::Damage;
  double score = 0.0;
  double critical_alpha = 1.0;
  double lower = 0.0;
  double upper = 0.0;
  Verdict verdict = Verdict::Healthy;
};

struct MetricReport {
  Metric metric = Metric::F;
  double alpha = 0.05;
  std::size_t healthy_cases = 0;
  std::size_t false_alarms = 0;
  std::vector<LabelTally> damage;  // manifest order of first appearance
  std::vector<CaseRecord> cases;

  double false_alarm_pct() const;
};

struct DetectionReport {
  std::string path_id;
  std::string window;
  std::size_t train_count = 0;
  std::size_t holdout = 0;
  FrequencyBand band;
  double alpha = 0.05;
  std::vector<MetricReport> results;
};

/// Decides every scored case at `alpha` and tallies the outcome.
MetricReport tally(const MetricCases& scored, const DatasetManifest& manifest, Alpha alpha);

/// Scores and tallies all requested metrics for one path at one alpha.
DetectionReport run_inspection(const LoadedDataset& data, std::string_view path_id,
                               const std::vector<Metric>& metrics, Alpha alpha,
                               const PipelineConfig& config);

struct RocPoint {
  double alpha = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  Metric metric = Metric::F;
  std::string path_id;
  std::size_t train_count = 0;
  std::size_t holdout = 0;
  std::vector<RocPoint> points;  // in alpha-grid order
  double auc = 0.0;
};

/// 61 log-spaced alphas from 1e-6 to 1 inclusive.
std::vector<double> default_alpha_grid();

/// Trapezoidal area under (fpr, tpr) after sorting and anchoring at (0,0) and (1,1).
double auc_trapezoid(std::vector<RocPoint> points);

/// Decision-based ROC: at each alpha, fpr is the flagged fraction of healthy
/// cases and tpr the flagged fraction of damage cases (optionally only those
/// whose label is in `labels`). Throws ValidationError on an empty side.
RocCurve roc_sweep(const MetricCases& scored, const DatasetManifest& manifest,
                   const std::vector<double>& alpha_grid,
                   const std::vector<std::string>& labels = {});

// Report rendering.

/// One alpha's worth of rows: metrics down, false alarms then missed damage
/// per label across.
struct SummaryTable {
  std::string path_id;
  std::string window;
  double alpha = 0.0;
  std::vector<std::string> labels;
  struct Row {
    Metric metric = Metric::F;
    double false_alarm_pct = 0.0;
    std::size_t healthy_cases = 0;
    std::vector<double> missed_pct;
    std::vector<std::size_t> damage_cases;
  };
  std::vector<Row> rows;
  std::vector<std::string> footnotes;
};

/// Groups reports by (path, window, alpha). Throws ValidationError if reports
/// in a group disagree on the damage labels, or if there are none.
std::vector<SummaryTable> summary_table(const std::vector<DetectionReport>& reports);

/// Percentage with at most two decimals and no trailing zeros.
std::string format_pct(double pct);
std::string render_text(const std::vector<SummaryTable>& tables);
std::string render_csv(const std::vector<SummaryTable>& tables);

/// Per-case CSV carrying enough context to rebuild the reports.
std::string format_cases_csv(const std::vector<DetectionReport>& reports);
std::vector<DetectionReport> parse_cases_csv(std::string_view text);

}  // namespace gwshm
