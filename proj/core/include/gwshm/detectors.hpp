#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "gwshm/spectral.hpp"
#include "gwshm/statdist.hpp"

namespace gwshm {

enum class Metric { F, Fm, Z, JanapatiDI, QiuDI };

std::string_view to_string(Metric metric);
/// Accepts F, Fm, Z, janapati, qiu (case-insensitive).
Metric parse_metric(std::string_view name);
/// Metrics scored against one reference signal at a time (F and both DIs).
bool is_pairwise(Metric metric);
bool is_damage_index(Metric metric);

enum class Verdict { Healthy, Damaged };
std::string_view to_string(Verdict verdict);

/// Closed frequency interval [lo_hz, hi_hz] over which the "for all frequencies"
/// acceptance rule is enforced.
struct FrequencyBand {
  double lo_hz = 0.0;
  double hi_hz = std::numeric_limits<double>::infinity();

  bool contains(double f) const { return f >= lo_hz && f <= hi_hz; }
  void validate() const;
};

/// M healthy PSD estimates on a shared grid, with per-bin sample mean and
/// unbiased sample variance (zero when M == 1).
class BaselineEnsemble {
 public:
  explicit BaselineEnsemble(std::vector<PsdEstimate> psds);

  std::size_t size() const { return members_.size(); }
  const std::vector<PsdEstimate>& members() const { return members_; }
  const std::vector<double>& mean_psd() const { return mean_; }
  const std::vector<double>& var_psd() const { return var_; }
  /// Grid and configuration shared by every member.
  const PsdEstimate& reference() const { return members_.front(); }

 private:
  std::vector<PsdEstimate> members_;
  std::vector<double> mean_;
  std::vector<double> var_;
};

/// A per-frequency test-statistic curve (or a scalar DI) with its decision
/// thresholds at one alpha and the resulting verdict.
struct StatSeries {
  Metric kind = Metric::F;
  std::vector<double> frequencies;  // empty for damage indices
  std::vector<double> values;
  double lower_threshold = -std::numeric_limits<double>::infinity();
  double upper_threshold = std::numeric_limits<double>::infinity();
  double alpha = 0.0;
  FrequencyBand band;
  /// Degrees of freedom of the reference F distribution (zero for Z and DIs).
  double dof_num = 0.0;
  double dof_den = 0.0;
  /// Bins inside the band that carry the verdict.
  std::vector<std::size_t> decision_bins;
  /// Bins inside the band left out of the verdict (zero baseline variance for Z).
  std::vector<std::size_t> excluded_bins;
  std::size_t violations = 0;
  Verdict verdict = Verdict::Healthy;

  /// Largest value over the decision bins.
  double max_in_band() const;
  /// Smallest alpha at which this series would be declared Damaged, i.e. the
  /// minimum two-sided p-value over the decision bins (F, Fm, Z only).
  double critical_alpha() const;
};

/// F = S_o / S_u against two-sided F(2K, 2K) critical points.
StatSeries f_statistic(const PsdEstimate& baseline, const PsdEstimate& unknown, Alpha alpha,
                       const FrequencyBand& band = {});

/// F_m = mean(S_o) / S_u against two-sided F(2KM, 2K) critical points.
StatSeries fm_statistic(const BaselineEnsemble& baseline, const PsdEstimate& unknown, Alpha alpha,
                        const FrequencyBand& band = {});

/// Z = |mean(S_o) - S_u| / sqrt(2 var(S_o)) against Z_{1 - alpha/2}.
/// Requires M >= 2. In-band bins with zero baseline variance are excluded from
/// the verdict and listed in excluded_bins; if none remain, throws
/// ComputationError naming the offending frequency.
StatSeries z_statistic(const BaselineEnsemble& baseline, const PsdEstimate& unknown, Alpha alpha,
                       const FrequencyBand& band = {});

/// Recomputes thresholds and verdict of an F, Fm or Z series at another alpha.
StatSeries rethreshold(const StatSeries& series, Alpha alpha);

enum class JanapatiVariant {
  /// The literal index, with the per-sample y_0[t] divisor.
  AsPrinted,
  /// Projection form: Y_0 = y_0 * sum(y_0 Y_u) / sum(y_0^2); zero for identical signals.
  Normalized,
};

double janapati_di(std::span<const double> baseline, std::span<const double> unknown,
                   JanapatiVariant variant = JanapatiVariant::Normalized);

/// 1 - |normalised zero-lag cross-correlation|, in [0, 1].
double qiu_di(std::span<const double> baseline, std::span<const double> unknown);

enum class BandKind { TheoreticalEstimation, Experimental };
enum class BandMethod { NormalMeanStd, Percentile };

std::string_view to_string(BandMethod method);
BandMethod parse_band_method(std::string_view name);

struct ConfidenceBand {
  std::vector<double> center;  // mean, median or the estimate itself
  std::vector<double> lower;
  std::vector<double> upper;
  BandKind kind = BandKind::Experimental;
  double alpha = 0.0;
};

/// Point-wise band from repeated healthy curves (all the same length).
/// NormalMeanStd: mean +/- z_{1-alpha/2} * sample std, needs >= 2 curves.
/// Percentile: linear-interpolated empirical alpha/2 and 1 - alpha/2 quantiles.
ConfidenceBand experimental_band(std::span<const std::vector<double>> curves, Alpha alpha,
                                 BandMethod method = BandMethod::NormalMeanStd);
ConfidenceBand experimental_band(std::span<const double> scalars, Alpha alpha,
                                 BandMethod method = BandMethod::NormalMeanStd);

/// Estimation-uncertainty band from 2K S_hat / S ~ chi2(2K):
/// [S_hat 2K / chi2_{1-alpha/2}(2K), S_hat 2K / chi2_{alpha/2}(2K)].
ConfidenceBand theoretical_band(const PsdEstimate& psd, Alpha alpha);

/// Scalar DI decision against healthy DI scatter, thresholds from experimental_band.
StatSeries di_decision(Metric kind, double di, std::span<const double> healthy_di, Alpha alpha,
                       BandMethod method = BandMethod::NormalMeanStd);

}  // namespace gwshm
