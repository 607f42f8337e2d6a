#include "gwshm/detectors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <string>

#include "gwshm/errors.hpp"

namespace gwshm {
namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string hz(double f) {
  std::ostringstream os;
  os << f << " Hz";
  return os.str();
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::size_t> bins_in_band(const PsdEstimate& grid, const FrequencyBand& band) {
  band.validate();
  std::vector<std::size_t> bins;
  for (std::size_t k = 0; k < grid.values.size(); ++k) {
    if (band.contains(grid.frequency(k))) bins.push_back(k);
  }
  if (bins.empty()) {
    throw ValidationError("frequency band [" + hz(band.lo_hz) + ", " + hz(band.hi_hz) +
                          "] contains no bins of the PSD grid");
  }
  return bins;
}

void require_same_grid(const PsdEstimate& a, const PsdEstimate& b) {
  if (a.sample_rate != b.sample_rate) {
    throw ValidationError("PSD grid mismatch: sample rates differ");
  }
  if (!(a.config == b.config) || a.values.size() != b.values.size()) {
    throw ValidationError("PSD grid mismatch: Welch configurations differ");
  }
  if (a.k_windows != b.k_windows) {
    throw ValidationError("PSD grid mismatch: baseline uses K = " + std::to_string(a.k_windows) +
                          " windows, unknown uses K = " + std::to_string(b.k_windows));
  }
}

void decide(StatSeries& s) {
  s.violations = 0;
  for (std::size_t k : s.decision_bins) {
    const double v = s.values[k];
    if (v < s.lower_threshold || v > s.upper_threshold) ++s.violations;
  }
  s.verdict = s.violations > 0 ? Verdict::Damaged : Verdict::Healthy;
}

void set_thresholds(StatSeries& s, Alpha alpha) {
  s.alpha = alpha.value();
  switch (s.kind) {
    case Metric::F:
    case Metric::Fm:
      s.lower_threshold = stats::f_quantile(alpha.lower_tail(), s.dof_num, s.dof_den);
      // Upper points via F(a, b) quantile p = 1 / F(b, a) quantile (1 - p), which
      // stays accurate when 1 - alpha/2 rounds to one.
      s.upper_threshold = 1.0 / stats::f_quantile(alpha.lower_tail(), s.dof_den, s.dof_num);
      break;
    case Metric::Z:
      s.lower_threshold = -std::numeric_limits<double>::infinity();
      s.upper_threshold = -stats::normal_quantile(alpha.lower_tail());
      break;
    default:
      throw ValidationError("rethreshold applies to F, Fm and Z series only");
  }
}

// Ratio statistic shared by F and Fm.
StatSeries ratio_statistic(Metric kind, std::span<const double> numerator, const PsdEstimate& unknown,
                           double dof_num, Alpha alpha, const FrequencyBand& band) {
  StatSeries s;
  s.kind = kind;
  s.band = band;
  s.frequencies = unknown.freq_grid();
  s.decision_bins = bins_in_band(unknown, band);
  s.values.resize(unknown.values.size());
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    const double den = unknown.values[k];
    s.values[k] = den > 0.0 ? numerator[k] / den : kNaN;
  }
  for (std::size_t k : s.decision_bins) {
    if (!(unknown.values[k] > 0.0)) {
      throw ComputationError(std::string(to_string(kind)) +
                             ": unknown PSD is zero at in-band frequency " +
                             hz(unknown.frequency(k)));
    }
  }
  s.dof_num = dof_num;
  s.dof_den = 2.0 * static_cast<double>(unknown.k_windows);
  set_thresholds(s, alpha);
  decide(s);
  return s;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::F:
      return "F";
    case Metric::Fm:
      return "Fm";
    case Metric::Z:
      return "Z";
    case Metric::JanapatiDI:
      return "janapati";
    case Metric::QiuDI:
      return "qiu";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  const std::string n = lowercase(name);
  if (n == "f") return Metric::F;
  if (n == "fm" || n == "f_m") return Metric::Fm;
  if (n == "z") return Metric::Z;
  if (n == "janapati" || n == "janapati_di") return Metric::JanapatiDI;
  if (n == "qiu" || n == "qiu_di") return Metric::QiuDI;
  throw ValidationError("unknown metric '" + std::string(name) +
                        "' (expected F, Fm, Z, janapati or qiu)");
}

bool is_pairwise(Metric metric) { return metric != Metric::Fm && metric != Metric::Z; }

bool is_damage_index(Metric metric) {
  return metric == Metric::JanapatiDI || metric == Metric::QiuDI;
}

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::Damaged ? "damaged" : "healthy";
}

void FrequencyBand::validate() const {
  if (std::isnan(lo_hz) || std::isnan(hi_hz) || lo_hz > hi_hz) {
    throw ValidationError("frequency band must satisfy lo <= hi");
  }
}

BaselineEnsemble::BaselineEnsemble(std::vector<PsdEstimate> psds) : members_(std::move(psds)) {
  if (members_.empty()) throw ValidationError("baseline ensemble needs at least one PSD");
  for (const auto& p : members_) require_same_grid(members_.front(), p);

  const std::size_t bins = members_.front().values.size();
  const auto m = static_cast<double>(members_.size());
  mean_.assign(bins, 0.0);
  var_.assign(bins, 0.0);
  for (const auto& p : members_) {
    for (std::size_t k = 0; k < bins; ++k) mean_[k] += p.values[k];
  }
  for (double& v : mean_) v /= m;
  if (members_.size() > 1) {
    for (const auto& p : members_) {
      for (std::size_t k = 0; k < bins; ++k) {
        const double d = p.values[k] - mean_[k];
        var_[k] += d * d;
      }
    }
    for (double& v : var_) v /= m - 1.0;
  }
  // Identical members: keep the exact value so flat bins read as zero variance.
  for (std::size_t k = 0; k < bins; ++k) {
    const double first = members_.front().values[k];
    const bool flat = std::all_of(members_.begin(), members_.end(),
                                  [&](const PsdEstimate& p) { return p.values[k] == first; });
    if (flat) {
      mean_[k] = first;
      var_[k] = 0.0;
    }
  }
}

double StatSeries::max_in_band() const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k : decision_bins) best = std::max(best, values[k]);
  return best;
}

double StatSeries::critical_alpha() const {
  switch (kind) {
    case Metric::F:
    case Metric::Fm: {
      double p = 1.0;
      for (std::size_t k : decision_bins) {
        const double v = values[k];
        const double two_sided =
            2.0 * std::min(stats::f_cdf(v, dof_num, dof_den), stats::f_sf(v, dof_num, dof_den));
        p = std::min(p, two_sided);
      }
      return p;
    }
    case Metric::Z:
      return std::min(1.0, 2.0 * stats::normal_sf(max_in_band()));
    default:
      throw ValidationError("critical_alpha is defined for F, Fm and Z series only");
  }
}

StatSeries f_statistic(const PsdEstimate& baseline, const PsdEstimate& unknown, Alpha alpha,
                       const FrequencyBand& band) {
  require_same_grid(baseline, unknown);
  return ratio_statistic(Metric::F, baseline.values, unknown,
                         2.0 * static_cast<double>(baseline.k_windows), alpha, band);
}

StatSeries fm_statistic(const BaselineEnsemble& baseline, const PsdEstimate& unknown, Alpha alpha,
                        const FrequencyBand& band) {
  require_same_grid(baseline.reference(), unknown);
  const double dof = 2.0 * static_cast<double>(baseline.reference().k_windows) *
                     static_cast<double>(baseline.size());
  return ratio_statistic(Metric::Fm, baseline.mean_psd(), unknown, dof, alpha, band);
}

StatSeries z_statistic(const BaselineEnsemble& baseline, const PsdEstimate& unknown, Alpha alpha,
                       const FrequencyBand& band) {
  if (baseline.size() < 2) {
    throw ValidationError("Z statistic needs at least 2 baseline PSDs for a sample variance");
  }
  require_same_grid(baseline.reference(), unknown);

  StatSeries s;
  s.kind = Metric::Z;
  s.band = band;
  s.frequencies = unknown.freq_grid();
  const auto& mean = baseline.mean_psd();
  const auto& var = baseline.var_psd();
  s.values.resize(unknown.values.size());
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    s.values[k] = var[k] > 0.0 ? std::abs(mean[k] - unknown.values[k]) / std::sqrt(2.0 * var[k])
                               : kNaN;
  }
  for (std::size_t k : bins_in_band(unknown, band)) {
    if (var[k] > 0.0) {
      s.decision_bins.push_back(k);
    } else {
      s.excluded_bins.push_back(k);
    }
  }
  if (s.decision_bins.empty()) {
    throw ComputationError("Z: baseline variance is zero at every in-band frequency (first at " +
                           hz(unknown.frequency(s.excluded_bins.front())) + ")");
  }
  set_thresholds(s, alpha);
  decide(s);
  return s;
}

StatSeries rethreshold(const StatSeries& series, Alpha alpha) {
  StatSeries s = series;
  set_thresholds(s, alpha);
  decide(s);
  return s;
}

double janapati_di(std::span<const double> baseline, std::span<const double> unknown,
                   JanapatiVariant variant) {
  if (baseline.size() != unknown.size()) {
    throw ValidationError("janapati DI: baseline and unknown windows differ in length");
  }
  if (baseline.size() < 2) throw ValidationError("janapati DI: need at least 2 samples");

  double e0 = 0.0;
  double eu = 0.0;
  for (std::size_t t = 0; t < baseline.size(); ++t) {
    e0 += baseline[t] * baseline[t];
    eu += unknown[t] * unknown[t];
  }
  if (!(e0 > 0.0)) throw ComputationError("janapati DI: baseline signal has zero energy");
  if (!(eu > 0.0)) throw ComputationError("janapati DI: unknown signal has zero energy");

  const double norm_u = std::sqrt(eu);
  double cross = 0.0;  // sum y_0[t] * Y_u^n[t]
  for (std::size_t t = 0; t < baseline.size(); ++t) cross += baseline[t] * unknown[t] / norm_u;

  double di = 0.0;
  if (variant == JanapatiVariant::AsPrinted) {
    for (std::size_t t = 0; t < baseline.size(); ++t) {
      if (baseline[t] == 0.0) {
        throw ComputationError("janapati DI (as printed): baseline sample " + std::to_string(t) +
                               " is zero");
      }
    }
    for (std::size_t t = 0; t < baseline.size(); ++t) {
      di += unknown[t] / norm_u - cross / (baseline[t] * e0);
    }
  } else {
    const double gain = cross / e0;
    for (std::size_t t = 0; t < baseline.size(); ++t) {
      di += unknown[t] / norm_u - baseline[t] * gain;
    }
  }
  return di;
}

double qiu_di(std::span<const double> baseline, std::span<const double> unknown) {
  if (baseline.size() != unknown.size()) {
    throw ValidationError("qiu DI: baseline and unknown windows differ in length");
  }
  if (baseline.empty()) throw ValidationError("qiu DI: empty signals");
  double e0 = 0.0;
  double eu = 0.0;
  double cross = 0.0;
  for (std::size_t t = 0; t < baseline.size(); ++t) {
    e0 += baseline[t] * baseline[t];
    eu += unknown[t] * unknown[t];
    cross += baseline[t] * unknown[t];
  }
  if (!(e0 > 0.0) || !(eu > 0.0)) throw ComputationError("qiu DI: zero-energy input");
  const double rho = std::sqrt(cross * cross / (e0 * eu));
  return std::clamp(1.0 - rho, 0.0, 1.0);
}

std::string_view to_string(BandMethod method) {
  return method == BandMethod::Percentile ? "percentile" : "normal";
}

BandMethod parse_band_method(std::string_view name) {
  const std::string n = lowercase(name);
  if (n == "normal" || n == "normalmeanstd" || n == "mean-std") return BandMethod::NormalMeanStd;
  if (n == "percentile") return BandMethod::Percentile;
  throw ValidationError("unknown band method '" + std::string(name) +
                        "' (expected normal or percentile)");
}

ConfidenceBand experimental_band(std::span<const std::vector<double>> curves, Alpha alpha,
                                 BandMethod method) {
  if (curves.empty()) throw ValidationError("experimental band: no samples");
  if (method == BandMethod::NormalMeanStd && curves.size() < 2) {
    throw ValidationError("experimental band: mean/std method needs at least 2 samples");
  }
  const std::size_t points = curves.front().size();
  for (const auto& c : curves) {
    if (c.size() != points) throw ValidationError("experimental band: curves differ in length");
  }

  ConfidenceBand band;
  band.kind = BandKind::Experimental;
  band.alpha = alpha.value();
  band.center.resize(points);
  band.lower.resize(points);
  band.upper.resize(points);
  const auto n = static_cast<double>(curves.size());

  if (method == BandMethod::NormalMeanStd) {
    const double z = -stats::normal_quantile(alpha.lower_tail());
    for (std::size_t k = 0; k < points; ++k) {
      double mean = 0.0;
      for (const auto& c : curves) mean += c[k];
      mean /= n;
      double ss = 0.0;
      for (const auto& c : curves) ss += (c[k] - mean) * (c[k] - mean);
      const double sd = std::sqrt(ss / (n - 1.0));
      band.center[k] = mean;
      band.lower[k] = mean - z * sd;
      band.upper[k] = mean + z * sd;
    }
  } else {
    std::vector<double> column(curves.size());
    for (std::size_t k = 0; k < points; ++k) {
      for (std::size_t i = 0; i < curves.size(); ++i) column[i] = curves[i][k];
      std::sort(column.begin(), column.end());
      band.center[k] = quantile_sorted(column, 0.5);
      band.lower[k] = quantile_sorted(column, alpha.lower_tail());
      band.upper[k] = quantile_sorted(column, alpha.upper_tail());
    }
  }
  return band;
}

ConfidenceBand experimental_band(std::span<const double> scalars, Alpha alpha, BandMethod method) {
  std::vector<std::vector<double>> curves;
  curves.reserve(scalars.size());
  for (double v : scalars) curves.push_back({v});
  return experimental_band(curves, alpha, method);
}

ConfidenceBand theoretical_band(const PsdEstimate& psd, Alpha alpha) {
  if (psd.k_windows < 1) throw ValidationError("theoretical band: PSD has no averaged windows");
  const double dof = 2.0 * static_cast<double>(psd.k_windows);
  const double hi_q = stats::chi2_quantile(alpha.upper_tail(), dof);
  const double lo_q = stats::chi2_quantile(alpha.lower_tail(), dof);

  ConfidenceBand band;
  band.kind = BandKind::TheoreticalEstimation;
  band.alpha = alpha.value();
  band.center = psd.values;
  band.lower.resize(psd.values.size());
  band.upper.resize(psd.values.size());
  for (std::size_t k = 0; k < psd.values.size(); ++k) {
    band.lower[k] = psd.values[k] * dof / hi_q;
    band.upper[k] = psd.values[k] * dof / lo_q;
  }
  return band;
}

StatSeries di_decision(Metric kind, double di, std::span<const double> healthy_di, Alpha alpha,
                       BandMethod method) {
  if (!is_damage_index(kind)) throw ValidationError("di_decision expects a damage-index metric");
  const ConfidenceBand band = experimental_band(healthy_di, alpha, method);
  StatSeries s;
  s.kind = kind;
  s.values = {di};
  s.alpha = alpha.value();
  s.lower_threshold = band.lower.front();
  s.upper_threshold = band.upper.front();
  s.decision_bins = {0};
  decide(s);
  return s;
}

}  // namespace gwshm
