#pragma once

#include <algorithm>
#include <limits>

namespace gwshm {

/// False-alarm (type I error) probability.
///
/// Decision rules take alpha in (0, 1]. The upper endpoint is admitted so that
/// ROC sweeps can close at alpha = 1, where the acceptance region of every
/// two-sided rule shrinks to a point.
class Alpha {
 public:
  explicit Alpha(double value);
  double value() const { return value_; }
  /// 1 - alpha/2 and alpha/2, the two-sided critical probabilities.
  double upper_tail() const { return 1.0 - value_ / 2.0; }
  /// Never rounds to zero, even for subnormal alpha.
  double lower_tail() const {
    return std::max(value_ / 2.0, std::numeric_limits<double>::denorm_min());
  }

 private:
  double value_;
};

namespace stats {

// Standard normal.
double normal_pdf(double z);
double normal_cdf(double z);
/// Upper tail 1 - cdf(z), accurate for large z.
double normal_sf(double z);
double normal_quantile(double p);

// Regularized incomplete gamma P(a, x) and its complement Q(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

// Chi-square with d degrees of freedom (d >= 1, integer valued).
double chi2_pdf(double x, double d);
double chi2_cdf(double x, double d);
double chi2_sf(double x, double d);
double chi2_quantile(double p, double d);

// Snedecor F with (d1, d2) degrees of freedom.
double f_pdf(double x, double d1, double d2);
double f_cdf(double x, double d1, double d2);
double f_sf(double x, double d1, double d2);
double f_quantile(double p, double d1, double d2);

}  // namespace stats
}  // namespace gwshm
