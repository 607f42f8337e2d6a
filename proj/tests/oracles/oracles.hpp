#pragma once

// Slow, independent reference implementations used as ground truth by the
// unit and acceptance tests. None of these call into the gwshm library.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

enum class Win { Hamming, Bartlett, Rectangular };

std::vector<double> window(Win kind, std::size_t length);

/// Welch PSD by explicit loops: per-window direct DFT (no FFT), one-sided
/// doubling of interior bins, average over windows.
std::vector<double> welch(const std::vector<double>& x, double fs, std::size_t seg_len,
                          double overlap, std::size_t nfft, Win kind, bool detrend);

/// CDF by adaptive quadrature of a density from `lo` to `x`.
double integrate_cdf(const std::function<double(double)>& pdf, double lo, double x);

/// Quantile by bisection on a quadrature CDF over [lo, hi].
double bisect_quantile(const std::function<double(double)>& cdf, double p, double lo, double hi);

double normal_pdf(double z);
double chi2_pdf(double x, double d);
double f_pdf(double x, double d1, double d2);

double normal_quantile(double p);
double chi2_quantile(double p, double d);
double f_quantile(double p, double d1, double d2);

/// Boost.Math chi-square CDF, an implementation independent of gwshm.
double chi2_cdf_reference(double x, double d);

/// One-sample Kolmogorov-Smirnov statistic of `samples` against `cdf`.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
/// Asymptotic 1% critical value 1.6276 / sqrt(n).
double ks_critical_1pct(std::size_t n);

/// Rank-based AUC: P(damage score > healthy score) + 0.5 P(tie).
double mann_whitney_auc(const std::vector<double>& healthy, const std::vector<double>& damage);

/// i.i.d. N(0, sigma^2) samples.
std::vector<double> white_noise(std::size_t n, double sigma, std::mt19937_64& rng);

/// Literal term-by-term evaluation of the Janapati index.
double janapati_as_printed(const std::vector<double>& y0, const std::vector<double>& yu);

/// Absolute relative error with an absolute floor, |a - b| / max(|b|, floor).
double rel_err(double a, double b, double floor = 0.0);

}  // namespace oracle
