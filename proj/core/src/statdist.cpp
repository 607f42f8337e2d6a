#include "gwshm/statdist.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gwshm/errors.hpp"

namespace gwshm {

Alpha::Alpha(double value) : value_(value) {
  if (!(value > 0.0 && value <= 1.0)) {
    throw ValidationError("alpha must lie in (0, 1], got " + std::to_string(value));
  }
}

namespace stats {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;

void require_probability(double p, const char* who) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ValidationError(std::string(who) + ": probability must lie in (0, 1), got " +
                          std::to_string(p));
  }
}

void require_dof(double d, const char* who) {
  if (!(d >= 1.0) || !std::isfinite(d) || d != std::floor(d)) {
    throw ValidationError(std::string(who) + ": degrees of freedom must be an integer >= 1, got " +
                          std::to_string(d));
  }
}

// lgamma(a) - [(a - 1/2) ln a - a + ln(2 pi)/2], for a >= 10.
double stirling_remainder(double a) {
  const double inv = 1.0 / a;
  const double inv2 = inv * inv;
  return inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
}

// ln(x^a e^-x / Gamma(a)) without the cancellation between a ln x and lgamma(a).
double log_gamma_prefactor(double a, double x) {
  if (a < 10.0) return a * std::log(x) - x - std::lgamma(a);
  const double d = (x - a) / a;
  return a * (std::log1p(d) - d) + 0.5 * std::log(a) - 0.5 * std::log(2.0 * std::numbers::pi) -
         stirling_remainder(a);
}

double gamma_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) {
      return sum * std::exp(log_gamma_prefactor(a, x));
    }
  }
  throw ComputationError("incomplete gamma series failed to converge");
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return std::exp(log_gamma_prefactor(a, x)) * h;
  }
  throw ComputationError("incomplete gamma continued fraction failed to converge");
}

// Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxIter; ++m) {
    const double dm = static_cast<double>(m);
    const double m2 = 2.0 * dm;
    double aa = dm * (b - dm) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + dm) * (qab + dm) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw ComputationError("incomplete beta continued fraction failed to converge");
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

struct BetaTails {
  double lower;  // I_x(a, b)
  double upper;  // 1 - I_x(a, b)
};

// x and y = 1 - x are passed separately so callers can form y without cancellation.
BetaTails beta_tails(double a, double b, double x, double y) {
  if (x <= 0.0) return {0.0, 1.0};
  if (y <= 0.0) return {1.0, 0.0};
  const double log_front = a * std::log(x) + b * std::log(y) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double lower = std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
    return {lower, 1.0 - lower};
  }
  const double upper = std::exp(log_front) * beta_continued_fraction(b, a, y) / b;
  return {1.0 - upper, upper};
}

BetaTails f_tails(double x, double d1, double d2) {
  if (x <= 0.0) return {0.0, 1.0};
  if (std::isinf(x)) return {1.0, 0.0};
  const double denom = d1 * x + d2;
  return beta_tails(d1 / 2.0, d2 / 2.0, d1 * x / denom, d2 / denom);
}

// Solves cdf(x) = p for a continuous distribution by safeguarded Newton
// iteration inside an expanding bracket. For p > 1/2 the upper tail is
// matched instead so that extreme upper quantiles keep full precision.
template <class Cdf, class Sf, class Pdf>
double invert(double p, Cdf cdf, Sf sf, Pdf pdf, double seed, bool positive_support) {
  const bool use_upper = p > 0.5;
  const double q = 1.0 - p;
  auto residual = [&](double x) { return use_upper ? q - sf(x) : cdf(x) - p; };

  double lo;
  double hi;
  double x = seed;
  if (positive_support && !(x > 0.0)) x = 1.0;
  if (residual(x) < 0.0) {
    lo = x;
    double step = positive_support ? x : 1.0;
    hi = positive_support ? 2.0 * x : x + step;
    while (residual(hi) < 0.0) {
      lo = hi;
      step *= 2.0;
      hi = positive_support ? 2.0 * hi : hi + step;
      if (!std::isfinite(hi)) throw ComputationError("quantile bracket diverged");
    }
  } else {
    hi = x;
    double step = 1.0;
    lo = positive_support ? 0.5 * x : x - step;
    while (residual(lo) > 0.0) {
      hi = lo;
      step *= 2.0;
      lo = positive_support ? 0.5 * lo : lo - step;
      if (positive_support && lo < 1e-300) {
        lo = 0.0;
        break;
      }
      if (!std::isfinite(lo)) throw ComputationError("quantile bracket diverged");
    }
  }

  x = (x > lo && x < hi) ? x : 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double r = residual(x);
    if (r == 0.0) return x;
    if (r < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double density = pdf(x);
    double next = (density > 0.0 && std::isfinite(density)) ? x - r / density
                                                            : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) {
      next = (positive_support && lo > 0.0 && hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    }
    const double scale = std::max(std::abs(next), positive_support ? 0.0 : 1.0);
    if (std::abs(next - x) <= 4.0 * kEps * scale || hi - lo <= 4.0 * kEps * scale) return next;
    x = next;
  }
  return x;
}

double normal_seed(double p) {
  // Abramowitz & Stegun 26.2.23 rational approximation, |error| < 4.5e-4.
  const double q = p < 0.5 ? p : 1.0 - p;
  const double t = std::sqrt(-2.0 * std::log(q));
  const double z =
      t - (2.515517 + 0.802853 * t + 0.010328 * t * t) /
              (1.0 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t * t * t);
  return p < 0.5 ? -z : z;
}

}  // namespace

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  require_probability(p, "normal_quantile");
  if (p == 0.5) return 0.0;
  return invert(p, normal_cdf, normal_sf, normal_pdf, normal_seed(p), false);
}

double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw ValidationError("gamma_p: shape must be positive");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0)) throw ValidationError("gamma_q: shape must be positive");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_series(a, x);
  return gamma_continued_fraction(a, x);
}

double beta_inc(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw ValidationError("beta_inc: parameters must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("beta_inc: x must lie in [0, 1]");
  return beta_tails(a, b, x, 1.0 - x).lower;
}

double chi2_pdf(double x, double d) {
  require_dof(d, "chi2_pdf");
  if (x < 0.0) return 0.0;
  const double k = d / 2.0;
  if (x == 0.0) return d == 2.0 ? 0.5 : (d < 2.0 ? std::numeric_limits<double>::infinity() : 0.0);
  // f(x) = (x/2)^(k-1) e^(-x/2) / (2 Gamma(k)) = prefactor(k, x/2) / x
  return std::exp(log_gamma_prefactor(k, x / 2.0)) / x;
}

double chi2_cdf(double x, double d) {
  require_dof(d, "chi2_cdf");
  return gamma_p(d / 2.0, x / 2.0);
}

double chi2_sf(double x, double d) {
  require_dof(d, "chi2_sf");
  return gamma_q(d / 2.0, x / 2.0);
}

double chi2_quantile(double p, double d) {
  require_probability(p, "chi2_quantile");
  require_dof(d, "chi2_quantile");
  // Wilson-Hilferty cube-root normal approximation as the starting point.
  const double z = normal_seed(p);
  const double c = 2.0 / (9.0 * d);
  double seed = d * std::pow(std::max(1.0 - c + z * std::sqrt(c), 1e-3), 3.0);
  return invert(
      p, [d](double x) { return gamma_p(d / 2.0, x / 2.0); },
      [d](double x) { return gamma_q(d / 2.0, x / 2.0); }, [d](double x) { return chi2_pdf(x, d); },
      seed, true);
}

double f_pdf(double x, double d1, double d2) {
  require_dof(d1, "f_pdf");
  require_dof(d2, "f_pdf");
  if (x < 0.0) return 0.0;
  if (x == 0.0) return d1 == 2.0 ? 1.0 : (d1 < 2.0 ? std::numeric_limits<double>::infinity() : 0.0);
  const double log_pdf = 0.5 * d1 * std::log(d1) + 0.5 * d2 * std::log(d2) +
                         (0.5 * d1 - 1.0) * std::log(x) - 0.5 * (d1 + d2) * std::log(d1 * x + d2) -
                         log_beta(d1 / 2.0, d2 / 2.0);
  return std::exp(log_pdf);
}

double f_cdf(double x, double d1, double d2) {
  require_dof(d1, "f_cdf");
  require_dof(d2, "f_cdf");
  return f_tails(x, d1, d2).lower;
}

double f_sf(double x, double d1, double d2) {
  require_dof(d1, "f_sf");
  require_dof(d2, "f_sf");
  return f_tails(x, d1, d2).upper;
}

double f_quantile(double p, double d1, double d2) {
  require_probability(p, "f_quantile");
  require_dof(d1, "f_quantile");
  require_dof(d2, "f_quantile");
  // Paulson's cube-root normal approximation, only used to start the
  // bracketed search.
  const double z = normal_seed(p);
  const double v1 = 2.0 / (9.0 * d1);
  const double v2 = 2.0 / (9.0 * d2);
  const double a = 1.0 - v2;
  const double b = 1.0 - v1;
  const double lead = a * a - z * z * v2;
  const double disc = a * a * b * b - lead * (b * b - z * z * v1);
  double seed = 1.0;
  if (lead > 0.0 && disc >= 0.0) {
    const double root = (a * b + z * std::sqrt(disc)) / lead;
    if (root > 0.0) seed = root * root * root;
  }
  return invert(
      p, [d1, d2](double x) { return f_tails(x, d1, d2).lower; },
      [d1, d2](double x) { return f_tails(x, d1, d2).upper; },
      [d1, d2](double x) { return f_pdf(x, d1, d2); }, seed, true);
}

}  // namespace stats
}  // namespace gwshm
