#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "gwshm/errors.hpp"
#include "gwshm/statdist.hpp"
#include "oracles.hpp"

using namespace gwshm;
using namespace gwshm::stats;

TEST(Alpha, Domain) {
  EXPECT_THROW(Alpha(0.0), ValidationError);
  EXPECT_THROW(Alpha(-0.1), ValidationError);
  EXPECT_THROW(Alpha(1.5), ValidationError);
  EXPECT_THROW(Alpha(std::nan("")), ValidationError);
  EXPECT_NO_THROW(Alpha(1.0));
  const Alpha a(0.05);
  EXPECT_DOUBLE_EQ(a.upper_tail(), 0.975);
  EXPECT_DOUBLE_EQ(a.lower_tail(), 0.025);
}

TEST(Normal, Basics) {
  EXPECT_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_quantile(0.975), 1.9599640, 1e-6);
  EXPECT_NEAR(normal_quantile(0.975), oracle::normal_quantile(0.975), 1e-6);
  for (double p : {0.001, 0.02, 0.3, 0.5, 0.77}) {
    EXPECT_NEAR(normal_quantile(p), -normal_quantile(1.0 - p), 1e-12);
  }
  EXPECT_THROW(normal_quantile(0.0), ValidationError);
  EXPECT_THROW(normal_quantile(1.0), ValidationError);
}

TEST(Normal, RoundTrip) {
  for (double z = -6.0; z <= 6.0; z += 0.25) {
    // The cdf carries at most ~eps absolute error near 1, which the quantile
    // amplifies by 1/pdf(z); allow for that conditioning.
    const double tol = 1e-9 + 4.0 * std::numeric_limits<double>::epsilon() / oracle::normal_pdf(z);
    EXPECT_NEAR(normal_quantile(normal_cdf(z)), z, tol) << z;
  }
}

TEST(Normal, SurvivalTail) {
  EXPECT_NEAR(normal_sf(10.0) / 7.61985302416e-24, 1.0, 1e-9);
  EXPECT_NEAR(normal_sf(1.3) + normal_cdf(1.3), 1.0, 1e-15);
}

TEST(ChiSquare, Basics) {
  EXPECT_EQ(chi2_cdf(0.0, 5), 0.0);
  EXPECT_NEAR(chi2_quantile(0.5, 2), 2.0 * std::log(2.0), 1e-12);
  EXPECT_LT(oracle::rel_err(chi2_quantile(0.95, 18), oracle::chi2_quantile(0.95, 18)), 1e-6);
  EXPECT_THROW(chi2_cdf(1.0, 0.0), ValidationError);
  EXPECT_THROW(chi2_cdf(1.0, 2.5), ValidationError);
  EXPECT_THROW(chi2_quantile(1.2, 3), ValidationError);
}

TEST(ChiSquare, RoundTripRandomized) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> dof(1, 10000);
  std::uniform_real_distribution<double> prob(0.001, 0.999);
  for (int i = 0; i < 300; ++i) {
    const double d = dof(rng);
    const double p = prob(rng);
    const double x = chi2_quantile(p, d);
    EXPECT_LT(oracle::rel_err(chi2_cdf(x, d), p), 1e-8) << "d=" << d << " p=" << p;
  }
}

TEST(ChiSquare, AgreesWithIndependentCdf) {
  for (double d : {1.0, 2.0, 18.0, 318.0, 5000.0}) {
    for (double q : {0.1, 0.5, 1.0, 1.5, 3.0}) {
      const double x = q * d;
      EXPECT_NEAR(chi2_cdf(x, d), oracle::chi2_cdf_reference(x, d), 1e-12);
    }
  }
}

TEST(FDist, Basics) {
  for (double d : {1.0, 2.0, 18.0, 318.0}) EXPECT_NEAR(f_cdf(1.0, d, d), 0.5, 1e-12);
  for (double p : {0.01, 0.2, 0.6}) {
    EXPECT_LT(oracle::rel_err(f_quantile(p, 18, 18), 1.0 / f_quantile(1.0 - p, 18, 18)), 1e-10);
  }
  EXPECT_LT(oracle::rel_err(f_quantile(0.975, 18, 18), oracle::f_quantile(0.975, 18, 18)), 1e-6);
  EXPECT_THROW(f_cdf(1.0, 0.0, 3.0), ValidationError);
  EXPECT_THROW(f_quantile(0.0, 3.0, 3.0), ValidationError);
}

TEST(FDist, RoundTripLargeDof) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> d1s(1, 2 * 159 * 20);
  std::uniform_int_distribution<int> d2s(1, 400);
  std::uniform_real_distribution<double> prob(0.002, 0.998);
  for (int i = 0; i < 300; ++i) {
    const double d1 = d1s(rng);
    const double d2 = d2s(rng);
    const double p = prob(rng);
    const double x = f_quantile(p, d1, d2);
    EXPECT_LT(oracle::rel_err(f_cdf(x, d1, d2), p), 1e-8) << d1 << "," << d2 << " p=" << p;
  }
}

TEST(FDist, ConvergesToScaledChiSquare) {
  for (double d1 : {18.0, 270.0}) {
    const double f = f_quantile(0.95, d1, 1e5);
    const double c = chi2_quantile(0.95, d1) / d1;
    EXPECT_LT(oracle::rel_err(f, c), 1e-3);
  }
}

TEST(Monotonicity, CdfsAndQuantiles) {
  double prev_n = -1.0;
  double prev_c = -1.0;
  double prev_f = -1.0;
  for (int i = 0; i <= 2000; ++i) {
    const double x = i * 0.02;
    const double n = normal_cdf(x - 20.0);
    const double c = chi2_cdf(x, 18);
    const double f = f_cdf(x / 10.0, 270, 18);
    EXPECT_GE(n, prev_n);
    EXPECT_GE(c, prev_c);
    EXPECT_GE(f, prev_f);
    prev_n = n;
    prev_c = c;
    prev_f = f;
  }
  double qn = -1e300;
  double qc = -1e300;
  double qf = -1e300;
  for (int i = 1; i < 1000; ++i) {
    const double p = i / 1000.0;
    EXPECT_GT(normal_quantile(p), qn);
    EXPECT_GT(chi2_quantile(p, 6360), qc);
    EXPECT_GT(f_quantile(p, 6360, 18), qf);
    qn = normal_quantile(p);
    qc = chi2_quantile(p, 6360);
    qf = f_quantile(p, 6360, 18);
  }
}

TEST(SpecialFunctions, IncompleteGammaAndBeta) {
  EXPECT_NEAR(gamma_p(1.0, 2.0), 1.0 - std::exp(-2.0), 1e-14);
  EXPECT_NEAR(gamma_p(3.0, 4.0) + gamma_q(3.0, 4.0), 1.0, 1e-15);
  EXPECT_NEAR(beta_inc(1.0, 1.0, 0.3), 0.3, 1e-14);
  EXPECT_NEAR(beta_inc(2.0, 3.0, 0.4) + beta_inc(3.0, 2.0, 0.6), 1.0, 1e-14);
  EXPECT_THROW(beta_inc(1.0, 1.0, 1.5), ValidationError);
  EXPECT_THROW(gamma_p(-1.0, 1.0), ValidationError);
}
