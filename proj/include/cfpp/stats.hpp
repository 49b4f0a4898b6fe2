#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cfpp::stats {

double mean(std::span<const double> x);
/// Unbiased sample variance; 0 for fewer than two samples.
double variance(std::span<const double> x);
double stddev(std::span<const double> x);
/// Fourth central moment (population normalization).
double central_moment4(std::span<const double> x);

/// Linear-interpolation quantile (Hyndman-Fan type 7). `p` in [0, 1].
double quantile(std::vector<double> x, double p);
double median(std::vector<double> x);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Pearson chi-square goodness of fit of `observed` counts against
/// `probabilities` (summing to 1).
TestResult chi_square(std::span<const std::uint64_t> observed, std::span<const double> probabilities);

/// Asymptotic Kolmogorov tail probability P(K > lambda).
double kolmogorov_tail(double lambda);

/// One-sample KS test against Uniform(0, 1).
TestResult ks_uniform(std::vector<double> samples);

/// Two-sample KS test.
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = intercept + slope * x. Requires two distinct x.
LinearFit ols(std::span<const double> x, std::span<const double> y);

/// Standard error of the difference of two sample means.
double mean_difference_se(std::span<const double> a, std::span<const double> b);

/// Large-sample standard error of the difference of two sample variances.
double variance_difference_se(std::span<const double> a, std::span<const double> b);

}  // namespace cfpp::stats
