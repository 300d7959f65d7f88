#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace demacc {

/// Descriptive summary of a set of height differences. `sd` uses the n-1
/// denominator, `rmse` the n denominator.
struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double rmse = 0.0;
  double min = 0.0;
  double max = 0.0;
  double range = 0.0;
};

SummaryStats summarize(std::span<const double> deltas);

/// RMSE implied by a published (mean, sd, n) triple:
/// rmse^2 = mean^2 + sd^2 (n-1)/n.
double rmse_from_moments(double mean, double sd, std::size_t n);

struct CorrelationResult {
  double r = 0.0;
  std::size_t n = 0;
};

/// Pearson product-moment correlation. Throws DegenerateError on zero
/// variance or n < 3, ConfigError on a length mismatch.
CorrelationResult pearson_r(std::span<const double> x, std::span<const double> y);

struct AnovaDecomposition {
  double ss_between = 0.0;
  std::size_t df_between = 0;
  double ss_within = 0.0;
  std::size_t df_within = 0;
};

AnovaDecomposition anova_decompose(const std::vector<std::vector<double>>& groups);

struct AnovaTable {
  double ss_between = 0.0;
  std::size_t df_between = 0;
  double ss_within = 0.0;
  std::size_t df_within = 0;
  double ms_between = 0.0;
  double ms_within = 0.0;
  double f = 0.0;
  double p = 1.0;
  /// Set when the within-group mean square is zero; f is +inf and p is 0.
  bool f_infinite = false;
};

AnovaTable f_test(double ss_between, std::size_t df_between, double ss_within, std::size_t df_within);
AnovaTable f_test(const AnovaDecomposition& d);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double x, double a, double b);

/// CDF of the F distribution with (d1, d2) degrees of freedom.
double f_cdf(double x, double d1, double d2);
/// Upper tail 1 - f_cdf, evaluated without cancellation.
double f_sf(double x, double d1, double d2);

double normal_cdf(double z);
double two_tailed_p(double z);

struct HistogramBin {
  double lower = 0.0;
  std::size_t count = 0;
};

/// Half-open bins [lower, lower + width) aligned to `origin`, contiguous from
/// the lowest to the highest occupied bin.
std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width = 1.0, double origin = 0.0);

}  // namespace demacc
