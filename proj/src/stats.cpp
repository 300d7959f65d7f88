#include "demacc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "demacc/error.hpp"

namespace demacc {

SummaryStats summarize(std::span<const double> deltas) {
  const std::size_t n = deltas.size();
  if (n < 2) throw DegenerateError("summary statistics need at least 2 values, got " + std::to_string(n));

  SummaryStats s;
  s.n = n;
  const double dn = static_cast<double>(n);
  s.mean = std::accumulate(deltas.begin(), deltas.end(), 0.0) / dn;
  double ss_dev = 0.0;
  double ss_raw = 0.0;
  for (double d : deltas) {
    ss_dev += (d - s.mean) * (d - s.mean);
    ss_raw += d * d;
  }
  s.sd = std::sqrt(ss_dev / (dn - 1.0));
  s.rmse = std::sqrt(ss_raw / dn);
  const auto [lo, hi] = std::minmax_element(deltas.begin(), deltas.end());
  s.min = *lo;
  s.max = *hi;
  s.range = s.max - s.min;
  return s;
}

double rmse_from_moments(double mean, double sd, std::size_t n) {
  if (n < 2) throw DegenerateError("rmse_from_moments needs n >= 2");
  const double dn = static_cast<double>(n);
  return std::sqrt(mean * mean + sd * sd * (dn - 1.0) / dn);
}

CorrelationResult pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("pearson_r: length mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw DegenerateError("pearson_r needs at least 3 pairs");
  const double dn = static_cast<double>(n);
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / dn;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / dn;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateError("pearson_r undefined: zero variance");
  const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return {r, n};
}

AnovaDecomposition anova_decompose(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw DegenerateError("ANOVA needs at least 2 groups");
  std::size_t total = 0;
  double grand_sum = 0.0;
  for (const auto& g : groups) {
    if (g.empty()) throw DegenerateError("ANOVA group is empty");
    total += g.size();
    grand_sum += std::accumulate(g.begin(), g.end(), 0.0);
  }
  if (total <= groups.size()) throw DegenerateError("ANOVA needs more values than groups");
  const double grand_mean = grand_sum / static_cast<double>(total);

  AnovaDecomposition d;
  for (const auto& g : groups) {
    const double m = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
    d.ss_between += static_cast<double>(g.size()) * (m - grand_mean) * (m - grand_mean);
    for (double v : g) d.ss_within += (v - m) * (v - m);
  }
  d.df_between = groups.size() - 1;
  d.df_within = total - groups.size();
  return d;
}

AnovaTable f_test(double ss_between, std::size_t df_between, double ss_within, std::size_t df_within) {
  if (df_between == 0 || df_within == 0) throw DegenerateError("F test needs positive degrees of freedom");
  if (ss_between < 0.0 || ss_within < 0.0) throw DegenerateError("F test needs non-negative sums of squares");
  AnovaTable t;
  t.ss_between = ss_between;
  t.df_between = df_between;
  t.ss_within = ss_within;
  t.df_within = df_within;
  t.ms_between = ss_between / static_cast<double>(df_between);
  t.ms_within = ss_within / static_cast<double>(df_within);
  if (t.ms_within == 0.0) {
    if (t.ms_between == 0.0) throw DegenerateError("F undefined: all values identical");
    t.f_infinite = true;
    t.f = std::numeric_limits<double>::infinity();
    t.p = 0.0;
    return t;
  }
  t.f = t.ms_between / t.ms_within;
  t.p = f_sf(t.f, static_cast<double>(df_between), static_cast<double>(df_within));
  return t;
}

AnovaTable f_test(const AnovaDecomposition& d) { return f_test(d.ss_between, d.df_between, d.ss_within, d.df_within); }

namespace {

// Continued fraction for I_x(a, b), modified Lentz evaluation. Converges
// quickly for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIter = 100000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double dm = static_cast<double>(m);
    const double m2 = 2.0 * dm;
    double aa = dm * (b - dm) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + dm) * (qab + dm) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw DegenerateError("incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DegenerateError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw DegenerateError("incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

namespace {

void check_f_args(double x, double d1, double d2) {
  if (!(d1 >= 1.0) || !(d2 >= 1.0)) throw ConfigError("F distribution needs d1, d2 >= 1");
  if (!(x >= 0.0)) throw ConfigError("F distribution argument must be >= 0");
}

}  // namespace

double f_cdf(double x, double d1, double d2) {
  check_f_args(x, d1, d2);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return incomplete_beta(d1 * x / (d1 * x + d2), d1 / 2.0, d2 / 2.0);
}

double f_sf(double x, double d1, double d2) {
  check_f_args(x, d1, d2);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  // I_{1-t}(d2/2, d1/2) with t the CDF argument; no 1 - cdf cancellation.
  return incomplete_beta(d2 / (d2 + d1 * x), d2 / 2.0, d1 / 2.0);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double two_tailed_p(double z) { return std::erfc(std::fabs(z) / std::numbers::sqrt2); }

std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width, double origin) {
  if (!(bin_width > 0.0)) throw ConfigError("histogram bin width must be positive");
  if (values.empty()) return {};
  std::vector<long long> index;
  index.reserve(values.size());
  for (double v : values) index.push_back(static_cast<long long>(std::floor((v - origin) / bin_width)));
  const auto [lo, hi] = std::minmax_element(index.begin(), index.end());
  const long long first = *lo;
  if (*hi - first >= 1'000'000) {
    throw ConfigError("histogram would need " + std::to_string(*hi - first + 1) + " bins; use a wider bin width");
  }
  std::vector<HistogramBin> bins(static_cast<std::size_t>(*hi - first + 1));
  for (std::size_t i = 0; i < bins.size(); ++i) {
    bins[i].lower = origin + static_cast<double>(first + static_cast<long long>(i)) * bin_width;
  }
  for (long long k : index) ++bins[static_cast<std::size_t>(k - first)].count;
  return bins;
}

}  // namespace demacc
