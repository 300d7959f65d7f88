#include "demacc/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "demacc/error.hpp"
#include "demacc/raster.hpp"
#include "demacc/stats.hpp"

namespace demacc {

WeightScheme parse_weight_scheme(const std::string& name) {
  if (name == "inverse_distance") return WeightScheme::InverseDistance;
  if (name == "fixed_band") return WeightScheme::FixedBand;
  throw ConfigError("unknown weights scheme '" + name + "' (expected inverse_distance|fixed_band)");
}

std::string to_string(WeightScheme s) { return s == WeightScheme::InverseDistance ? "inverse_distance" : "fixed_band"; }

MoranAssumption parse_moran_assumption(const std::string& name) {
  if (name == "randomization") return MoranAssumption::Randomization;
  if (name == "normality") return MoranAssumption::Normality;
  throw ConfigError("unknown Moran assumption '" + name + "' (expected randomization|normality)");
}

std::string to_string(MoranAssumption a) {
  return a == MoranAssumption::Randomization ? "randomization" : "normality";
}

WeightsMatrix::WeightsMatrix(std::vector<std::vector<Entry>> rows, bool row_standardized)
    : rows_(std::move(rows)), row_standardized_(row_standardized) {
  const std::size_t n = rows_.size();
  std::vector<double> row_sum(n, 0.0), col_sum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = rows_[i];
    std::sort(r.begin(), r.end(), [](const Entry& a, const Entry& b) { return a.j < b.j; });
    for (const auto& e : r) {
      if (e.j >= n) throw ConfigError("weights entry column out of range");
      if (e.j == i) throw ConfigError("weights matrix must not contain self-weights");
      if (!(e.w >= 0.0)) throw ConfigError("weights must be non-negative");
      row_sum[i] += e.w;
      col_sum[e.j] += e.w;
      s0_ += e.w;
    }
  }
  // S1 = 1/2 sum_ij (w_ij + w_ji)^2 = sum_ij w_ij^2 + sum_ij w_ij w_ji.
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& e : rows_[i]) s1_ += e.w * e.w + e.w * weight(e.j, i);
  }
  for (std::size_t i = 0; i < n; ++i) s2_ += (row_sum[i] + col_sum[i]) * (row_sum[i] + col_sum[i]);
}

std::size_t WeightsMatrix::nonzero_count() const noexcept {
  std::size_t k = 0;
  for (const auto& r : rows_) k += r.size();
  return k;
}

double WeightsMatrix::weight(std::size_t i, std::size_t j) const {
  const auto& r = rows_.at(i);
  const auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry& e, std::size_t k) { return e.j < k; });
  return it != r.end() && it->j == j ? it->w : 0.0;
}

BuiltWeights build_weights(std::span<const Point2> points, const WeightsOptions& options) {
  const std::size_t n = points.size();
  if (n < 2) throw DegenerateError("spatial weights need at least 2 points");

  // Dense distance pass; n is the number of control points, a few thousand at most.
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::hypot(points[i].x - points[j].x, points[i].y - points[j].y);
      if (d == 0.0) {
        throw DegenerateError("duplicate coordinates at points " + std::to_string(i) + " and " + std::to_string(j));
      }
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }

  double threshold = 0.0;
  if (options.threshold) {
    threshold = *options.threshold;
    if (!(threshold > 0.0)) throw ConfigError("weights distance threshold must be positive");
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) nearest = std::min(nearest, dist[i * n + j]);
      }
      threshold = std::max(threshold, nearest);
    }
  }

  std::vector<std::vector<WeightsMatrix::Entry>> rows(n);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = dist[i * n + j];
      if (d > threshold) continue;
      const double w = options.scheme == WeightScheme::InverseDistance ? 1.0 / d : 1.0;
      rows[i].push_back({j, w});
      any = true;
    }
  }
  if (!any) throw DegenerateError("all spatial weights are zero at threshold " + format_double(threshold));

  if (options.row_standardize) {
    for (auto& r : rows) {
      double sum = 0.0;
      for (const auto& e : r) sum += e.w;
      if (sum > 0.0) {
        for (auto& e : r) e.w /= sum;
      }
    }
  }
  return {WeightsMatrix(std::move(rows), options.row_standardize), threshold};
}

namespace {

struct Centered {
  std::vector<double> z;
  double m2 = 0.0;  ///< sum z^2
  double m4 = 0.0;  ///< sum z^4
};

Centered center(std::span<const double> values) {
  Centered c;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  c.z.reserve(values.size());
  for (double v : values) {
    const double d = v - mean;
    c.z.push_back(d);
    c.m2 += d * d;
    c.m4 += d * d * d * d;
  }
  return c;
}

double cross_product(std::span<const double> z, const WeightsMatrix& w) {
  double total = 0.0;
  for (std::size_t i = 0; i < w.n(); ++i) {
    double lag = 0.0;
    for (const auto& e : w.row(i)) lag += e.w * z[e.j];
    total += z[i] * lag;
  }
  return total;
}

void check_inputs(std::span<const double> values, const WeightsMatrix& w) {
  if (values.size() != w.n()) throw ConfigError("values length does not match the weights matrix");
  if (!(w.s0() > 0.0)) throw DegenerateError("weights matrix has no positive weights");
}

double index_from(const Centered& c, const WeightsMatrix& w) {
  if (c.m2 == 0.0) throw DegenerateError("Moran's I undefined: values are constant");
  const double n = static_cast<double>(w.n());
  return (n / w.s0()) * cross_product(c.z, w) / c.m2;
}

}  // namespace

double morans_i(std::span<const double> values, const WeightsMatrix& w) {
  check_inputs(values, w);
  return index_from(center(values), w);
}

MoranResult morans_significance(std::span<const double> values, const WeightsMatrix& w,
                                MoranAssumption assumption) {
  check_inputs(values, w);
  if (values.size() < 4) throw DegenerateError("Moran significance needs at least 4 values");
  const Centered c = center(values);

  MoranResult res;
  res.assumption = assumption;
  res.i = index_from(c, w);

  const double n = static_cast<double>(w.n());
  const double s0 = w.s0(), s1 = w.s1(), s2 = w.s2();
  res.e_i = -1.0 / (n - 1.0);
  res.b2 = n * c.m4 / (c.m2 * c.m2);

  double e_i2 = 0.0;
  if (assumption == MoranAssumption::Randomization) {
    const double a = n * ((n * n - 3.0 * n + 3.0) * s1 - n * s2 + 3.0 * s0 * s0);
    const double b = res.b2 * ((n * n - n) * s1 - 2.0 * n * s2 + 6.0 * s0 * s0);
    e_i2 = (a - b) / ((n - 1.0) * (n - 2.0) * (n - 3.0) * s0 * s0);
  } else {
    e_i2 = (n * n * s1 - n * s2 + 3.0 * s0 * s0) / (s0 * s0 * (n * n - 1.0));
  }
  res.v_i = e_i2 - res.e_i * res.e_i;
  if (!(res.v_i > 0.0)) throw DegenerateError("Moran's I variance is not positive");
  res.z = (res.i - res.e_i) / std::sqrt(res.v_i);
  res.p = two_tailed_p(res.z);
  return res;
}

namespace {

// SplitMix64 finaliser; turns (seed, replicate) into an independent stream seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Unbiased integer in [0, bound) by rejection; portable across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r = 0;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

}  // namespace

PermutationResult permutation_test(std::span<const double> values, const WeightsMatrix& w, std::size_t n_perm,
                                   std::uint64_t seed, unsigned threads) {
  check_inputs(values, w);
  if (values.size() < 4) throw DegenerateError("permutation test needs at least 4 values");
  if (n_perm < 99) throw ConfigError("permutation test needs at least 99 permutations");

  const Centered c = center(values);
  const double observed = index_from(c, w);
  const double n = static_cast<double>(w.n());
  const double scale = n / (w.s0() * c.m2);

  std::vector<double> replicates(n_perm);
  auto run = [&](std::size_t begin, std::size_t end) {
    std::vector<double> z(c.z.size());
    for (std::size_t k = begin; k < end; ++k) {
      std::mt19937_64 rng(mix_seed(seed, k));
      z = c.z;
      for (std::size_t i = z.size() - 1; i > 0; --i) std::swap(z[i], z[bounded(rng, i + 1)]);
      replicates[k] = scale * cross_product(z, w);
    }
  };

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_perm));
  if (workers <= 1) {
    run(0, n_perm);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n_perm + workers - 1) / workers;
    for (std::size_t begin = 0; begin < n_perm; begin += chunk) {
      pool.emplace_back(run, begin, std::min(n_perm, begin + chunk));
    }
  }

  PermutationResult res;
  res.observed_i = observed;
  res.n_perm = n_perm;
  const double e_i = -1.0 / (n - 1.0);
  const double obs_dev = std::fabs(observed - e_i);
  double sum = 0.0, sum_sq = 0.0;
  res.min_i = std::numeric_limits<double>::infinity();
  res.max_i = -std::numeric_limits<double>::infinity();
  for (double r : replicates) {
    if (std::fabs(r - e_i) >= obs_dev) ++res.extreme_count;
    sum += r;
    sum_sq += r * r;
    res.min_i = std::min(res.min_i, r);
    res.max_i = std::max(res.max_i, r);
  }
  const double np = static_cast<double>(n_perm);
  res.mean_i = sum / np;
  res.sd_i = std::sqrt(std::max(0.0, (sum_sq - sum * sum / np) / (np - 1.0)));
  res.pseudo_p = (1.0 + static_cast<double>(res.extreme_count)) / (np + 1.0);
  return res;
}

}  // namespace demacc
