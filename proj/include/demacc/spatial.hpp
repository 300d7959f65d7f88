#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace demacc {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

enum class WeightScheme { InverseDistance, FixedBand };
enum class MoranAssumption { Randomization, Normality };

WeightScheme parse_weight_scheme(const std::string& name);
std::string to_string(WeightScheme s);
MoranAssumption parse_moran_assumption(const std::string& name);
std::string to_string(MoranAssumption a);

/// Sparse spatial weights without self-weights, stored row-wise.
class WeightsMatrix {
 public:
  struct Entry {
    std::size_t j;
    double w;
  };

  /// Takes ownership of per-row neighbour lists; computes S0, S1, S2.
  WeightsMatrix(std::vector<std::vector<Entry>> rows, bool row_standardized);

  std::size_t n() const noexcept { return rows_.size(); }
  std::span<const Entry> row(std::size_t i) const { return rows_.at(i); }
  std::size_t nonzero_count() const noexcept;

  double s0() const noexcept { return s0_; }
  double s1() const noexcept { return s1_; }
  double s2() const noexcept { return s2_; }
  bool row_standardized() const noexcept { return row_standardized_; }

  /// Weight w_ij, or 0 if absent.
  double weight(std::size_t i, std::size_t j) const;

 private:
  std::vector<std::vector<Entry>> rows_;
  double s0_ = 0.0;
  double s1_ = 0.0;
  double s2_ = 0.0;
  bool row_standardized_ = false;
};

struct WeightsOptions {
  WeightScheme scheme = WeightScheme::InverseDistance;
  /// Distance band; nullopt selects the largest nearest-neighbour distance,
  /// which gives every point at least one neighbour.
  std::optional<double> threshold;
  bool row_standardize = false;
};

struct BuiltWeights {
  WeightsMatrix weights;
  double threshold;  ///< the band actually used
};

/// Throws DegenerateError on duplicate coordinates, fewer than 2 points, or
/// an all-zero matrix.
BuiltWeights build_weights(std::span<const Point2> points, const WeightsOptions& options);

/// Global Moran's I. Throws DegenerateError for constant values.
double morans_i(std::span<const double> values, const WeightsMatrix& w);

struct MoranResult {
  double i = 0.0;
  double e_i = 0.0;
  double v_i = 0.0;
  double z = 0.0;
  double p = 1.0;  ///< two-tailed
  double b2 = 0.0;  ///< sample kurtosis
  MoranAssumption assumption = MoranAssumption::Randomization;
};

/// Moran's I with its analytic moments under the chosen null hypothesis.
/// Needs n >= 4.
MoranResult morans_significance(std::span<const double> values, const WeightsMatrix& w,
                                MoranAssumption assumption = MoranAssumption::Randomization);

struct PermutationResult {
  double observed_i = 0.0;
  double pseudo_p = 1.0;
  std::size_t n_perm = 0;
  std::size_t extreme_count = 0;
  double mean_i = 0.0;
  double sd_i = 0.0;
  double min_i = 0.0;
  double max_i = 0.0;
};

/// Two-sided permutation test around E[I] = -1/(n-1). Each replicate draws
/// from its own seed-derived stream, so results do not depend on `threads`.
PermutationResult permutation_test(std::span<const double> values, const WeightsMatrix& w, std::size_t n_perm,
                                   std::uint64_t seed, unsigned threads = 0);

}  // namespace demacc
