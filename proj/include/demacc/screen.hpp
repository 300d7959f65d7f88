#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "demacc/sample.hpp"

namespace demacc {

struct Quartiles {
  double q1 = 0.0;
  double q3 = 0.0;
};

/// Linear-interpolation quantile of already sorted values (the inclusive,
/// spreadsheet-style convention: position (n-1)p).
double quantile_sorted(std::span<const double> sorted, double p);

/// Q1 and Q3 by linear interpolation. Throws DegenerateError for n < 2.
Quartiles quartiles(std::span<const double> values);

struct TukeyFences {
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  /// Values strictly outside [lower, upper] are outliers.
  bool is_outlier(double v) const { return v < lower || v > upper; }
};

TukeyFences tukey_fences(std::span<const double> values, double k = 1.5);

enum class ScreenField { DeltaH, HDem };

ScreenField parse_screen_field(const std::string& name);
std::string to_string(ScreenField f);

struct TukeyResult {
  std::vector<SampleRecord> kept;
  std::vector<SampleRecord> removed;
  TukeyFences fences;
};

/// Single pass of Tukey screening on `field`. Records lacking the field are
/// passed through to `kept`; fences come from the records that have it.
TukeyResult tukey_filter(std::span<const SampleRecord> records, ScreenField field = ScreenField::DeltaH);

struct FilterResult {
  std::vector<SampleRecord> kept;
  std::vector<SampleRecord> removed;
};

/// Drops records with no DEM height, no class, an excluded class, or a DEM
/// height below `min_h`.
FilterResult validity_filter(std::span<const SampleRecord> records, const std::set<int>& exclude_classes,
                             std::optional<double> min_h);

}  // namespace demacc
