#include "demacc/screen.hpp"

#include <algorithm>
#include <cmath>

#include "demacc/error.hpp"

namespace demacc {

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DegenerateError("quantile of an empty set");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted[sorted.size() - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

Quartiles quartiles(std::span<const double> values) {
  if (values.size() < 2) throw DegenerateError("quartiles need at least 2 values");
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) throw DegenerateError("quartiles need finite values");
  }
  std::sort(sorted.begin(), sorted.end());
  return {quantile_sorted(sorted, 0.25), quantile_sorted(sorted, 0.75)};
}

TukeyFences tukey_fences(std::span<const double> values, double k) {
  const auto [q1, q3] = quartiles(values);
  const double iqr = q3 - q1;
  return {q1, q3, iqr, q1 - k * iqr, q3 + k * iqr};
}

ScreenField parse_screen_field(const std::string& name) {
  if (name == "delta_h") return ScreenField::DeltaH;
  if (name == "h_dem") return ScreenField::HDem;
  throw ConfigError("unknown screening field '" + name + "' (expected delta_h|h_dem)");
}

std::string to_string(ScreenField f) { return f == ScreenField::DeltaH ? "delta_h" : "h_dem"; }

namespace {

const std::optional<double>& field_of(const SampleRecord& r, ScreenField f) {
  return f == ScreenField::DeltaH ? r.delta_h : r.h_dem;
}

}  // namespace

TukeyResult tukey_filter(std::span<const SampleRecord> records, ScreenField field) {
  std::vector<double> values;
  for (const auto& r : records) {
    if (const auto& v = field_of(r, field)) values.push_back(*v);
  }
  if (values.size() < 2) throw DegenerateError("Tukey screening needs at least 2 values of " + to_string(field));

  TukeyResult res;
  res.fences = tukey_fences(values);
  for (const auto& r : records) {
    const auto& v = field_of(r, field);
    if (v && res.fences.is_outlier(*v)) {
      res.removed.push_back(r);
    } else {
      res.kept.push_back(r);
    }
  }
  return res;
}

FilterResult validity_filter(std::span<const SampleRecord> records, const std::set<int>& exclude_classes,
                             std::optional<double> min_h) {
  FilterResult res;
  for (const auto& r : records) {
    const bool invalid = !r.h_dem || !r.class_code || exclude_classes.contains(*r.class_code) ||
                         (min_h && *r.h_dem < *min_h);
    (invalid ? res.removed : res.kept).push_back(r);
  }
  return res;
}

}  // namespace demacc
