#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "demacc/raster.hpp"

namespace demacc {

struct ControlPoint {
  std::string id;
  double x = 0.0;
  double y = 0.0;
  double h_ref = 0.0;  ///< orthometric reference height (m)
};

/// A control point joined with everything sampled at its location.
/// Missing values are nullopt, never a sentinel.
struct SampleRecord {
  std::string id;
  double x = 0.0;
  double y = 0.0;
  double h_ref = 0.0;
  std::optional<double> h_dem;
  std::optional<double> delta_h;  ///< h_dem - h_ref
  std::optional<int> class_code;
  std::optional<double> slope_deg;
  std::optional<double> aspect_deg;  ///< [0, 360) or -1 for flat
};

enum class ExtractMethod { Nearest, Bilinear };

ExtractMethod parse_extract_method(const std::string& name);
std::string to_string(ExtractMethod m);

/// Bilinear interpolation between the four surrounding cell centres. Points
/// in the outer half-cell ring clamp to the edge centres. nullopt outside the
/// grid or when any contributing cell is nodata.
std::optional<double> sample_bilinear(const Grid& grid, double x, double y);

/// One record per point, in input order.
std::vector<SampleRecord> extract_coincident(const Grid& dem, std::span<const ControlPoint> points,
                                             ExtractMethod method = ExtractMethod::Nearest);

/// Sets class_code by nearest-cell lookup. Codes are rounded to the nearest
/// integer; outside or nodata leaves class_code empty.
void attach_class(const Grid& classmap, std::span<SampleRecord> records);

/// Sets slope/aspect by nearest-cell lookup. Throws ConfigError when the two
/// grids (or `reference`, if given) disagree on georeferencing.
void attach_derivatives(const Grid& slope, const Grid& aspect, std::span<SampleRecord> records,
                        const Georef* reference = nullptr);

}  // namespace demacc
