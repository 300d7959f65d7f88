#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "demacc/raster.hpp"
#include "demacc/sample.hpp"

namespace demacc {

/// z = a x + b y + c evaluated at cell centres.
Grid make_plane(double a, double b, double c, const Georef& shape);

/// +amplitude / -amplitude alternating cell by cell.
Grid make_checkerboard(double amplitude, const Georef& shape);

/// Gaussian white noise with standard deviation `sd`, then a 3x3 box filter
/// applied `radius` times (edge cells average their in-grid neighbours).
/// radius 0 leaves the field spatially independent.
Grid make_smoothed_noise(double sd, unsigned radius, const Georef& shape, std::uint64_t seed);

struct ScatterOptions {
  std::size_t n = 1;
  std::uint64_t seed = 0;
  double min_separation = 0.0;
  /// Place points at cell centres (distinct cells) instead of anywhere.
  bool snap_to_centres = false;
  /// Error planted into h_ref so that delta_h = +error. Either an iid
  /// Gaussian sd, a field sampled at each point, or both.
  double error_sd = 0.0;
  const Grid* error_field = nullptr;
  std::size_t max_attempts_per_point = 1000;
};

/// Uniformly scattered control points with rejection on `min_separation`;
/// h_ref is the grid value at the point minus the planted error. Throws
/// ConfigError when the packing is infeasible.
std::vector<ControlPoint> scatter_points(const Grid& grid, const ScatterOptions& options);

enum class SceneKind { Plane, Checkerboard, SmoothedNoise };

SceneKind parse_scene_kind(const std::string& name);
std::string to_string(SceneKind k);

struct SceneSpec {
  SceneKind kind = SceneKind::Plane;
  Georef shape{10, 10, 0.0, 0.0, 1.0};
  double a = 0.0, b = 0.0, c = 0.0;  ///< plane
  double amplitude = 1.0;            ///< checkerboard
  double sd = 1.0;                   ///< smoothed noise
  unsigned radius = 0;
  std::uint64_t seed = 0;
};

Grid make_scene(const SceneSpec& spec);

}  // namespace demacc
