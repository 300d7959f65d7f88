#include "demacc/synth.hpp"

#include <cmath>
#include <random>
#include <set>

#include "demacc/error.hpp"

namespace demacc {

Grid make_plane(double a, double b, double c, const Georef& shape) {
  Grid g(shape, 0.0);
  for (std::size_t r = 0; r < shape.nrows; ++r) {
    for (std::size_t col = 0; col < shape.ncols; ++col) {
      g.at(r, col) = a * shape.cell_center_x(col) + b * shape.cell_center_y(r) + c;
    }
  }
  return g;
}

Grid make_checkerboard(double amplitude, const Georef& shape) {
  Grid g(shape, 0.0);
  for (std::size_t r = 0; r < shape.nrows; ++r) {
    for (std::size_t c = 0; c < shape.ncols; ++c) g.at(r, c) = (r + c) % 2 == 0 ? amplitude : -amplitude;
  }
  return g;
}

Grid make_smoothed_noise(double sd, unsigned radius, const Georef& shape, std::uint64_t seed) {
  if (!(sd > 0.0)) throw ConfigError("noise sd must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sd);
  Grid g(shape, 0.0);
  for (auto& v : g.values()) v = noise(rng);

  const auto nrows = static_cast<long>(shape.nrows);
  const auto ncols = static_cast<long>(shape.ncols);
  for (unsigned pass = 0; pass < radius; ++pass) {
    Grid next(shape, 0.0);
    for (long r = 0; r < nrows; ++r) {
      for (long c = 0; c < ncols; ++c) {
        double sum = 0.0;
        int count = 0;
        for (long dr = -1; dr <= 1; ++dr) {
          for (long dc = -1; dc <= 1; ++dc) {
            const long rr = r + dr, cc = c + dc;
            if (rr < 0 || rr >= nrows || cc < 0 || cc >= ncols) continue;
            sum += g.at(rr, cc);
            ++count;
          }
        }
        next.at(r, c) = sum / count;
      }
    }
    g = std::move(next);
  }
  return g;
}

std::vector<ControlPoint> scatter_points(const Grid& grid, const ScatterOptions& opt) {
  if (opt.n < 1) throw ConfigError("scatter_points needs n >= 1");
  const Georef& g = grid.georef();
  const double width = static_cast<double>(g.ncols) * g.cellsize;
  const double height = static_cast<double>(g.nrows) * g.cellsize;
  if (opt.n >= 2 && opt.min_separation > std::hypot(width, height)) {
    throw ConfigError("min_separation exceeds the grid diagonal; cannot place 2 points");
  }
  if (opt.snap_to_centres && opt.n > g.size()) throw ConfigError("more snapped points than cells");

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> ux(0.0, width), uy(0.0, height);
  std::uniform_int_distribution<std::size_t> ucol(0, g.ncols - 1), urow(0, g.nrows - 1);
  std::normal_distribution<double> noise(0.0, opt.error_sd > 0.0 ? opt.error_sd : 1.0);

  std::vector<ControlPoint> pts;
  std::set<std::pair<std::size_t, std::size_t>> used_cells;
  const double min_sep2 = opt.min_separation * opt.min_separation;
  const std::size_t budget = opt.max_attempts_per_point * opt.n;
  std::size_t attempts = 0;

  while (pts.size() < opt.n) {
    if (++attempts > budget) {
      throw ConfigError("could not place " + std::to_string(opt.n) + " points with separation " +
                        format_double(opt.min_separation) + " after " + std::to_string(budget) + " attempts");
    }
    double x = 0.0, y = 0.0;
    std::size_t row = 0, col = 0;
    if (opt.snap_to_centres) {
      row = urow(rng);
      col = ucol(rng);
      if (used_cells.contains({row, col})) continue;
      x = g.cell_center_x(col);
      y = g.cell_center_y(row);
    } else {
      x = g.xll + ux(rng);
      y = g.yll + uy(rng);
      const auto cell = cell_of(g, x, y);
      if (!cell) continue;  // rounding at the far edge
      row = cell->row;
      col = cell->col;
    }
    if (grid.is_nodata(row, col)) continue;

    bool too_close = false;
    for (const auto& p : pts) {
      const double dx = p.x - x, dy = p.y - y;
      if (dx * dx + dy * dy < min_sep2) {
        too_close = true;
        break;
      }
    }
    if (too_close) continue;

    double error = 0.0;
    if (opt.error_sd > 0.0) error += noise(rng);
    if (opt.error_field) {
      const auto e = opt.error_field->sample_nearest(x, y);
      if (!e) continue;
      error += *e;
    }
    used_cells.insert({row, col});
    pts.push_back({"P" + std::to_string(pts.size() + 1), x, y, grid.at(row, col) - error});
  }
  return pts;
}

SceneKind parse_scene_kind(const std::string& name) {
  if (name == "plane") return SceneKind::Plane;
  if (name == "checkerboard") return SceneKind::Checkerboard;
  if (name == "smoothed_noise") return SceneKind::SmoothedNoise;
  throw ConfigError("unknown scene kind '" + name + "' (expected plane|checkerboard|smoothed_noise)");
}

std::string to_string(SceneKind k) {
  switch (k) {
    case SceneKind::Plane:
      return "plane";
    case SceneKind::Checkerboard:
      return "checkerboard";
    case SceneKind::SmoothedNoise:
      return "smoothed_noise";
  }
  return "plane";
}

Grid make_scene(const SceneSpec& spec) {
  switch (spec.kind) {
    case SceneKind::Plane:
      return make_plane(spec.a, spec.b, spec.c, spec.shape);
    case SceneKind::Checkerboard:
      return make_checkerboard(spec.amplitude, spec.shape);
    case SceneKind::SmoothedNoise:
      return make_smoothed_noise(spec.sd, spec.radius, spec.shape, spec.seed);
  }
  throw ConfigError("unknown scene kind");
}

}  // namespace demacc
