#include "demacc/terrain.hpp"

#include <cmath>
#include <numbers>

#include "demacc/error.hpp"

namespace demacc {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

}  // namespace

double downslope_azimuth(double dzdx_east, double dzdy_north) {
  if (dzdx_east == 0.0 && dzdy_north == 0.0) return kFlatAspect;
  // Downslope vector is (-dzdx, -dzdy) in (east, north).
  double az = std::atan2(-dzdx_east, -dzdy_north) * kRadToDeg;
  if (az < 0.0) az += 360.0;
  if (az >= 360.0) az -= 360.0;
  return az;
}

DerivativePair slope_aspect(const Grid& dem, double z_factor) {
  if (!(z_factor > 0.0)) throw ConfigError("z_factor must be positive");
  const Georef& g = dem.georef();
  const double nd = dem.nodata();
  Grid slope(g, nd, nd);
  Grid aspect(g, nd, nd);

  const auto nrows = static_cast<long>(g.nrows);
  const auto ncols = static_cast<long>(g.ncols);
  for (long r = 0; r < nrows; ++r) {
    for (long c = 0; c < ncols; ++c) {
      const double centre = dem.at(r, c);
      if (centre == nd) continue;
      auto z = [&](long dr, long dc) {
        const long rr = r + dr, cc = c + dc;
        if (rr < 0 || rr >= nrows || cc < 0 || cc >= ncols) return centre;
        const double v = dem.at(rr, cc);
        return v == nd ? centre : v;
      };
      // Window a b c / d e f / g h i, north row first.
      const double a = z(-1, -1), b = z(-1, 0), cc = z(-1, 1);
      const double d = z(0, -1), f = z(0, 1);
      const double gg = z(1, -1), h = z(1, 0), i = z(1, 1);
      const double dzdx = ((cc + 2.0 * f + i) - (a + 2.0 * d + gg)) / (8.0 * g.cellsize);
      // Positive toward the south, the usual raster-row orientation.
      const double dzdy = ((gg + 2.0 * h + i) - (a + 2.0 * b + cc)) / (8.0 * g.cellsize);

      slope.at(r, c) = std::atan(z_factor * std::hypot(dzdx, dzdy)) * kRadToDeg;
      aspect.at(r, c) = downslope_azimuth(dzdx, -dzdy);
    }
  }
  return {std::move(slope), std::move(aspect)};
}

}  // namespace demacc
