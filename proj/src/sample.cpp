#include "demacc/sample.hpp"

#include <algorithm>
#include <cmath>

#include "demacc/error.hpp"

namespace demacc {

ExtractMethod parse_extract_method(const std::string& name) {
  if (name == "nearest") return ExtractMethod::Nearest;
  if (name == "bilinear") return ExtractMethod::Bilinear;
  throw ConfigError("unknown extraction method '" + name + "' (expected nearest|bilinear)");
}

std::string to_string(ExtractMethod m) { return m == ExtractMethod::Nearest ? "nearest" : "bilinear"; }

std::optional<double> sample_bilinear(const Grid& grid, double x, double y) {
  const Georef& g = grid.georef();
  if (!cell_of(g, x, y)) return std::nullopt;

  // Continuous position in cell-centre units; u grows east, v grows north.
  const double u = (x - g.xll) / g.cellsize - 0.5;
  const double v = (y - g.yll) / g.cellsize - 0.5;
  const double max_col = static_cast<double>(g.ncols - 1);
  const double max_row = static_cast<double>(g.nrows - 1);
  const double uc = std::clamp(u, 0.0, max_col);
  const double vc = std::clamp(v, 0.0, max_row);

  const auto c0 = static_cast<std::size_t>(std::floor(uc));
  const auto s0 = static_cast<std::size_t>(std::floor(vc));
  const std::size_t c1 = std::min(c0 + 1, g.ncols - 1);
  const std::size_t s1 = std::min(s0 + 1, g.nrows - 1);
  const double fu = uc - static_cast<double>(c0);
  const double fv = vc - static_cast<double>(s0);

  // s* index rows from the south; storage is north-first.
  const std::size_t r0 = g.nrows - 1 - s0;
  const std::size_t r1 = g.nrows - 1 - s1;
  const double z00 = grid.at(r0, c0), z10 = grid.at(r0, c1);
  const double z01 = grid.at(r1, c0), z11 = grid.at(r1, c1);
  const double nd = grid.nodata();
  if (z00 == nd || z10 == nd || z01 == nd || z11 == nd) return std::nullopt;

  const double south = z00 + fu * (z10 - z00);
  const double north = z01 + fu * (z11 - z01);
  return south + fv * (north - south);
}

std::vector<SampleRecord> extract_coincident(const Grid& dem, std::span<const ControlPoint> points,
                                             ExtractMethod method) {
  std::vector<SampleRecord> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    SampleRecord rec;
    rec.id = p.id;
    rec.x = p.x;
    rec.y = p.y;
    rec.h_ref = p.h_ref;
    rec.h_dem = method == ExtractMethod::Nearest ? dem.sample_nearest(p.x, p.y) : sample_bilinear(dem, p.x, p.y);
    if (rec.h_dem) rec.delta_h = *rec.h_dem - rec.h_ref;
    out.push_back(std::move(rec));
  }
  return out;
}

void attach_class(const Grid& classmap, std::span<SampleRecord> records) {
  for (auto& rec : records) {
    const auto v = classmap.sample_nearest(rec.x, rec.y);
    rec.class_code = v ? std::optional<int>(static_cast<int>(std::lround(*v))) : std::nullopt;
  }
}

void attach_derivatives(const Grid& slope, const Grid& aspect, std::span<SampleRecord> records,
                        const Georef* reference) {
  if (!(slope.georef() == aspect.georef())) throw ConfigError("slope and aspect grids differ in georeferencing");
  if (reference && !(slope.georef() == *reference)) {
    throw ConfigError("terrain derivative grids differ in georeferencing from the DEM");
  }
  for (auto& rec : records) {
    rec.slope_deg = slope.sample_nearest(rec.x, rec.y);
    rec.aspect_deg = aspect.sample_nearest(rec.x, rec.y);
  }
}

}  // namespace demacc
