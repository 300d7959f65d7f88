#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace demacc {

/// Georeferencing of a corner-registered, north-up grid.
struct Georef {
  std::size_t ncols = 0;
  std::size_t nrows = 0;
  double xll = 0.0;  ///< west edge
  double yll = 0.0;  ///< south edge
  double cellsize = 1.0;

  bool operator==(const Georef&) const = default;

  double cell_center_x(std::size_t col) const { return xll + (static_cast<double>(col) + 0.5) * cellsize; }
  /// Row 0 is the northernmost row.
  double cell_center_y(std::size_t row) const {
    return yll + (static_cast<double>(nrows - 1 - row) + 0.5) * cellsize;
  }
  std::size_t size() const { return ncols * nrows; }
};

struct CellIndex {
  std::size_t row = 0;
  std::size_t col = 0;

  bool operator==(const CellIndex&) const = default;
};

/// Cell whose half-open footprint contains (x, y), or nullopt when the point
/// falls outside the grid (points on the north or east outer edge included).
std::optional<CellIndex> cell_of(const Georef& geo, double x, double y);

inline constexpr double kDefaultNodata = -9999.0;

/// Single-band raster with row-major, north-first storage.
class Grid {
 public:
  Grid(Georef geo, std::vector<double> values, double nodata = kDefaultNodata);
  Grid(Georef geo, double fill, double nodata = kDefaultNodata);

  const Georef& georef() const noexcept { return geo_; }
  std::size_t ncols() const noexcept { return geo_.ncols; }
  std::size_t nrows() const noexcept { return geo_.nrows; }
  double cellsize() const noexcept { return geo_.cellsize; }
  double nodata() const noexcept { return nodata_; }

  double at(std::size_t row, std::size_t col) const { return values_[row * geo_.ncols + col]; }
  double& at(std::size_t row, std::size_t col) { return values_[row * geo_.ncols + col]; }
  bool is_nodata(std::size_t row, std::size_t col) const { return at(row, col) == nodata_; }

  /// Value at the cell containing (x, y); nullopt outside or on nodata.
  std::optional<double> sample_nearest(double x, double y) const;

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  bool operator==(const Grid&) const = default;

 private:
  Georef geo_;
  std::vector<double> values_;
  double nodata_;
};

/// Bands sharing one georeferencing.
class MultibandGrid {
 public:
  explicit MultibandGrid(std::vector<Grid> bands);

  std::size_t band_count() const noexcept { return bands_.size(); }
  const Grid& band(std::size_t i) const { return bands_.at(i); }
  const Georef& georef() const { return bands_.front().georef(); }
  const std::vector<Grid>& bands() const noexcept { return bands_; }

 private:
  std::vector<Grid> bands_;
};

/// Reads an ESRI ASCII grid. Keywords are case-insensitive, CRLF is accepted,
/// and lines starting with '#' before the header are skipped.
Grid read_ascii_grid(std::istream& in);
Grid read_ascii_grid_file(const std::string& path);

/// Writes values in shortest round-trip decimal form. Optional comment lines
/// are emitted first, each prefixed by "# ".
void write_ascii_grid(std::ostream& out, const Grid& grid, std::span<const std::string> comments = {});
void write_ascii_grid_file(const std::string& path, const Grid& grid, std::span<const std::string> comments = {});

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace demacc
