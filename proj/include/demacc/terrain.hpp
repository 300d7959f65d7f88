#pragma once

#include "demacc/raster.hpp"

namespace demacc {

/// Aspect value used for cells without any gradient.
inline constexpr double kFlatAspect = -1.0;

struct DerivativePair {
  Grid slope;   ///< degrees in [0, 90]
  Grid aspect;  ///< degrees clockwise from north in [0, 360), or kFlatAspect
};

/// Slope and aspect from Horn's 3x3 weighted finite differences. Missing or
/// off-grid neighbours take the centre value; nodata centres stay nodata.
DerivativePair slope_aspect(const Grid& dem, double z_factor = 1.0);

/// Compass azimuth (clockwise from north, [0, 360)) of the downslope
/// direction for a surface with gradient (dz/dx east, dz/dy north).
/// Returns kFlatAspect for a zero gradient.
double downslope_azimuth(double dzdx_east, double dzdy_north);

}  // namespace demacc
