#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "demacc/raster.hpp"

namespace demacc {

inline constexpr int kUnclassified = 0;

struct ClassBox {
  int class_code = 0;
  std::string label;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> mean;

  bool contains(std::span<const double> pixel) const;
};

struct TrainingPoint {
  double x = 0.0;
  double y = 0.0;
  int class_code = 0;
};

/// Per class and band, box = mean +/- k * sd of the training pixels (sample
/// sd). Classes need at least 2 training pixels; labels come from `legend`
/// when present.
std::vector<ClassBox> train_parallelepiped(const MultibandGrid& image, std::span<const TrainingPoint> labeled,
                                           double k = 2.0, const std::map<int, std::string>& legend = {});

/// Assigns each pixel to the box containing it on every band. Overlaps go to
/// the nearest class mean (Euclidean), ties to the lowest code; pixels in no
/// box get kUnclassified, pixels with nodata in any band get nodata.
Grid classify(const MultibandGrid& image, std::span<const ClassBox> boxes);

}  // namespace demacc
