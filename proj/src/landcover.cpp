#include "demacc/landcover.hpp"

#include <cmath>
#include <limits>

#include "demacc/error.hpp"

namespace demacc {

bool ClassBox::contains(std::span<const double> pixel) const {
  for (std::size_t b = 0; b < pixel.size(); ++b) {
    if (pixel[b] < lo[b] || pixel[b] > hi[b]) return false;
  }
  return true;
}

std::vector<ClassBox> train_parallelepiped(const MultibandGrid& image, std::span<const TrainingPoint> labeled,
                                           double k, const std::map<int, std::string>& legend) {
  if (!(k > 0.0)) throw ConfigError("parallelepiped k must be positive");
  const std::size_t nb = image.band_count();

  // class -> band -> training values
  std::map<int, std::vector<std::vector<double>>> samples;
  for (const auto& p : labeled) {
    const auto cell = cell_of(image.georef(), p.x, p.y);
    if (!cell) {
      throw ConfigError("training point (" + format_double(p.x) + ", " + format_double(p.y) + ") lies off the image");
    }
    auto& per_band = samples[p.class_code];
    per_band.resize(nb);
    bool has_nodata = false;
    for (std::size_t b = 0; b < nb; ++b) has_nodata |= image.band(b).is_nodata(cell->row, cell->col);
    if (has_nodata) continue;
    for (std::size_t b = 0; b < nb; ++b) per_band[b].push_back(image.band(b).at(cell->row, cell->col));
  }

  std::vector<ClassBox> boxes;
  for (const auto& [code, per_band] : samples) {
    const std::size_t n = per_band.front().size();
    if (n < 2) {
      throw DegenerateError("class " + std::to_string(code) + " has " + std::to_string(n) +
                            " usable training pixels; at least 2 are required");
    }
    ClassBox box;
    box.class_code = code;
    const auto it = legend.find(code);
    box.label = it != legend.end() ? it->second : "class_" + std::to_string(code);
    for (const auto& vals : per_band) {
      double mean = 0.0;
      for (double v : vals) mean += v;
      mean /= static_cast<double>(n);
      double ss = 0.0;
      for (double v : vals) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / static_cast<double>(n - 1));
      box.mean.push_back(mean);
      box.lo.push_back(mean - k * sd);
      box.hi.push_back(mean + k * sd);
    }
    boxes.push_back(std::move(box));
  }
  return boxes;
}

Grid classify(const MultibandGrid& image, std::span<const ClassBox> boxes) {
  const std::size_t nb = image.band_count();
  for (const auto& box : boxes) {
    if (box.lo.size() != nb || box.hi.size() != nb || box.mean.size() != nb) {
      throw ConfigError("class box for code " + std::to_string(box.class_code) + " has " +
                        std::to_string(box.lo.size()) + " bands, image has " + std::to_string(nb));
    }
  }
  const Georef& g = image.georef();
  const double nd = image.band(0).nodata();
  Grid out(g, static_cast<double>(kUnclassified), nd);
  std::vector<double> pixel(nb);

  for (std::size_t r = 0; r < g.nrows; ++r) {
    for (std::size_t c = 0; c < g.ncols; ++c) {
      bool missing = false;
      for (std::size_t b = 0; b < nb; ++b) {
        missing |= image.band(b).is_nodata(r, c);
        pixel[b] = image.band(b).at(r, c);
      }
      if (missing) {
        out.at(r, c) = nd;
        continue;
      }
      const ClassBox* best = nullptr;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (const auto& box : boxes) {
        if (!box.contains(pixel)) continue;
        double d2 = 0.0;
        for (std::size_t b = 0; b < nb; ++b) d2 += (pixel[b] - box.mean[b]) * (pixel[b] - box.mean[b]);
        if (d2 < best_d2 || (d2 == best_d2 && best && box.class_code < best->class_code)) {
          best = &box;
          best_d2 = d2;
        }
      }
      out.at(r, c) = best ? static_cast<double>(best->class_code) : static_cast<double>(kUnclassified);
    }
  }
  return out;
}

}  // namespace demacc
