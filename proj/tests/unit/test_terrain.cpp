#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "demacc/synth.hpp"
#include "demacc/terrain.hpp"

using namespace demacc;

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

const Georef kShape{9, 9, 100.0, 200.0, 2.0};

template <class F>
void for_interior(const Grid& g, F&& f) {
  for (std::size_t r = 1; r + 1 < g.nrows(); ++r) {
    for (std::size_t c = 1; c + 1 < g.ncols(); ++c) f(r, c);
  }
}

double angle_diff(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

}  // namespace

TEST_CASE("constant surface is flat everywhere") {
  const auto d = slope_aspect(Grid(kShape, 5.0));
  for (std::size_t r = 0; r < kShape.nrows; ++r) {
    for (std::size_t c = 0; c < kShape.ncols; ++c) {
      CHECK(d.slope.at(r, c) == 0.0);
      CHECK(d.aspect.at(r, c) == kFlatAspect);
    }
  }
}

TEST_CASE("planes with known orientation") {
  SUBCASE("rising east faces west") {
    const auto d = slope_aspect(make_plane(1.0, 0.0, 0.0, kShape));
    for_interior(d.slope, [&](std::size_t r, std::size_t c) {
      CHECK(d.slope.at(r, c) == doctest::Approx(45.0).epsilon(1e-12));
      CHECK(d.aspect.at(r, c) == doctest::Approx(270.0).epsilon(1e-12));
    });
  }
  SUBCASE("rising north faces south") {
    const auto d = slope_aspect(make_plane(0.0, 1.0, 0.0, kShape));
    for_interior(d.slope, [&](std::size_t r, std::size_t c) {
      CHECK(d.slope.at(r, c) == doctest::Approx(45.0).epsilon(1e-12));
      CHECK(d.aspect.at(r, c) == doctest::Approx(180.0).epsilon(1e-12));
    });
  }
  SUBCASE("falling to the north-east") {
    const auto d = slope_aspect(make_plane(-1.0, -1.0, 0.0, kShape));
    for_interior(d.slope, [&](std::size_t r, std::size_t c) {
      CHECK(d.aspect.at(r, c) == doctest::Approx(45.0).epsilon(1e-12));
      CHECK(d.slope.at(r, c) == doctest::Approx(std::atan(std::sqrt(2.0)) * kDeg).epsilon(1e-12));
    });
  }
}

TEST_CASE("z factor scales the gradient") {
  const auto d = slope_aspect(make_plane(1.0, 0.0, 0.0, kShape), 2.0);
  CHECK(d.slope.at(4, 4) == doctest::Approx(63.43494882292201).epsilon(1e-12));
}

TEST_CASE("random planes match the analytic gradient") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = u(rng), b = u(rng);
    const auto d = slope_aspect(make_plane(a, b, u(rng) * 100, kShape));
    const double slope = std::atan(std::hypot(a, b)) * kDeg;
    double aspect = std::atan2(-a, -b) * kDeg;
    if (aspect < 0) aspect += 360.0;
    for_interior(d.slope, [&](std::size_t r, std::size_t c) {
      CHECK(std::abs(d.slope.at(r, c) - slope) <= 1e-9);
      CHECK(angle_diff(d.aspect.at(r, c), aspect) <= 1e-9);
    });
  }
}

TEST_CASE("rotating the grid rotates aspect and keeps slope") {
  std::mt19937_64 rng(8);
  const Georef sq{12, 12, 0.0, 0.0, 1.0};
  const Grid g = make_smoothed_noise(5.0, 2, sq, 31);
  // Clockwise quarter turn: what was north now faces east.
  std::vector<double> rot(sq.size());
  for (std::size_t r = 0; r < sq.nrows; ++r) {
    for (std::size_t c = 0; c < sq.ncols; ++c) rot[r * sq.ncols + c] = g.at(sq.nrows - 1 - c, r);
  }
  const auto d0 = slope_aspect(g);
  const auto d1 = slope_aspect(Grid(sq, rot));
  for (std::size_t r = 0; r < sq.nrows; ++r) {
    for (std::size_t c = 0; c < sq.ncols; ++c) {
      const std::size_t r0 = sq.nrows - 1 - c, c0 = r;
      CHECK(std::abs(d1.slope.at(r, c) - d0.slope.at(r0, c0)) <= 1e-9);
      if (d0.aspect.at(r0, c0) != kFlatAspect) {
        CHECK(angle_diff(d1.aspect.at(r, c), d0.aspect.at(r0, c0) + 90.0) <= 1e-9);
      }
    }
  }
}

TEST_CASE("nodata is preserved and neighbours fall back to the centre") {
  Grid g = make_plane(1.0, 0.0, 0.0, kShape);
  g.at(4, 4) = g.nodata();
  const auto d = slope_aspect(g);
  CHECK(d.slope.is_nodata(4, 4));
  CHECK(d.aspect.is_nodata(4, 4));
  CHECK(std::isfinite(d.slope.at(4, 5)));
  CHECK(d.slope.at(4, 5) > 0.0);
}

TEST_CASE("downslope azimuth") {
  CHECK(downslope_azimuth(0.0, 0.0) == kFlatAspect);
  CHECK(downslope_azimuth(0.0, -1.0) == doctest::Approx(0.0));
  CHECK(downslope_azimuth(-1.0, 0.0) == doctest::Approx(90.0));
  CHECK(downslope_azimuth(0.0, 1.0) == doctest::Approx(180.0));
  CHECK(downslope_azimuth(1.0, 0.0) == doctest::Approx(270.0));
}
