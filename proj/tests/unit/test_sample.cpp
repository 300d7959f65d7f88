#include <doctest.h>

#include <algorithm>
#include <random>

#include "demacc/error.hpp"
#include "demacc/sample.hpp"
#include "demacc/synth.hpp"
#include "demacc/terrain.hpp"

using namespace demacc;

TEST_CASE("nearest extraction on a constant surface") {
  const Grid dem(Georef{2, 2, 0, 0, 1}, 10.0);
  const std::vector<ControlPoint> pts{{"a", 0.3, 1.7, 10.0}, {"b", 1.9, 0.1, 9.5}};
  const auto recs = extract_coincident(dem, pts);
  REQUIRE(recs.size() == 2);
  CHECK(*recs[0].h_dem == 10.0);
  CHECK(*recs[0].delta_h == 0.0);
  CHECK(*recs[1].delta_h == doctest::Approx(0.5));
}

TEST_CASE("bilinear interpolates between cell centres") {
  // z = x sampled at centres 0.5 and 1.5
  const Grid dem(Georef{2, 2, 0, 0, 1}, std::vector<double>{0.5, 1.5, 0.5, 1.5});
  const std::vector<ControlPoint> pts{{"a", 1.0, 0.5, 0.0}, {"b", 0.75, 1.2, 0.0}};
  const auto recs = extract_coincident(dem, pts, ExtractMethod::Bilinear);
  CHECK(*recs[0].h_dem == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(*recs[1].h_dem == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("bilinear clamps in the outer half-cell and rejects nodata corners") {
  const Grid dem(Georef{2, 2, 0, 0, 1}, std::vector<double>{0.5, 1.5, 0.5, -9999});
  // Inside the north-west cell's outer half: only its own centre contributes.
  CHECK(*sample_bilinear(dem, 0.2, 1.8) == 0.5);
  CHECK_FALSE(sample_bilinear(dem, 1.0, 1.0).has_value());
}

TEST_CASE("points outside the grid have no height") {
  const Grid dem(Georef{2, 2, 0, 0, 1}, 10.0);
  const std::vector<ControlPoint> pts{{"out", 5.0, 5.0, 1.0}};
  for (auto m : {ExtractMethod::Nearest, ExtractMethod::Bilinear}) {
    const auto recs = extract_coincident(dem, pts, m);
    CHECK_FALSE(recs[0].h_dem.has_value());
    CHECK_FALSE(recs[0].delta_h.has_value());
  }
}

TEST_CASE("delta_h identity, constant-grid agreement and permutation equivariance") {
  std::mt19937_64 rng(3);
  const Georef geo{15, 12, 100, 200, 20};
  const Grid dem = make_smoothed_noise(5.0, 1, geo, 9);
  const Grid flat(geo, 42.0);
  std::uniform_real_distribution<double> ux(90, 420), uy(190, 450), uh(0, 50);
  std::vector<ControlPoint> pts;
  for (int i = 0; i < 200; ++i) pts.push_back({"p" + std::to_string(i), ux(rng), uy(rng), uh(rng)});

  const auto recs = extract_coincident(dem, pts, ExtractMethod::Bilinear);
  for (const auto& r : recs) {
    if (r.h_dem) CHECK(*r.delta_h == *r.h_dem - r.h_ref);
  }

  const auto near = extract_coincident(flat, pts, ExtractMethod::Nearest);
  const auto bil = extract_coincident(flat, pts, ExtractMethod::Bilinear);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(near[i].h_dem.has_value() == bil[i].h_dem.has_value());
    if (near[i].h_dem) CHECK(*near[i].h_dem == *bil[i].h_dem);
  }

  auto shuffled = pts;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto recs2 = extract_coincident(dem, shuffled, ExtractMethod::Bilinear);
  for (std::size_t i = 0; i < shuffled.size(); ++i) {
    const auto it = std::find_if(recs.begin(), recs.end(), [&](const SampleRecord& r) { return r.id == shuffled[i].id; });
    CHECK(recs2[i].h_dem == it->h_dem);
  }
}

TEST_CASE("attach_class uses the containing cell") {
  const Grid classes(Georef{2, 1, 0, 0, 1}, std::vector<double>{3, -9999});
  std::vector<SampleRecord> recs(3);
  recs[0].x = 0.999;  // interior, just west of the class boundary
  recs[0].y = 0.5;
  recs[1].x = 1.001;
  recs[1].y = 0.5;
  recs[2].x = 7;
  recs[2].y = 0.5;
  attach_class(classes, recs);
  CHECK(recs[0].class_code == 3);
  CHECK_FALSE(recs[1].class_code.has_value());
  CHECK_FALSE(recs[2].class_code.has_value());
}

TEST_CASE("attach_derivatives") {
  const Georef geo{5, 5, 0, 0, 1};
  SUBCASE("flat surface") {
    const auto d = slope_aspect(Grid(geo, 3.0));
    std::vector<SampleRecord> recs(1);
    recs[0].x = 2.5;
    recs[0].y = 2.5;
    attach_derivatives(d.slope, d.aspect, recs, &geo);
    CHECK(*recs[0].slope_deg == 0.0);
    CHECK(*recs[0].aspect_deg == -1.0);
  }
  SUBCASE("ramp") {
    const auto d = slope_aspect(make_plane(1, 0, 0, geo));
    std::vector<SampleRecord> recs(1);
    recs[0].x = 2.5;
    recs[0].y = 2.5;
    attach_derivatives(d.slope, d.aspect, recs);
    CHECK(*recs[0].slope_deg == doctest::Approx(45.0).epsilon(1e-12));
  }
  SUBCASE("mismatched cellsize") {
    const Grid a(geo, 0.0);
    const Grid b(Georef{5, 5, 0, 0, 2}, 0.0);
    std::vector<SampleRecord> recs(1);
    CHECK_THROWS_AS(attach_derivatives(a, b, recs), ConfigError);
    const Georef other{5, 5, 0, 0, 2};
    CHECK_THROWS_AS(attach_derivatives(a, a, recs, &other), ConfigError);
  }
}

TEST_CASE("extraction method names") {
  CHECK(parse_extract_method("nearest") == ExtractMethod::Nearest);
  CHECK(parse_extract_method("bilinear") == ExtractMethod::Bilinear);
  CHECK_THROWS_AS(parse_extract_method("cubic"), ConfigError);
}
