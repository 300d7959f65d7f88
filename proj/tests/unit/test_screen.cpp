#include <doctest.h>

#include <random>

#include "../oracles.hpp"
#include "demacc/error.hpp"
#include "demacc/screen.hpp"

using namespace demacc;

namespace {

std::vector<SampleRecord> records_from(const std::vector<double>& deltas) {
  std::vector<SampleRecord> recs;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    SampleRecord r;
    r.id = std::to_string(i);
    r.h_dem = 10.0 + deltas[i];
    r.delta_h = deltas[i];
    r.class_code = 1;
    recs.push_back(r);
  }
  return recs;
}

}  // namespace

TEST_CASE("quartiles by linear interpolation") {
  const std::vector<double> a{5, 1, 4, 2, 3};
  const auto q = quartiles(a);
  CHECK(q.q1 == 2.0);
  CHECK(q.q3 == 4.0);
  const std::vector<double> c{5, 5, 5, 5};
  CHECK(quartiles(c).q1 == 5.0);
  CHECK(quartiles(c).q3 == 5.0);
  const std::vector<double> one{1};
  CHECK_THROWS_AS(quartiles(one), DegenerateError);
  // (n-1)p = 0.75 for n = 4: 1 + 0.75 * (2 - 1)
  const std::vector<double> four{1, 2, 3, 4};
  CHECK(quartiles(four).q1 == 1.75);
  CHECK(quartiles(four).q3 == 3.25);
}

TEST_CASE("tukey_filter removes strictly outside the fences") {
  SUBCASE("zero IQR") {
    const auto res = tukey_filter(records_from({0, 0, 0, 0, 100}));
    REQUIRE(res.removed.size() == 1);
    CHECK(*res.removed[0].delta_h == 100);
    CHECK(res.fences.lower == 0);
    CHECK(res.fences.upper == 0);
  }
  SUBCASE("symmetric") {
    const auto res = tukey_filter(records_from({-2, -1, 0, 1, 2}));
    CHECK(res.removed.empty());
    CHECK(res.kept.size() == 5);
  }
  SUBCASE("value on the upper fence is kept") {
    // q1 = 1, q3 = 3, iqr = 2, upper = 6
    const auto res = tukey_filter(records_from({0, 1, 2, 3, 6}));
    CHECK(res.fences.upper == 6.0);
    CHECK(res.removed.empty());
  }
  SUBCASE("h_dem field") {
    auto recs = records_from({0, 0, 0, 0, 0});
    recs[4].h_dem = 1000;
    const auto res = tukey_filter(recs, ScreenField::HDem);
    CHECK(res.removed.size() == 1);
  }
  SUBCASE("insufficient data") { CHECK_THROWS_AS(tukey_filter(records_from({1})), DegenerateError); }
}

TEST_CASE("tukey_filter matches a brute-force fence derivation") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal(0, 2);
  std::uniform_int_distribution<int> ints(-5, 5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> v(5 + rng() % 200);
    for (auto& x : v) x = trial % 2 ? normal(rng) : ints(rng);
    v[0] = 40;  // planted outlier
    const auto res = tukey_filter(records_from(v));
    std::vector<double> got;
    for (const auto& r : res.removed) got.push_back(*r.delta_h);
    CHECK(got == oracle::tukey_outliers_bruteforce(v));
    CHECK(res.kept.size() + res.removed.size() == v.size());
  }
}

TEST_CASE("q3 never decreases when a value >= max is added") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(2 + rng() % 50);
    for (auto& x : v) x = normal(rng);
    const double before = quartiles(v).q3;
    v.push_back(*std::max_element(v.begin(), v.end()) + std::abs(normal(rng)));
    CHECK(quartiles(v).q3 >= before);
  }
}

TEST_CASE("validity_filter") {
  auto recs = records_from({0, 0, 0, 0});
  recs[0].class_code = 5;
  recs[1].h_dem = -1;
  recs[2].class_code.reset();
  const auto res = validity_filter(recs, {5}, 0.0);
  CHECK(res.kept.size() == 1);
  CHECK(res.removed.size() == 3);
  CHECK(res.kept[0].id == "3");

  auto missing = records_from({0});
  missing[0].h_dem.reset();
  CHECK(validity_filter(missing, {}, std::nullopt).removed.size() == 1);

  // Without a minimum height, negative heights pass.
  CHECK(validity_filter(recs, {}, std::nullopt).kept.size() == 3);
}
