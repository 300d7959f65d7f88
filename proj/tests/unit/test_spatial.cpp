#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "demacc/error.hpp"
#include "demacc/spatial.hpp"

using namespace demacc;

namespace {

std::vector<Point2> lattice(std::size_t side) {
  std::vector<Point2> pts;
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) pts.push_back({static_cast<double>(c), static_cast<double>(r)});
  }
  return pts;
}

std::vector<std::vector<double>> dense(const WeightsMatrix& w) {
  std::vector<std::vector<double>> d(w.n(), std::vector<double>(w.n(), 0.0));
  for (std::size_t i = 0; i < w.n(); ++i) {
    for (const auto& e : w.row(i)) d[i][e.j] = e.w;
  }
  return d;
}

WeightsOptions band(double t) {
  WeightsOptions o;
  o.scheme = WeightScheme::FixedBand;
  o.threshold = t;
  return o;
}

}  // namespace

TEST_CASE("two points with inverse distance and auto threshold") {
  const std::vector<Point2> pts{{0, 0}, {2, 0}};
  const auto bw = build_weights(pts, {});
  CHECK(bw.threshold == 2.0);
  CHECK(bw.weights.weight(0, 1) == 0.5);
  CHECK(bw.weights.weight(1, 0) == 0.5);
  CHECK(bw.weights.s0() == 1.0);
}

TEST_CASE("fixed band on the unit square gives rook adjacency") {
  const auto bw = build_weights(lattice(2), band(1.0));
  CHECK(bw.weights.s0() == 8.0);
  CHECK(bw.weights.weight(0, 3) == 0.0);  // diagonal
  CHECK(bw.weights.nonzero_count() == 8);
}

TEST_CASE("aggregates match their definitions") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 10);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Point2> pts(4 + rng() % 20);
    for (auto& p : pts) p = {u(rng), u(rng)};
    WeightsOptions opt;
    opt.row_standardize = trial % 2 == 0;
    opt.threshold = 4.0 + u(rng);
    const auto w = build_weights(pts, opt).weights;
    const auto d = dense(w);
    const std::size_t n = d.size();
    double s0 = 0, s1 = 0, s2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0, col = 0;
      for (std::size_t j = 0; j < n; ++j) {
        s0 += d[i][j];
        s1 += 0.5 * (d[i][j] + d[j][i]) * (d[i][j] + d[j][i]);
        row += d[i][j];
        col += d[j][i];
      }
      s2 += (row + col) * (row + col);
    }
    CHECK(std::abs(w.s0() - s0) <= 1e-12 * s0);
    CHECK(std::abs(w.s1() - s1) <= 1e-12 * s1);
    CHECK(std::abs(w.s2() - s2) <= 1e-12 * s2);
  }
}

TEST_CASE("row standardization") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 10);
  std::vector<Point2> pts(30);
  for (auto& p : pts) p = {u(rng), u(rng)};
  WeightsOptions opt;
  opt.row_standardize = true;
  const auto w = build_weights(pts, opt).weights;
  CHECK(w.row_standardized());
  for (std::size_t i = 0; i < w.n(); ++i) {
    double sum = 0;
    for (const auto& e : w.row(i)) sum += e.w;
    if (!w.row(i).empty()) CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("weights errors") {
  const std::vector<Point2> dup{{0, 0}, {1, 1}, {0, 0}};
  CHECK_THROWS_AS(build_weights(dup, {}), DegenerateError);
  const std::vector<Point2> far{{0, 0}, {10, 0}};
  CHECK_THROWS_AS(build_weights(far, band(1.0)), DegenerateError);
  const std::vector<Point2> single{{0, 0}};
  CHECK_THROWS_AS(build_weights(single, {}), DegenerateError);
}

TEST_CASE("Moran's I on a checkerboard with rook weights is -1") {
  const auto w = build_weights(lattice(4), band(1.0)).weights;
  std::vector<double> v;
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) v.push_back((r + c) % 2 ? 1.0 : -1.0);
  }
  CHECK(std::abs(morans_i(v, w) + 1.0) <= 1e-12);
}

TEST_CASE("Moran's I errors and brute-force agreement") {
  const std::vector<Point2> line{{0, 0}, {1, 0}, {2, 0}};
  const auto w = build_weights(line, band(1.0)).weights;
  const std::vector<double> v{1, 2, 3};
  CHECK(std::abs(morans_i(v, w) - oracle::morans_i_dense(v, dense(w))) <= 1e-15);
  const std::vector<double> flat{4, 4, 4};
  CHECK_THROWS_AS(morans_i(flat, w), DegenerateError);
  const std::vector<double> short_v{1, 2};
  CHECK_THROWS_AS(morans_i(short_v, w), ConfigError);
  CHECK_THROWS_AS(morans_significance(v, w), DegenerateError);  // n < 4
}

TEST_CASE("Moran's I is invariant under affine maps of the values") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0, 20);
  std::normal_distribution<double> val(0, 1);
  std::vector<Point2> pts(60);
  for (auto& p : pts) p = {u(rng), u(rng)};
  const auto w = build_weights(pts, {}).weights;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(pts.size()), y(pts.size());
    const double a = trial % 2 ? 4.0 : -0.5, b = 3.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = val(rng);
      y[i] = a * x[i] + b;
    }
    CHECK(std::abs(morans_i(x, w) - morans_i(y, w)) <= 1e-12);
  }
}

TEST_CASE("analytic moments equal exhaustive permutation moments") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 5);
  std::normal_distribution<double> val(0, 1);
  std::size_t compared = 0;
  for (std::size_t n : {4, 5, 6}) {
    for (int trial = 0; trial < 6; ++trial) {
      std::vector<Point2> pts(n);
      for (auto& p : pts) p = {u(rng), u(rng)};
      std::vector<double> x(n);
      for (auto& v : x) v = trial % 3 == 0 ? std::exp(val(rng)) : val(rng);
      WeightsOptions opt;
      opt.scheme = trial % 2 ? WeightScheme::FixedBand : WeightScheme::InverseDistance;
      opt.threshold = trial % 2 ? std::optional<double>(3.0) : std::nullopt;
      opt.row_standardize = trial >= 4;
      BuiltWeights bw = [&] {
        for (;;) {
          try {
            return build_weights(pts, opt);
          } catch (const DegenerateError&) {
            for (auto& p : pts) p = {u(rng), u(rng)};
          }
        }
      }();
      const auto [mean, var] = oracle::exhaustive_permutation_moments(x, dense(bw.weights));
      if (var < 1e-12) {
        // Complete graph: I is the same for every permutation.
        CHECK_THROWS_AS(morans_significance(x, bw.weights), DegenerateError);
        continue;
      }
      const auto res = morans_significance(x, bw.weights, MoranAssumption::Randomization);
      CHECK(std::abs(res.e_i - mean) <= 1e-12);
      CHECK(std::abs(res.v_i - var) <= 1e-9);
      ++compared;
    }
  }
  CHECK(compared >= 12);
}

TEST_CASE("expected value and normality variant") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> val(0, 1);
  const auto w = build_weights(lattice(5), band(1.0)).weights;
  std::vector<double> x(25);
  for (auto& v : x) v = val(rng);
  const auto r = morans_significance(x, w, MoranAssumption::Randomization);
  const auto nrm = morans_significance(x, w, MoranAssumption::Normality);
  CHECK(std::abs(r.e_i + 1.0 / 24.0) <= 1e-15);
  CHECK(r.i == nrm.i);
  CHECK(nrm.v_i > 0);
  CHECK(r.z == doctest::Approx((r.i - r.e_i) / std::sqrt(r.v_i)));
  // Normal data: b2 near 3, so the two variances are close.
  CHECK(std::abs(r.v_i - nrm.v_i) / nrm.v_i < 0.5);
}

TEST_CASE("permutation test") {
  const auto w = build_weights(lattice(6), band(1.0)).weights;
  std::vector<double> checker;
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 0; c < 6; ++c) checker.push_back((r + c) % 2 ? 1.0 : -1.0);
  }
  SUBCASE("extreme pattern") {
    const auto p = permutation_test(checker, w, 999, 1);
    CHECK(p.pseudo_p <= 0.01);
    CHECK(p.observed_i == doctest::Approx(-1.0));
  }
  SUBCASE("deterministic and independent of thread count") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> val(0, 1);
    std::vector<double> x(36);
    for (auto& v : x) v = val(rng);
    const auto a = permutation_test(x, w, 999, 42, 1);
    const auto b = permutation_test(x, w, 999, 42, 4);
    const auto c = permutation_test(x, w, 999, 42, 0);
    CHECK(a.pseudo_p == b.pseudo_p);
    CHECK(a.mean_i == b.mean_i);
    CHECK(a.pseudo_p == c.pseudo_p);
    CHECK(a.sd_i == c.sd_i);
  }
  SUBCASE("white noise is rarely significant") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> val(0, 1);
    int significant = 0;
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<double> x(36);
      for (auto& v : x) v = val(rng);
      if (permutation_test(x, w, 999, trial).pseudo_p <= 0.05) ++significant;
    }
    CHECK(significant <= 8);
  }
  SUBCASE("argument checks") {
    CHECK_THROWS_AS(permutation_test(checker, w, 10, 1), ConfigError);
  }
}

TEST_CASE("scheme names") {
  CHECK(parse_weight_scheme("fixed_band") == WeightScheme::FixedBand);
  CHECK_THROWS_AS(parse_weight_scheme("knn"), ConfigError);
  CHECK(parse_moran_assumption("normality") == MoranAssumption::Normality);
  CHECK_THROWS_AS(parse_moran_assumption("x"), ConfigError);
}
