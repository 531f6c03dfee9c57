#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gwl/error.hpp"
#include "gwl/random.hpp"
#include "gwl/weighting.hpp"

using namespace gwl;

namespace {

DensityVector of(std::vector<double> s) {
  DensityVector dv;
  dv.s = std::move(s);
  dv.gamma_s = 1.0;
  return dv;
}

}  // namespace

TEST_CASE("scheme names round trip") {
  for (auto s : {Scheme::none, Scheme::sqrt_density, Scheme::density, Scheme::square,
                 Scheme::inv_sqrt, Scheme::inv, Scheme::inv_square, Scheme::signed_density,
                 Scheme::random})
    CHECK(parse_scheme(scheme_name(s)) == s);
  CHECK(parse_scheme_list("none,5,7") ==
        std::vector<Scheme>{Scheme::none, Scheme::inv, Scheme::signed_density});
  CHECK_THROWS_AS(parse_scheme("9"), Error);
  CHECK(uses_density(Scheme::signed_density));
  CHECK_FALSE(uses_density(Scheme::random));
  CHECK_FALSE(uses_density(Scheme::none));
}

TEST_CASE("density of three collinear points") {
  const std::vector<double> pts{0.0, 1.0, 2.0};
  const auto dv = density(FeatureView(pts, 1), 1.0);
  const std::vector<double> expect{1.3861950800601766, 1.7357588823428847, 1.3861950800601766};
  for (int i = 0; i < 3; ++i) CHECK(std::abs(dv.s[i] - expect[i]) <= 1e-12);

  const std::vector<double> one{3.5};
  CHECK(density(FeatureView(one, 1), 2.0).s == std::vector<double>{1.0});

  const auto flat = density(FeatureView(pts, 1), 1e-12);
  for (double v : flat.s) CHECK(std::abs(v - 3.0) < 1e-9);
}

TEST_CASE("signed density") {
  const std::vector<double> pts{0.0, 0.0, 1.5, 0.4, -1.0, 2.0};
  const std::vector<double> same{1, 1, 1};
  const auto a = signed_density(FeatureView(pts, 2), same, 0.8);
  CHECK(*a.sy == a.s);

  const std::vector<double> two{0.0, 2.0};
  const std::vector<double> opp{1, -1};
  const auto b = signed_density(FeatureView(two, 1), opp, 0.5);
  const double expect = 1.0 - std::exp(-0.5 * 4.0);
  CHECK((*b.sy)[0] == doctest::Approx(expect).epsilon(1e-15));
  CHECK((*b.sy)[1] == doctest::Approx(expect).epsilon(1e-15));

  Rng rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> x(40), y(20);
  for (auto& v : x) v = u(rng);
  for (auto& v : y) v = u(rng) > 0 ? 1 : -1;
  const auto c = signed_density(FeatureView(x, 2), y, 1.3);
  for (std::size_t i = 0; i < 20; ++i) CHECK(std::abs((*c.sy)[i]) <= c.s[i] + 1e-15);
}

TEST_CASE("density is translation and permutation invariant") {
  const std::vector<double> p{0.1, 0.2, 1.0, -0.3, 0.5, 0.5, -1.0, 0.0};
  std::vector<double> shifted = p;
  for (std::size_t i = 0; i < p.size(); ++i) shifted[i] += (i % 2 ? 10.0 : -3.0);
  const auto a = density(FeatureView(p, 2), 0.7);
  const auto b = density(FeatureView(shifted, 2), 0.7);
  for (int i = 0; i < 4; ++i) CHECK(a.s[i] == doctest::Approx(b.s[i]).epsilon(1e-12));
  // swap samples 0 and 3
  std::vector<double> perm{-1.0, 0.0, 1.0, -0.3, 0.5, 0.5, 0.1, 0.2};
  const auto c = density(FeatureView(perm, 2), 0.7);
  CHECK(c.s[0] == doctest::Approx(a.s[3]).epsilon(1e-14));
  CHECK(c.s[3] == doctest::Approx(a.s[0]).epsilon(1e-14));
}

TEST_CASE("scheme arithmetic") {
  const auto dv = of({4.0});
  CHECK(make_weights(&dv, Scheme::sqrt_density, 0).values[0] == 2.0);
  CHECK(make_weights(&dv, Scheme::density, 0).values[0] == 4.0);
  CHECK(make_weights(&dv, Scheme::square, 0).values[0] == 16.0);
  CHECK(make_weights(&dv, Scheme::inv_sqrt, 0).values[0] == 0.5);
  CHECK(make_weights(&dv, Scheme::inv, 0).values[0] == 0.25);
  CHECK(make_weights(&dv, Scheme::inv_square, 0).values[0] == 0.0625);
  CHECK(make_weights(nullptr, Scheme::none, 0, 3).values == std::vector<double>{1, 1, 1});
  CHECK(uniform_weights(2).values == std::vector<double>{1, 1});
  CHECK_THROWS_AS(make_weights(nullptr, Scheme::inv, 0, 3), Error);
  CHECK_THROWS_AS(make_weights(&dv, Scheme::signed_density, 0), Error);

  auto sdv = of({2.0, 2.0});
  sdv.sy = std::vector<double>{-0.5, 1.5};
  const auto w7 = make_weights(&sdv, Scheme::signed_density, 0);
  CHECK(w7.values == std::vector<double>{kSignedDensityFloor, 1.5});
}

TEST_CASE("monotone schemes follow density order") {
  const auto dv = of({1.0, 2.5, 7.0});
  for (auto s : {Scheme::sqrt_density, Scheme::density, Scheme::square}) {
    const auto w = make_weights(&dv, s, 0).values;
    CHECK(w[0] < w[1]);
    CHECK(w[1] < w[2]);
  }
  for (auto s : {Scheme::inv_sqrt, Scheme::inv, Scheme::inv_square}) {
    const auto w = make_weights(&dv, s, 0).values;
    CHECK(w[0] > w[1]);
    CHECK(w[1] > w[2]);
  }
}

TEST_CASE("random weights") {
  const auto a = make_weights(nullptr, Scheme::random, 42, 1000);
  const auto b = make_weights(nullptr, Scheme::random, 42, 1000);
  const auto c = make_weights(nullptr, Scheme::random, 43, 1000);
  CHECK(a == b);
  CHECK_FALSE(a.values == c.values);
  CHECK(*std::min_element(a.values.begin(), a.values.end()) >= 1.0);
  CHECK(*std::max_element(a.values.begin(), a.values.end()) <= 2.0);
}

TEST_CASE("normalized weights have unit mean") {
  const auto dv = of({1.0, 2.0, 5.0});
  const auto w = normalized(make_weights(&dv, Scheme::density, 0));
  double sum = 0;
  for (double v : w.values) sum += v;
  CHECK(sum / 3 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w.values[2] / w.values[0] == doctest::Approx(5.0));
  CHECK(w.scheme == Scheme::density);
}
