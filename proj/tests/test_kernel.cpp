#include <doctest.h>

#include <cmath>

#include "gwl/error.hpp"
#include "gwl/kernel.hpp"

using namespace gwl;

TEST_CASE("rbf values") {
  const std::vector<double> x{0.3, -1.2}, o{0.0}, one{1.0};
  CHECK(rbf(x, x, 5.0) == 1.0);
  CHECK(std::abs(rbf(o, one, 1.0) - 0.36787944117144233) < 1e-15);
  double prev = 1.0;
  for (double g : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
    const double v = rbf(o, one, g);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-300);
  CHECK_THROWS_AS(rbf(x, o, 1.0), Error);
  CHECK_THROWS_AS(rbf(o, one, 0.0), Error);
}

TEST_CASE("gram matrix") {
  const std::vector<double> pts{0.0, 1.0, 2.0};
  const GramCache k(FeatureView(pts, 1), 1.0);
  CHECK(k.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(k(i, i) == 1.0);
    for (std::size_t j = 0; j < 3; ++j) CHECK(k(i, j) == k(j, i));
  }
  CHECK(std::abs(k(0, 1) - 0.36787944117144233) < 1e-15);
  CHECK(std::abs(k(1, 2) - 0.36787944117144233) < 1e-15);
  CHECK(std::abs(k(0, 2) - 0.01831563888873418) < 1e-15);

  const std::vector<double> single{4.0, 2.0};
  const GramCache s(FeatureView(single, 2), 0.7);
  CHECK(s.size() == 1);
  CHECK(s(0, 0) == 1.0);
}
