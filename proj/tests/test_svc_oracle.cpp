#include <doctest.h>

#include <cmath>

#include "gwl/oracle/projected_gradient.hpp"
#include "gwl/oracle/selftest.hpp"

using namespace gwl;

TEST_CASE("projection lands on the feasible set") {
  const std::vector<double> y{1, -1, 1, -1, 1};
  const std::vector<double> u{1, 2, 0.5, 1, 3};
  const std::vector<double> z{3.0, -1.0, 0.2, 0.7, -2.0};
  const auto a = oracle::project(z, y, u);
  double bal = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(a[i] >= 0);
    CHECK(a[i] <= u[i]);
    bal += a[i] * y[i];
  }
  CHECK(std::abs(bal) < 1e-12);
  // a feasible point projects onto itself
  const std::vector<double> f{0.5, 0.5, 0.0, 0.0, 0.0};
  const auto same = oracle::project(f, y, u);
  for (std::size_t i = 0; i < 5; ++i) CHECK(same[i] == doctest::Approx(f[i]));
}

TEST_CASE("oracle solves the two point dual") {
  const std::vector<double> pts{0.0, std::sqrt(std::log(2.0))};
  const std::vector<double> y{1, -1}, u{10, 10};
  const auto r = oracle::maximize(oracle::make_problem(pts, 1, y, u, 1.0));
  CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.alpha[0] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("smo matches the projected gradient oracle on weighted instances") {
  Rng rng(101);
  for (int n = 0; n < 60; ++n) {
    const auto inst = oracle::random_instance(rng);
    const auto c = oracle::compare(inst, oracle::oracle_smo_params(n));
    CHECK(c.converged);
    CHECK(c.objective_gap <= 1e-4);
  }
}

TEST_CASE("unit weights reduce to the standard machine") {
  oracle::InstanceRanges r;
  r.unit_weights = true;
  r.min_l = r.max_l = 6;
  Rng rng(202);
  for (int n = 0; n < 20; ++n) {
    const auto inst = oracle::random_instance(rng, r);
    const auto c = oracle::compare(inst, oracle::oracle_smo_params(n));
    CHECK(c.objective_gap <= 1e-4);
    CHECK(c.decision_gap <= 1e-3);
  }
}
