#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "gwl/error.hpp"
#include "gwl/experiments.hpp"
#include "gwl/metrics.hpp"
#include "gwl/random.hpp"

using namespace gwl;

namespace {

Dataset tiny() {
  LoadOptions opt;
  return load(GWL_FIXTURE_DIR "/tiny.csv", opt);
}

CvConfig quick() {
  CvConfig c;
  c.folds = 3;
  c.early_stop = true;
  return c;
}

}  // namespace

TEST_CASE("f1 score") {
  const std::vector<int> t{1, -1, 1, 1, -1};
  CHECK(f1(t, t) == 1.0);
  const std::vector<int> p{1, 1, 1, -1, -1}, q{1, -1, 1, 1, -1};
  // TP=2 FP=1 FN=1
  CHECK(f1(p, q) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  const std::vector<int> neg{-1, -1};
  CHECK(f1(neg, neg) == 0.0);
  CHECK_THROWS_AS(f1(neg, t), Error);
}

TEST_CASE("grid expansion") {
  GridSpec g;
  g.C = {1, 10};
  g.gamma_k = {0.1, 1};
  g.gamma_s = {0.1, 1, 10};
  g.schemes = {Scheme::none};
  CHECK(expand(g).size() == 4);
  g.schemes = {Scheme::none, Scheme::inv};
  const auto pts = expand(g);
  CHECK(pts.size() == 16);
  CHECK(pts[0].scheme == Scheme::none);
  CHECK_FALSE(pts[0].gamma_s);
  CHECK(pts[4].scheme == Scheme::inv);
  CHECK(*pts[4].gamma_s == 0.1);
  g.schemes = {Scheme::random};
  CHECK(expand(g).size() == 4);
}

TEST_CASE("leave one out on a separable set") {
  Dataset ds;
  ds.dim = 1;
  for (double v : {-3.0, -2.0, -1.5}) ds.push_back(std::vector<double>{v}, -1);
  for (double v : {1.5, 2.0, 3.0}) ds.push_back(std::vector<double>{v}, 1);
  CvConfig c = quick();
  c.folds = 6;
  c.kkt_tolerance = 1e-8;
  c.check_invariants = true;
  const auto folds = kfold(6, 6, 1);
  const auto r = cross_validate(ds, folds, GridPoint{100, 0.5, Scheme::none, {}}, c);
  CHECK(r.valid);
  CHECK(r.fold_metric.size() == 6);
  // a held-out negative has no positives to find: F1 is 0 by convention, so
  // score by predictions instead
  for (std::size_t k = 0; k < 6; ++k) {
    const auto tr = folds.train_indices(k);
    const auto te = folds.test_indices(k);
    SvcParams p;
    p.C = 100;
    p.gamma_k = 0.5;
    p.early_stop = true;
    const auto m = train(ds.subset(tr), p, uniform_weights(tr.size()));
    CHECK(predict(m, ds.row(te[0])) == int(ds.y[te[0]]));
  }
}

TEST_CASE("cross validation on the tiny fixture") {
  const auto ds = prepare(tiny(), Seeds{});
  const auto cfg = quick();
  const auto folds = kfold(ds.size(), cfg.folds, cfg.seeds.fold);
  const auto r = cross_validate(ds, folds, GridPoint{10, 0.5, Scheme::none, {}}, cfg);
  CHECK(r.valid);
  CHECK(r.fold_metric.size() == 3);
  CHECK(r.mean_metric == 1.0);

  const auto w = cross_validate(ds, folds, GridPoint{10, 0.5, Scheme::inv, 1.0}, cfg, 3);
  CHECK(w.valid);
  double sum = 0;
  for (double v : w.fold_metric) sum += v;
  CHECK(std::abs(w.mean_metric - sum / 3) <= 1e-12);
}

TEST_CASE("a fold without both classes marks the point invalid") {
  Dataset ds;
  ds.dim = 1;
  ds.push_back(std::vector<double>{0.0}, 1);
  ds.push_back(std::vector<double>{1.0}, -1);
  ds.push_back(std::vector<double>{2.0}, 1);
  FoldAssignment f;
  f.k = 2;
  f.assignment = {1, 0, 1};
  const auto r = cross_validate(ds, f, GridPoint{}, quick());
  CHECK_FALSE(r.valid);
  CHECK_FALSE(r.invalid_reason.empty());
}

TEST_CASE("grid search ordering and superset property") {
  const auto ds = prepare(tiny(), Seeds{});
  GridSpec g;
  g.C = {0.1, 10};
  g.gamma_k = {0.01, 1};
  g.gamma_s = {0.1, 1, 10};
  g.schemes = {Scheme::none};
  const auto base = grid_search(ds, g, quick());
  CHECK(base.rows.size() == 4);
  g.schemes = {Scheme::none, Scheme::inv};
  const auto full = grid_search(ds, g, quick(), 2);
  CHECK(full.rows.size() == 16);
  for (std::size_t i = 1; i < full.rows.size(); ++i)
    CHECK(full.rows[i - 1].mean_metric >= full.rows[i].mean_metric);
  CHECK(full.best()->mean_metric >= base.best()->mean_metric);
  CHECK(full.best_for(Scheme::none)->mean_metric == base.best()->mean_metric);
  CHECK(full.best_density()->point.scheme == Scheme::inv);
}

TEST_CASE("reports do not depend on thread count") {
  const auto ds = prepare(tiny(), Seeds{});
  GridSpec g;
  g.C = {1, 10};
  g.gamma_k = {0.1, 1};
  g.gamma_s = {0.1, 10};
  g.schemes = {Scheme::none, Scheme::sqrt_density, Scheme::random};
  const auto a = grid_search(ds, g, quick(), 1);
  const auto b = grid_search(ds, g, quick(), 3);
  CHECK(canonical_report(a) == canonical_report(b));
  CHECK(report_digest(a) == report_digest(b));
  CHECK(canonical_report(a).find("\"seconds\"") == std::string::npos);

  std::ostringstream timed;
  write_report(timed, a, true);
  CHECK(timed.str().find("\"seconds\"") != std::string::npos);
}

TEST_CASE("fold weights see only the training part") {
  const auto ds = prepare(tiny(), Seeds{});
  const auto folds = kfold(ds.size(), 3, 5);
  const auto tr = ds.subset(folds.train_indices(0));
  const auto w = fold_weights(tr, GridPoint{1, 1, Scheme::inv, 1.0}, 0, false);
  CHECK(w.size() == tr.size());
  CHECK(w == compute_weights(tr, Scheme::inv, 1.0, 0));
}

TEST_CASE("mlp experiment report") {
  Dataset ds;
  ds.task = Task::regression;
  ds.dim = 2;
  Rng rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 80; ++i) {
    const double a = u(rng), b = u(rng);
    ds.push_back(std::vector<double>{a, b}, a * a - 0.5 * b + 0.05 * u(rng));
  }
  MlpExperimentConfig cfg;
  cfg.hidden = {8};
  cfg.train.epochs = 20;
  cfg.train.batch_size = 16;
  cfg.gamma_s = {0.1, 1, 10};
  cfg.repeats = 2;
  const auto r = mlp_experiment(ds, cfg);
  REQUIRE(r.rows.size() == 2);
  for (const auto& row : r.rows) {
    REQUIRE(row.weighted_mae.size() == 3);
    const auto it = std::min_element(row.weighted_mae.begin(), row.weighted_mae.end());
    CHECK(row.best_weighted_mae == *it);
    CHECK(row.best_gamma_s == cfg.gamma_s[it - row.weighted_mae.begin()]);
    CHECK(row.train_size + row.test_size == ds.size());
  }

  // near-zero gamma_s gives unit weights after normalization: same run
  cfg.gamma_s = {1e-12};
  cfg.repeats = 1;
  const auto flat = mlp_experiment(ds, cfg);
  CHECK(flat.rows[0].best_weighted_mae ==
        doctest::Approx(flat.rows[0].standard_mae).epsilon(1e-6));
}
