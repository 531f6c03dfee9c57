#include "gwl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "gwl/error.hpp"
#include "gwl/metrics.hpp"
#include "gwl/random.hpp"

namespace gwl {

std::vector<GridPoint> expand(const GridSpec& grid) {
  std::vector<GridPoint> points;
  for (Scheme scheme : grid.schemes) {
    if (uses_density(scheme) && grid.gamma_s.empty())
      throw Error(fmt::format("scheme {} needs at least one gamma_s value", scheme_name(scheme)));
    for (double C : grid.C)
      for (double gk : grid.gamma_k) {
        if (!uses_density(scheme)) {
          points.push_back({C, gk, scheme, std::nullopt});
          continue;
        }
        for (double gs : grid.gamma_s) points.push_back({C, gk, scheme, gs});
      }
  }
  return points;
}

DatasetSummary summarize(const Dataset& ds, std::string name) {
  return {std::move(name),  ds.size(),           ds.dim, ds.removed_duplicates,
          ds.removed_inconsistent, ds.positive_label, ds.negative_label};
}

Dataset prepare(const Dataset& raw, const Seeds& seeds) {
  return shuffle(clean(raw), seeds.shuffle);
}

SampleWeights fold_weights(const Dataset& train, const GridPoint& point, std::uint64_t seed,
                           bool normalize) {
  auto w = compute_weights(train, point.scheme, point.gamma_s, seed);
  return normalize ? normalized(std::move(w)) : w;
}

namespace {

bool has_both_classes(const Dataset& ds) {
  bool pos = false, neg = false;
  for (double v : ds.y) (v > 0 ? pos : neg) = true;
  return pos && neg;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

PointResult cross_validate(const Dataset& ds, const FoldAssignment& folds,
                           const GridPoint& point, const CvConfig& cfg,
                           std::size_t point_index) {
  if (folds.assignment.size() != ds.size())
    throw Error(fmt::format("fold assignment covers {} samples, dataset has {}",
                            folds.assignment.size(), ds.size()));
  const auto t0 = std::chrono::steady_clock::now();
  PointResult r;
  r.index = point_index;
  r.point = point;
  r.solver_seed = derive_seed(cfg.seeds.solver, point_index);
  r.weight_seed = derive_seed(cfg.seeds.weights, point_index);

  for (std::size_t fold = 0; fold < folds.k; ++fold) {
    const auto train_idx = folds.train_indices(fold);
    const auto test_idx = folds.test_indices(fold);
    Dataset train_part = ds.subset(train_idx);
    Dataset test_part = ds.subset(test_idx);
    if (!has_both_classes(train_part)) {
      r.valid = false;
      r.invalid_reason = fmt::format("fold {} training part lacks a class", fold);
      break;
    }
    if (cfg.standardize) {
      const auto st = Standardizer::fit(train_part);
      train_part = st.apply(train_part);
      test_part = st.apply(test_part);
    }
    const auto weight_seed = derive_seed(r.weight_seed, fold);
    const auto weights = fold_weights(train_part, point, weight_seed, cfg.normalize_weights);
    if (cfg.verify_no_leakage) {
      Dataset reference = ds.subset(train_idx);
      if (cfg.standardize) reference = Standardizer::fit(reference).apply(reference);
      const auto expected = fold_weights(reference, point, weight_seed, cfg.normalize_weights);
      if (weights.values.size() != train_idx.size() || !(weights == expected))
        throw std::logic_error(
            fmt::format("fold {}: weights are not a function of the training part alone", fold));
    }

    SvcParams params;
    params.C = point.C;
    params.gamma_k = point.gamma_k;
    params.iter_multiplier = cfg.iter_multiplier;
    params.max_iterations = cfg.max_iterations;
    params.early_stop = cfg.early_stop;
    params.kkt_tolerance = cfg.kkt_tolerance;
    params.selection = cfg.selection;
    params.check_invariants = cfg.check_invariants;
    params.seed = derive_seed(r.solver_seed, fold);
    const auto model = train(train_part, params, weights);

    std::vector<int> predicted(test_part.size()), truth(test_part.size());
    for (std::size_t i = 0; i < test_part.size(); ++i) {
      predicted[i] = predict(model, test_part.row(i));
      truth[i] = test_part.y[i] > 0 ? 1 : -1;
    }
    r.fold_metric.push_back(f1(predicted, truth, cfg.positive));
    r.iterations.push_back(model.meta.iterations);
    r.converged.push_back(model.meta.converged);
  }

  if (r.valid) {
    double sum = 0.0;
    for (double m : r.fold_metric) sum += m;
    r.mean_metric = sum / double(r.fold_metric.size());
  }
  r.seconds = seconds_since(t0);
  return r;
}

ExperimentReport grid_search(const Dataset& ds, const GridSpec& grid, const CvConfig& cfg,
                             std::size_t jobs, std::string dataset_name) {
  const auto points = expand(grid);
  const auto folds = kfold(ds.size(), cfg.folds, cfg.seeds.fold);

  std::vector<PointResult> results(points.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        results[i] = cross_validate(ds, folds, points[i], cfg, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = points.size();
      }
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, points.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::stable_sort(results.begin(), results.end(), [](const PointResult& a, const PointResult& b) {
    if (a.valid != b.valid) return a.valid;
    if (a.mean_metric != b.mean_metric) return a.mean_metric > b.mean_metric;
    return a.index < b.index;
  });
  return {summarize(ds, std::move(dataset_name)), cfg, grid, std::move(results)};
}

const PointResult* ExperimentReport::best() const {
  return !rows.empty() && rows.front().valid ? &rows.front() : nullptr;
}

const PointResult* ExperimentReport::best_for(Scheme scheme) const {
  for (const auto& r : rows)
    if (r.valid && r.point.scheme == scheme) return &r;
  return nullptr;
}

const PointResult* ExperimentReport::best_density() const {
  for (const auto& r : rows)
    if (r.valid && uses_density(r.point.scheme)) return &r;
  return nullptr;
}

MlpReport mlp_experiment(const Dataset& ds, const MlpExperimentConfig& cfg,
                         std::string dataset_name) {
  if (ds.task != Task::regression) throw Error("the MLP experiment needs a regression dataset");
  if (ds.size() < 2) throw Error("the MLP experiment needs at least two samples");
  if (cfg.gamma_s.empty()) throw Error("the MLP experiment needs at least one gamma_s value");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
    throw Error(fmt::format("test fraction must be in (0, 1), got {}", cfg.test_fraction));

  MlpReport report{summarize(ds, std::move(dataset_name)), cfg, {}};
  report.config.train.on_epoch = nullptr;
  for (std::size_t rep = 0; rep < cfg.repeats; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    MlpRow row;
    row.repeat = rep;
    row.split_seed = derive_seed(cfg.seeds.shuffle, rep);
    row.init_seed = derive_seed(cfg.seeds.solver, rep);
    row.batch_seed = derive_seed(cfg.seeds.fold, rep);

    const Dataset mixed = shuffle(ds, row.split_seed);
    const auto l = mixed.size();
    const auto n_test = std::clamp<std::size_t>(
        std::size_t(std::llround(cfg.test_fraction * double(l))), 1, l - 1);
    std::vector<std::size_t> test_idx(n_test), train_idx(l - n_test);
    for (std::size_t i = 0; i < n_test; ++i) test_idx[i] = i;
    for (std::size_t i = n_test; i < l; ++i) train_idx[i - n_test] = i;
    Dataset train_part = mixed.subset(train_idx);
    Dataset test_part = mixed.subset(test_idx);
    if (cfg.standardize) {
      const auto st = Standardizer::fit(train_part);
      train_part = st.apply(train_part);
      test_part = st.apply(test_part);
    }
    row.train_size = train_part.size();
    row.test_size = test_part.size();

    MlpArch arch;
    arch.layer_sizes.push_back(ds.dim);
    arch.layer_sizes.insert(arch.layer_sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    arch.layer_sizes.push_back(1);
    arch.activation = cfg.activation;
    arch.seed = row.init_seed;
    TrainConfig tc = cfg.train;
    tc.seed = row.batch_seed;
    tc.on_epoch = nullptr;

    const auto test_x = test_part.features();
    row.standard_mae = mae(train_mlp(train_part, arch, tc).predict(test_x), test_part.y);
    for (double gs : cfg.gamma_s) {
      const auto dv = density(train_part.features(), gs);
      auto w = make_weights(&dv, Scheme::density, 0);
      if (cfg.normalize_weights) w = normalized(std::move(w));
      const auto model = train_mlp(train_part, arch, tc, w.values);
      row.weighted_mae.push_back(mae(model.predict(test_x), test_part.y));
    }
    const auto best = std::min_element(row.weighted_mae.begin(), row.weighted_mae.end());
    row.best_weighted_mae = *best;
    row.best_gamma_s = cfg.gamma_s[std::size_t(best - row.weighted_mae.begin())];
    row.seconds = seconds_since(t0);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace gwl
