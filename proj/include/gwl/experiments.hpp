#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gwl/dataset.hpp"
#include "gwl/mlp.hpp"
#include "gwl/svc.hpp"
#include "gwl/weighting.hpp"

namespace gwl {

/// Master seeds. Every grid point and fold derives its own streams from
/// these, so results do not depend on scheduling.
struct Seeds {
  std::uint64_t shuffle = 20240101;
  std::uint64_t fold = 20240202;
  std::uint64_t solver = 20240303;
  std::uint64_t weights = 20240404;
};

struct GridPoint {
  double C = 1.0;
  double gamma_k = 1.0;
  Scheme scheme = Scheme::none;
  std::optional<double> gamma_s;
};

/// Settings shared by every grid point of a run.
struct CvConfig {
  std::size_t folds = 5;
  double iter_multiplier = 50.0;
  std::optional<std::uint64_t> max_iterations;
  bool early_stop = false;
  double kkt_tolerance = 1e-3;
  PairSelection selection = PairSelection::random;
  bool standardize = false;
  bool normalize_weights = false;
  /// Recompute fold weights from the training portion and compare.
  bool verify_no_leakage = true;
  bool check_invariants = false;
  int positive = 1;
  Seeds seeds;
};

struct GridSpec {
  std::vector<double> C{0.1, 1, 10, 100};
  std::vector<double> gamma_k{0.01, 0.1, 1, 10};
  std::vector<double> gamma_s{0.01, 0.1, 1, 10, 100};
  std::vector<Scheme> schemes{Scheme::none};
};

/// Cartesian product in report order: schemes, then C, gamma_k, gamma_s.
/// gamma_s only multiplies the density schemes 1-7.
std::vector<GridPoint> expand(const GridSpec& grid);

struct PointResult {
  std::size_t index = 0;
  GridPoint point;
  bool valid = true;
  std::string invalid_reason;
  std::vector<double> fold_metric;
  double mean_metric = 0.0;
  std::vector<std::uint64_t> iterations;
  std::vector<bool> converged;
  std::uint64_t solver_seed = 0;
  std::uint64_t weight_seed = 0;
  double seconds = 0.0;
};

struct DatasetSummary {
  std::string name;
  std::size_t samples = 0;
  std::size_t dim = 0;
  std::size_t removed_duplicates = 0;
  std::size_t removed_inconsistent = 0;
  std::string positive_label;
  std::string negative_label;
};

DatasetSummary summarize(const Dataset& ds, std::string name);

struct ExperimentReport {
  DatasetSummary dataset;
  CvConfig config;
  GridSpec grid;
  /// Sorted by mean metric descending; invalid points last; ties by index.
  std::vector<PointResult> rows;

  const PointResult* best() const;
  const PointResult* best_for(Scheme scheme) const;
  /// Best row among schemes 1-7.
  const PointResult* best_density() const;
};

/// Clean then shuffle with seeds.shuffle.
Dataset prepare(const Dataset& raw, const Seeds& seeds);

/// Weights for one training fold; density schemes look only at `train`.
SampleWeights fold_weights(const Dataset& train, const GridPoint& point, std::uint64_t seed,
                           bool normalize);

/// k-fold evaluation of one grid point on a prepared dataset. Per fold:
/// fit optional standardization and the sample weights on the training part,
/// train, then score F1 on the held-out part.
PointResult cross_validate(const Dataset& ds, const FoldAssignment& folds,
                           const GridPoint& point, const CvConfig& cfg,
                           std::size_t point_index = 0);

/// Evaluates every point of the grid, up to `jobs` at a time.
ExperimentReport grid_search(const Dataset& ds, const GridSpec& grid, const CvConfig& cfg,
                             std::size_t jobs = 1, std::string dataset_name = "data");

/// JSON Lines: a "meta" record, one "point" record per grid point in report
/// order, then a "best" record. Timing fields are omitted when
/// include_timing is false, which makes the output a function of the inputs
/// and seeds only.
void write_report(std::ostream& out, const ExperimentReport& report, bool include_timing = true);
std::string canonical_report(const ExperimentReport& report);
/// FNV-1a of the canonical report.
std::uint64_t report_digest(const ExperimentReport& report);

void print_table(std::ostream& out, const ExperimentReport& report, std::size_t max_rows = 20);

// ---------------------------------------------------------------------------
// MLP regression experiment: standard loss vs. w = s loss over a gamma_s grid.

struct MlpExperimentConfig {
  std::vector<std::size_t> hidden{100, 50, 20};
  Activation activation = Activation::relu;
  TrainConfig train;
  std::vector<double> gamma_s{0.01, 0.1, 1, 10, 100};
  std::size_t repeats = 3;
  double test_fraction = 0.2;
  bool standardize = true;
  bool normalize_weights = true;
  Seeds seeds;
};

struct MlpRow {
  std::size_t repeat = 0;
  std::uint64_t split_seed = 0;
  std::uint64_t init_seed = 0;
  std::uint64_t batch_seed = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double standard_mae = 0.0;
  std::vector<double> weighted_mae;  // one per gamma_s, unweighted test MAE
  double best_gamma_s = 0.0;
  double best_weighted_mae = 0.0;
  double seconds = 0.0;
};

struct MlpReport {
  DatasetSummary dataset;
  MlpExperimentConfig config;
  std::vector<MlpRow> rows;
};

MlpReport mlp_experiment(const Dataset& ds, const MlpExperimentConfig& cfg,
                         std::string dataset_name = "data");

void write_mlp_report(std::ostream& out, const MlpReport& report, bool include_timing = true);
void print_mlp_table(std::ostream& out, const MlpReport& report);

}  // namespace gwl
