// gwl: command-line front end for weighted-loss SVC and MLP experiments.
//
//   gwl prep     --data FILE                 clean + shuffle, print removal counts
//   gwl train    --data FILE --model OUT     one SVC fit
//   gwl cv       --data FILE                 one grid point, k folds
//   gwl grid     --data FILE --report OUT    full grid search
//   gwl mlp      --data FILE --report OUT    standard vs. density-weighted MLP
//   gwl selftest                             SMO vs. projected-gradient oracle

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include "gwl/dataset.hpp"
#include "gwl/error.hpp"
#include "gwl/experiments.hpp"
#include "gwl/metrics.hpp"
#include "gwl/mlp.hpp"
#include "gwl/oracle/selftest.hpp"
#include "gwl/svc.hpp"
#include "gwl/weighting.hpp"

namespace {

using namespace gwl;

struct DataOptions {
  std::string path;
  std::string format = "csv";
  bool header = false;
  int label_column = -1;
  std::string labels;

  void add(CLI::App& cmd) {
    cmd.add_option("--data", path, "Input data file")->required()->check(CLI::ExistingFile);
    cmd.add_option("--format", format, "csv or libsvm")
        ->check(CLI::IsMember({"csv", "libsvm"}))
        ->capture_default_str();
    cmd.add_flag("--header", header, "CSV has a header row");
    cmd.add_option("--label-column", label_column, "Label column, negative counts from the end")
        ->capture_default_str();
    cmd.add_option("--labels", labels, "Label mapping, e.g. g:+1,b:-1");
  }

  Dataset load(Task task) const {
    LoadOptions o;
    o.format = format == "csv" ? FileFormat::csv : FileFormat::libsvm;
    o.task = task;
    o.header = header;
    o.label_column = label_column;
    if (!labels.empty()) o.label_map = parse_label_map(labels);
    return gwl::load(path, o);
  }

  std::string describe() const {
    return fmt::format("data={} format={} header={} label_column={} labels={}", path, format,
                       header, label_column, labels.empty() ? "default" : labels);
  }
};

void add_seed_options(CLI::App& cmd, Seeds& seeds) {
  cmd.add_option("--seed-shuffle", seeds.shuffle, "Shuffle seed")->capture_default_str();
  cmd.add_option("--seed-fold", seeds.fold, "Fold assignment seed")->capture_default_str();
  cmd.add_option("--seed-solver", seeds.solver, "Pair selection seed")->capture_default_str();
  cmd.add_option("--seed-weights", seeds.weights, "Random weight (scheme 8) seed")
      ->capture_default_str();
}

std::string describe(const Seeds& s) {
  return fmt::format("seed_shuffle={} seed_fold={} seed_solver={} seed_weights={}", s.shuffle,
                     s.fold, s.solver, s.weights);
}

struct SolverOptions {
  double iter_multiplier = 50.0;
  std::uint64_t max_iterations = 0;
  bool early_stop = false;
  double tolerance = 1e-3;
  std::string selection = "random";
  bool check_invariants = false;

  void add(CLI::App& cmd) {
    cmd.add_option("--iter-mult", iter_multiplier, "Pair iterations = ceil(mult * l^2)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--max-iter", max_iterations, "Fixed pair-iteration budget (overrides --iter-mult)");
    cmd.add_flag("--early-stop", early_stop, "Stop when the max KKT violation drops below --tol");
    cmd.add_option("--tol", tolerance, "KKT tolerance for early stopping")->capture_default_str();
    cmd.add_option("--selection", selection, "Pair selection: random or max-violating")
        ->check(CLI::IsMember({"random", "max-violating"}))
        ->capture_default_str();
    cmd.add_flag("--check-invariants", check_invariants, "Verify solver invariants every step");
  }

  void apply(CvConfig& c) const {
    c.iter_multiplier = iter_multiplier;
    if (max_iterations > 0) c.max_iterations = max_iterations;
    c.early_stop = early_stop;
    c.kkt_tolerance = tolerance;
    c.selection = selection == "random" ? PairSelection::random : PairSelection::max_violating;
    c.check_invariants = check_invariants;
  }

  std::string describe() const {
    return fmt::format("iter_mult={} max_iter={} early_stop={} tol={} selection={}",
                       iter_multiplier, max_iterations, early_stop, tolerance, selection);
  }
};

void print_config(const std::string& command, const std::vector<std::string>& parts) {
  fmt::print("config: command={}", command);
  for (const auto& p : parts) fmt::print(" {}", p);
  fmt::print("\n");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path));
  return out;
}

void require_gamma_s(Scheme scheme, const std::optional<double>& gamma_s) {
  if (uses_density(scheme) && !gamma_s)
    throw Error(fmt::format("scheme {} needs --gamma-s", scheme_name(scheme)));
  if (!uses_density(scheme) && gamma_s)
    throw Error(fmt::format("--gamma-s given but scheme {} does not use a density",
                            scheme_name(scheme)));
}

int run_prep(const DataOptions& data, const Seeds& seeds, const std::string& out_path,
             bool regression) {
  print_config("prep", {data.describe(), describe(seeds),
                        fmt::format("task={}", regression ? "regression" : "classification")});
  const auto raw = data.load(regression ? Task::regression : Task::classification);
  const auto ds = prepare(raw, seeds);
  fmt::print("samples_in={}\nremoved_duplicates={}\nremoved_inconsistent={}\nsamples_out={}\n",
             raw.size(), ds.removed_duplicates, ds.removed_inconsistent, ds.size());
  if (!regression)
    fmt::print("label_map={}:-1,{}:+1\n", ds.negative_label, ds.positive_label);
  if (ds.empty()) fmt::print("warning: no samples left after cleaning\n");
  if (!out_path.empty()) {
    auto out = open_output(out_path);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      for (double v : ds.row(i)) fmt::print(out, "{},", v);
      fmt::print(out, "{}\n", ds.y[i]);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized weighted loss SVC / MLP experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gwl 1.0");

  // prep
  DataOptions prep_data;
  Seeds prep_seeds;
  std::string prep_out;
  bool prep_regression = false;
  auto* prep = app.add_subcommand("prep", "Clean and shuffle a dataset, print removal counts");
  prep_data.add(*prep);
  add_seed_options(*prep, prep_seeds);
  prep->add_option("--out", prep_out, "Write the cleaned, shuffled samples as CSV (label last, -1/+1)");
  prep->add_flag("--regression", prep_regression, "Treat the label column as a real target");

  // train
  DataOptions train_data;
  Seeds train_seeds;
  SolverOptions train_solver;
  double train_c = 1.0, train_gk = 1.0;
  std::string train_scheme = "none";
  std::optional<double> train_gs;
  bool train_normalize = false;
  std::string model_out, weights_out;
  auto* train_cmd = app.add_subcommand("train", "Fit one SVC and write the model");
  train_data.add(*train_cmd);
  add_seed_options(*train_cmd, train_seeds);
  train_solver.add(*train_cmd);
  train_cmd->add_option("--C", train_c, "Trade-off C")->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--gamma-k", train_gk, "RBF kernel gamma")->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--scheme", train_scheme, "Weighting scheme: none or 1-8")->capture_default_str();
  train_cmd->add_option("--gamma-s", train_gs, "Density gamma for schemes 1-7")->check(CLI::PositiveNumber);
  train_cmd->add_flag("--normalize-weights", train_normalize, "Rescale weights to unit mean");
  train_cmd->add_option("--model", model_out, "Model output path");
  train_cmd->add_option("--weights-out", weights_out, "Write the sample weights, one per line");

  // cv
  DataOptions cv_data;
  Seeds cv_seeds;
  SolverOptions cv_solver;
  double cv_c = 1.0, cv_gk = 1.0;
  std::string cv_scheme = "none";
  std::optional<double> cv_gs;
  std::size_t cv_folds = 5;
  bool cv_standardize = false, cv_normalize = false;
  int cv_positive = 1;
  auto* cv = app.add_subcommand("cv", "k-fold cross-validation of one grid point");
  cv_data.add(*cv);
  add_seed_options(*cv, cv_seeds);
  cv_solver.add(*cv);
  cv->add_option("--C", cv_c, "Trade-off C")->check(CLI::PositiveNumber)->capture_default_str();
  cv->add_option("--gamma-k", cv_gk, "RBF kernel gamma")->check(CLI::PositiveNumber)->capture_default_str();
  cv->add_option("--scheme", cv_scheme, "Weighting scheme: none or 1-8")->capture_default_str();
  cv->add_option("--gamma-s", cv_gs, "Density gamma for schemes 1-7")->check(CLI::PositiveNumber);
  cv->add_option("--folds", cv_folds, "Number of folds")->capture_default_str();
  cv->add_flag("--standardize", cv_standardize, "z-score features using training-fold statistics");
  cv->add_flag("--normalize-weights", cv_normalize, "Rescale weights to unit mean");
  cv->add_option("--positive", cv_positive, "Class scored by F1 (+1 or -1)")
      ->check(CLI::IsMember({-1, 1}))
      ->capture_default_str();

  // grid
  DataOptions grid_data;
  Seeds grid_seeds;
  SolverOptions grid_solver;
  GridSpec grid_spec;
  std::string grid_schemes = "none";
  std::vector<double> grid_gs;
  std::size_t grid_folds = 5, grid_jobs = 1, grid_rows = 20;
  bool grid_standardize = false, grid_normalize = false;
  int grid_positive = 1;
  std::string report_out;
  auto* grid = app.add_subcommand("grid", "Grid search with k-fold cross-validation");
  grid_data.add(*grid);
  add_seed_options(*grid, grid_seeds);
  grid_solver.add(*grid);
  grid->add_option("--C", grid_spec.C, "C values")->delimiter(',')->capture_default_str();
  grid->add_option("--gamma-k", grid_spec.gamma_k, "Kernel gamma values")->delimiter(',')->capture_default_str();
  grid->add_option("--gamma-s", grid_gs, "Density gamma values (default 0.01,0.1,1,10,100)")->delimiter(',');
  grid->add_option("--schemes", grid_schemes, "Schemes, e.g. none,1,5,8")->capture_default_str();
  grid->add_option("--folds", grid_folds, "Number of folds")->capture_default_str();
  grid->add_option("--jobs", grid_jobs, "Grid points evaluated concurrently")->capture_default_str();
  grid->add_flag("--standardize", grid_standardize, "z-score features using training-fold statistics");
  grid->add_flag("--normalize-weights", grid_normalize, "Rescale weights to unit mean");
  grid->add_option("--positive", grid_positive, "Class scored by F1 (+1 or -1)")
      ->check(CLI::IsMember({-1, 1}))
      ->capture_default_str();
  grid->add_option("--report", report_out, "JSON Lines report path");
  grid->add_option("--show", grid_rows, "Rows printed to stdout")->capture_default_str();

  // mlp
  DataOptions mlp_data;
  MlpExperimentConfig mlp_cfg;
  std::string mlp_hidden = "100,50,20", mlp_activation = "relu", mlp_loss = "mse";
  bool mlp_no_standardize = false, mlp_no_normalize = false;
  std::string mlp_report_out;
  auto* mlp = app.add_subcommand("mlp", "Standard vs. density-weighted MLP regression");
  mlp_data.add(*mlp);
  add_seed_options(*mlp, mlp_cfg.seeds);
  mlp->add_option("--hidden", mlp_hidden, "Hidden layer sizes")->capture_default_str();
  mlp->add_option("--activation", mlp_activation, "relu or tanh")->capture_default_str();
  mlp->add_option("--loss", mlp_loss, "Training loss base: mse or mae")->capture_default_str();
  mlp->add_option("--epochs", mlp_cfg.train.epochs, "Training epochs")->capture_default_str();
  mlp->add_option("--batch", mlp_cfg.train.batch_size, "Mini-batch size")->capture_default_str();
  mlp->add_option("--lr", mlp_cfg.train.learning_rate, "SGD learning rate")->capture_default_str();
  mlp->add_option("--gamma-s", mlp_cfg.gamma_s, "Density gamma values")->delimiter(',')->capture_default_str();
  mlp->add_option("--repeats", mlp_cfg.repeats, "Independent seeds / report rows")->capture_default_str();
  mlp->add_option("--test-fraction", mlp_cfg.test_fraction, "Held-out fraction")->capture_default_str();
  mlp->add_flag("--no-standardize", mlp_no_standardize, "Keep raw feature scales");
  mlp->add_flag("--no-normalize-weights", mlp_no_normalize, "Use raw w = s instead of unit-mean w");
  mlp->add_option("--report", mlp_report_out, "JSON Lines report path");

  // selftest
  std::size_t st_instances = 200;
  std::uint64_t st_seed = 7;
  double st_tolerance = 1e-4;
  auto* selftest = app.add_subcommand("selftest", "Compare the SMO solver against the projected-gradient oracle");
  selftest->add_option("--instances", st_instances, "Random instances")->capture_default_str();
  selftest->add_option("--seed", st_seed, "Instance generator seed")->capture_default_str();
  selftest->add_option("--tolerance", st_tolerance, "Allowed dual objective gap")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*prep) return run_prep(prep_data, prep_seeds, prep_out, prep_regression);

    if (*train_cmd) {
      const auto scheme = parse_scheme(train_scheme);
      require_gamma_s(scheme, train_gs);
      print_config("train", {train_data.describe(), describe(train_seeds), train_solver.describe(),
                             fmt::format("C={} gamma_k={} scheme={} gamma_s={} normalize_weights={}",
                                         train_c, train_gk, train_scheme,
                                         train_gs ? fmt::format("{}", *train_gs) : "none",
                                         train_normalize)});
      const auto ds = prepare(train_data.load(Task::classification), train_seeds);
      const GridPoint point{train_c, train_gk, scheme, train_gs};
      const auto weights = fold_weights(ds, point, train_seeds.weights, train_normalize);
      CvConfig c;
      train_solver.apply(c);
      SvcParams params;
      params.C = train_c;
      params.gamma_k = train_gk;
      params.iter_multiplier = c.iter_multiplier;
      params.max_iterations = c.max_iterations;
      params.early_stop = c.early_stop;
      params.kkt_tolerance = c.kkt_tolerance;
      params.selection = c.selection;
      params.check_invariants = c.check_invariants;
      params.seed = train_seeds.solver;
      const auto model = train(ds, params, weights);
      std::vector<int> predicted(ds.size()), truth(ds.size());
      for (std::size_t i = 0; i < ds.size(); ++i) {
        predicted[i] = predict(model, ds.row(i));
        truth[i] = ds.y[i] > 0 ? 1 : -1;
      }
      fmt::print("samples={} support_vectors={} b={} iterations={} accepted={} converged={} "
                 "objective={} kkt_violation={} train_f1={:.6f}\n",
                 ds.size(), model.support_size(), model.b, model.meta.iterations,
                 model.meta.accepted_steps, model.meta.converged, model.meta.objective,
                 model.meta.kkt_violation, f1(predicted, truth, 1));
      if (!model_out.empty()) {
        auto out = open_output(model_out);
        save_model(out, model);
      }
      if (!weights_out.empty()) {
        auto out = open_output(weights_out);
        write_weights(out, weights);
      }
      return 0;
    }

    if (*cv) {
      const auto scheme = parse_scheme(cv_scheme);
      require_gamma_s(scheme, cv_gs);
      CvConfig c;
      cv_solver.apply(c);
      c.folds = cv_folds;
      c.standardize = cv_standardize;
      c.normalize_weights = cv_normalize;
      c.positive = cv_positive;
      c.seeds = cv_seeds;
      print_config("cv", {cv_data.describe(), describe(cv_seeds), cv_solver.describe(),
                          fmt::format("C={} gamma_k={} scheme={} gamma_s={} folds={} "
                                      "standardize={} normalize_weights={} positive={}",
                                      cv_c, cv_gk, cv_scheme,
                                      cv_gs ? fmt::format("{}", *cv_gs) : "none", cv_folds,
                                      cv_standardize, cv_normalize, cv_positive)});
      const auto ds = prepare(cv_data.load(Task::classification), cv_seeds);
      const auto folds = kfold(ds.size(), c.folds, c.seeds.fold);
      const auto r = cross_validate(ds, folds, {cv_c, cv_gk, scheme, cv_gs}, c, 0);
      if (!r.valid) throw Error(fmt::format("grid point invalid: {}", r.invalid_reason));
      for (std::size_t f = 0; f < r.fold_metric.size(); ++f)
        fmt::print("fold {} f1={:.6f} iterations={} converged={}\n", f, r.fold_metric[f],
                   r.iterations[f], bool(r.converged[f]));
      fmt::print("mean_f1={:.6f} seconds={:.2f}\n", r.mean_metric, r.seconds);
      return 0;
    }

    if (*grid) {
      grid_spec.schemes = parse_scheme_list(grid_schemes);
      const bool any_density =
          std::any_of(grid_spec.schemes.begin(), grid_spec.schemes.end(), uses_density);
      if (!grid_gs.empty() && !any_density)
        throw Error("--gamma-s given but no listed scheme uses a density");
      if (!grid_gs.empty()) grid_spec.gamma_s = grid_gs;
      if (!any_density) grid_spec.gamma_s.clear();
      for (double v : grid_spec.C)
        if (!(v > 0)) throw Error("C values must be positive");
      for (double v : grid_spec.gamma_k)
        if (!(v > 0)) throw Error("gamma_k values must be positive");
      for (double v : grid_spec.gamma_s)
        if (!(v > 0)) throw Error("gamma_s values must be positive");
      CvConfig c;
      grid_solver.apply(c);
      c.folds = grid_folds;
      c.standardize = grid_standardize;
      c.normalize_weights = grid_normalize;
      c.positive = grid_positive;
      c.seeds = grid_seeds;
      print_config("grid", {grid_data.describe(), describe(grid_seeds), grid_solver.describe(),
                            fmt::format("C={} gamma_k={} gamma_s={} schemes={} folds={} jobs={} "
                                        "standardize={} normalize_weights={} positive={}",
                                        fmt::join(grid_spec.C, ","), fmt::join(grid_spec.gamma_k, ","),
                                        fmt::join(grid_spec.gamma_s, ","), grid_schemes, grid_folds,
                                        grid_jobs, grid_standardize, grid_normalize, grid_positive)});
      const auto ds = prepare(grid_data.load(Task::classification), grid_seeds);
      fmt::print("samples={} removed_duplicates={} removed_inconsistent={} points={}\n", ds.size(),
                 ds.removed_duplicates, ds.removed_inconsistent, expand(grid_spec).size());
      const auto report = grid_search(ds, grid_spec, c, grid_jobs, grid_data.path);
      print_table(std::cout, report, grid_rows);
      fmt::print("report_digest={:016x}\n", report_digest(report));
      if (!report_out.empty()) {
        auto out = open_output(report_out);
        write_report(out, report);
      }
      return 0;
    }

    if (*mlp) {
      mlp_cfg.hidden = parse_layer_sizes(mlp_hidden);
      mlp_cfg.activation = parse_activation(mlp_activation);
      mlp_cfg.train.base = parse_loss(mlp_loss);
      mlp_cfg.standardize = !mlp_no_standardize;
      mlp_cfg.normalize_weights = !mlp_no_normalize;
      print_config("mlp", {mlp_data.describe(), describe(mlp_cfg.seeds),
                           fmt::format("hidden={} activation={} loss={} epochs={} batch={} lr={} "
                                       "gamma_s={} repeats={} test_fraction={} standardize={} "
                                       "normalize_weights={}",
                                       mlp_hidden, mlp_activation, mlp_loss, mlp_cfg.train.epochs,
                                       mlp_cfg.train.batch_size, mlp_cfg.train.learning_rate,
                                       fmt::join(mlp_cfg.gamma_s, ","), mlp_cfg.repeats,
                                       mlp_cfg.test_fraction, mlp_cfg.standardize,
                                       mlp_cfg.normalize_weights)});
      const auto ds = clean(mlp_data.load(Task::regression));
      fmt::print("samples={} removed_duplicates={} dim={}\n", ds.size(), ds.removed_duplicates,
                 ds.dim);
      const auto report = mlp_experiment(ds, mlp_cfg, mlp_data.path);
      print_mlp_table(std::cout, report);
      if (!mlp_report_out.empty()) {
        auto out = open_output(mlp_report_out);
        write_mlp_report(out, report);
      }
      return 0;
    }

    if (*selftest) {
      print_config("selftest", {fmt::format("instances={} seed={} tolerance={}", st_instances,
                                            st_seed, st_tolerance)});
      const auto weighted = oracle::run_suite(st_instances, st_seed);
      oracle::InstanceRanges unit;
      unit.unit_weights = true;
      const auto baseline = oracle::run_suite(std::max<std::size_t>(1, st_instances / 10),
                                              st_seed + 1, unit);
      fmt::print("weighted: instances={} max_objective_gap={:.3e} max_decision_gap={:.3e} "
                 "unconverged={} seconds={:.2f}\n",
                 weighted.instances, weighted.max_objective_gap, weighted.max_decision_gap,
                 weighted.unconverged, weighted.seconds);
      fmt::print("w=1:      instances={} max_objective_gap={:.3e} max_decision_gap={:.3e} "
                 "unconverged={} seconds={:.2f}\n",
                 baseline.instances, baseline.max_objective_gap, baseline.max_decision_gap,
                 baseline.unconverged, baseline.seconds);
      const double worst = std::max(weighted.max_objective_gap, baseline.max_objective_gap);
      fmt::print("max_oracle_deviation={:.3e}\n", worst);
      if (worst > st_tolerance) {
        fmt::print(std::cerr, "error: oracle deviation {:.3e} exceeds {:.1e}\n", worst, st_tolerance);
        return 1;
      }
      return 0;
    }
  } catch (const Error& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "internal error: {}\n", e.what());
    return 2;
  }
  return 0;
}
