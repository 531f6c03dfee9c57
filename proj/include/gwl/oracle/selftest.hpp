#pragma once

#include <cstdint>
#include <vector>

#include "gwl/random.hpp"
#include "gwl/svc.hpp"

namespace gwl::oracle {

/// Small random weighted-SVC problem with distinct points and both classes.
struct Instance {
  std::size_t l = 0;
  std::size_t d = 0;
  std::vector<double> x;  // row-major
  std::vector<double> y;
  std::vector<double> w;
  double C = 1.0;
  double gamma_k = 1.0;
};

struct InstanceRanges {
  std::size_t min_l = 3, max_l = 6;
  std::size_t min_d = 1, max_d = 3;
  double min_w = 0.5, max_w = 2.0;
  std::vector<double> C{0.1, 1, 10};
  std::vector<double> gamma_k{0.1, 1};
  bool unit_weights = false;
};

Instance random_instance(Rng& rng, const InstanceRanges& ranges = {});

struct Comparison {
  double smo_objective = 0.0;
  double oracle_objective = 0.0;
  double objective_gap = 0.0;  // |smo - oracle|
  /// Max |f_smo(x) - f_oracle(x)| over the training points and probes.
  double decision_gap = 0.0;
  std::uint64_t iterations = 0;
  bool converged = false;
};

/// Trains gwl::svc on the instance and compares with the reference maximizer.
Comparison compare(const Instance& inst, const SvcParams& params);

/// SMO settings used for oracle comparisons: early stop at 1e-6 within 1e6
/// steps, invariant checks on.
SvcParams oracle_smo_params(std::uint64_t seed);

struct SuiteSummary {
  std::size_t instances = 0;
  double max_objective_gap = 0.0;
  double max_decision_gap = 0.0;
  std::size_t unconverged = 0;
  double seconds = 0.0;
};

SuiteSummary run_suite(std::size_t count, std::uint64_t seed, const InstanceRanges& ranges = {});

}  // namespace gwl::oracle
