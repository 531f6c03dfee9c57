#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gwl/dataset.hpp"
#include "gwl/kernel.hpp"
#include "gwl/weighting.hpp"

namespace gwl {

enum class PairSelection {
  random,        // seeded uniform distinct pair each iteration
  max_violating, // pair with the largest KKT violation
};

struct SvcParams {
  double C = 1.0;
  double gamma_k = 1.0;
  /// Pair iterations = ceil(iter_multiplier * l^2), counting attempted steps.
  double iter_multiplier = 50.0;
  /// Overrides the multiplier budget when set.
  std::optional<std::uint64_t> max_iterations;
  bool early_stop = false;
  double kkt_tolerance = 1e-3;
  PairSelection selection = PairSelection::random;
  std::uint64_t seed = 0;
  /// Verify box, equality and ascent invariants after every step (slow).
  bool check_invariants = false;
};

/// Denominators below this skip the pair.
inline constexpr double kEtaMin = 1e-12;
/// Steps with |nu| below this are not applied.
inline constexpr double kMinStep = 1e-12;
/// Relative slack defining margin support vectors: tol_i = 1e-8 * C * w_i.
inline constexpr double kMarginRelTol = 1e-8;

struct StepResult {
  bool accepted = false;
  bool skipped = false;  // degenerate pair
  double nu = 0.0;       // clipped step actually applied
};

/// Mutable solver state of the weighted dual
///   max D(a) = sum a_i - 1/2 sum_ij a_i y_i a_j y_j K_ij
///   s.t. 0 <= a_i <= upper_i,  sum a_i y_i = 0.
/// g_i = sum_p a_p y_p K_ip is kept in step with alpha.
class DualState {
public:
  DualState(GramCache gram, std::vector<double> y, std::vector<double> upper);

  std::size_t size() const { return y_.size(); }
  const GramCache& gram() const { return gram_; }
  std::span<const double> y() const { return y_; }
  std::span<const double> alpha() const { return alpha_; }
  std::span<const double> upper() const { return upper_; }
  std::span<const double> g() const { return g_; }
  /// Incrementally maintained dual objective.
  double objective() const { return objective_; }

  /// Replaces alpha (must be feasible) and recomputes g and the objective.
  void set_alpha(std::vector<double> alpha);
  /// Rebuilds g from alpha in O(l^2) and re-derives the objective from it.
  void refresh();

  /// Largest |g_i - recomputed g_i|; used to check incremental drift.
  double gradient_drift() const;

private:
  friend StepResult smo_step(DualState& state, std::size_t i, std::size_t j);

  GramCache gram_;
  std::vector<double> y_;
  std::vector<double> upper_;
  std::vector<double> alpha_;
  std::vector<double> g_;
  double objective_ = 0.0;
};

/// O(l^2) evaluation of the dual objective straight from alpha and K.
double dual_objective(const DualState& state);

/// Unconstrained maximizer of D along (d a_i, d a_j) = (nu y_i, -nu y_j):
///   nu* = [(y_i - y_j) - (g_i - g_j)] / (K_ii - 2 K_ij + K_jj).
/// Returns nullopt when the denominator is below kEtaMin.
std::optional<double> nu_direction(const DualState& state, std::size_t i, std::size_t j);

/// Projects nu onto the interval of steps that keep both multipliers in
/// their boxes. The interval always contains 0.
double clip_nu(const DualState& state, std::size_t i, std::size_t j, double nu);

/// One two-multiplier ascent step on (i, j), i != j.
StepResult smo_step(DualState& state, std::size_t i, std::size_t j);

/// Maximal KKT violation: max over I_up of (y_i - g_i) minus min over I_low,
/// clamped at 0. Zero at an exact optimum.
double max_kkt_violation(const DualState& state);

/// Indices (i in I_up, j in I_low) realizing max_kkt_violation.
std::optional<std::pair<std::size_t, std::size_t>> most_violating_pair(const DualState& state);

/// Bias from margin support vectors, or the midpoint of the KKT-feasible
/// interval when no multiplier is strictly inside its box.
double compute_bias(const DualState& state);

struct TrainingMeta {
  std::string scheme = "none";
  std::optional<double> gamma_s;
  double C = 0.0;
  std::uint64_t solver_seed = 0;
  std::uint64_t weight_seed = 0;
  std::uint64_t iterations = 0;
  std::uint64_t accepted_steps = 0;
  bool converged = false;
  double objective = 0.0;
  double kkt_violation = 0.0;
};

/// Deployable classifier: support vectors with alpha > 0, bias and kernel.
struct SvcModel {
  std::size_t dim = 0;
  double gamma_k = 1.0;
  double b = 0.0;
  std::vector<double> sv_x;  // row-major, dim columns
  std::vector<double> sv_y;
  std::vector<double> sv_alpha;
  TrainingMeta meta;

  std::size_t support_size() const { return sv_y.size(); }
  std::span<const double> support_vector(std::size_t k) const {
    return std::span<const double>(sv_x).subspan(k * dim, dim);
  }
};

/// Trains from a prepared state (alpha may be warm). Exposed for tests that
/// need the final DualState.
struct SolveResult {
  std::uint64_t iterations = 0;
  std::uint64_t accepted = 0;
  bool converged = false;
};
SolveResult solve(DualState& state, const SvcParams& params);

SvcModel train(const Dataset& train, const SvcParams& params, const SampleWeights& weights);

double decision_function(const SvcModel& model, std::span<const double> x);
std::vector<double> decision_values(const SvcModel& model, FeatureView x);

/// Sign of the decision value; 0 maps to +1.
int predict(const SvcModel& model, std::span<const double> x);
inline int sign_label(double decision) { return decision >= 0.0 ? 1 : -1; }

/// Text model format (see svc_io.cpp for the layout).
void save_model(std::ostream& out, const SvcModel& model);
SvcModel load_model(std::istream& in);

}  // namespace gwl
