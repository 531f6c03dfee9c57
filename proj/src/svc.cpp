#include "gwl/svc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "gwl/error.hpp"
#include "gwl/random.hpp"

namespace gwl {

DualState::DualState(GramCache gram, std::vector<double> y, std::vector<double> upper)
    : gram_(std::move(gram)), y_(std::move(y)), upper_(std::move(upper)) {
  const std::size_t l = y_.size();
  if (gram_.size() != l || upper_.size() != l)
    throw Error(fmt::format("dual state sizes disagree: gram {}, labels {}, bounds {}",
                            gram_.size(), l, upper_.size()));
  for (double v : y_)
    if (v != 1.0 && v != -1.0) throw Error("labels must be -1 or +1");
  for (double u : upper_)
    if (!(u > 0.0) || !std::isfinite(u))
      throw Error(fmt::format("upper bound C*w_i must be positive and finite, got {}", u));
  alpha_.assign(l, 0.0);
  g_.assign(l, 0.0);
}

void DualState::set_alpha(std::vector<double> alpha) {
  if (alpha.size() != size())
    throw Error(fmt::format("alpha has {} entries, expected {}", alpha.size(), size()));
  for (std::size_t i = 0; i < size(); ++i)
    if (alpha[i] < 0.0 || alpha[i] > upper_[i])
      throw Error(fmt::format("alpha[{}] = {} outside [0, {}]", i, alpha[i], upper_[i]));
  alpha_ = std::move(alpha);
  refresh();
}

void DualState::refresh() {
  const std::size_t l = size();
  std::fill(g_.begin(), g_.end(), 0.0);
  for (std::size_t p = 0; p < l; ++p) {
    if (alpha_[p] == 0.0) continue;
    const double coef = alpha_[p] * y_[p];
    const auto row = gram_.row(p);
    for (std::size_t i = 0; i < l; ++i) g_[i] += coef * row[i];
  }
  double linear = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < l; ++i) {
    linear += alpha_[i];
    quad += alpha_[i] * y_[i] * g_[i];
  }
  objective_ = linear - 0.5 * quad;
}

double DualState::gradient_drift() const {
  const std::size_t l = size();
  double worst = 0.0;
  for (std::size_t i = 0; i < l; ++i) {
    double gi = 0.0;
    for (std::size_t p = 0; p < l; ++p) gi += alpha_[p] * y_[p] * gram_(i, p);
    worst = std::max(worst, std::abs(gi - g_[i]));
  }
  return worst;
}

double dual_objective(const DualState& state) {
  const auto alpha = state.alpha();
  const auto y = state.y();
  const auto& K = state.gram();
  const std::size_t l = state.size();
  double linear = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < l; ++i) {
    linear += alpha[i];
    for (std::size_t j = 0; j < l; ++j) quad += alpha[i] * y[i] * alpha[j] * y[j] * K(i, j);
  }
  return linear - 0.5 * quad;
}

namespace {

double pair_eta(const DualState& s, std::size_t i, std::size_t j) {
  const auto& K = s.gram();
  return K(i, i) - 2.0 * K(i, j) + K(j, j);
}

void check_pair(const DualState& s, std::size_t i, std::size_t j) {
  if (i >= s.size() || j >= s.size())
    throw Error(fmt::format("pair ({}, {}) out of range for {} multipliers", i, j, s.size()));
  if (i == j) throw Error("SMO pair must use two distinct multipliers");
}

}  // namespace

std::optional<double> nu_direction(const DualState& state, std::size_t i, std::size_t j) {
  check_pair(state, i, j);
  const double eta = pair_eta(state, i, j);
  if (!(eta >= kEtaMin)) return std::nullopt;
  const auto y = state.y();
  const auto g = state.g();
  return ((y[i] - y[j]) - (g[i] - g[j])) / eta;
}

double clip_nu(const DualState& state, std::size_t i, std::size_t j, double nu) {
  check_pair(state, i, j);
  const auto a = state.alpha();
  const auto u = state.upper();
  const auto y = state.y();
  // a_i + nu*y_i in [0, u_i]
  double lo = y[i] > 0 ? -a[i] : a[i] - u[i];
  double hi = y[i] > 0 ? u[i] - a[i] : a[i];
  // a_j - nu*y_j in [0, u_j]
  lo = std::max(lo, y[j] > 0 ? a[j] - u[j] : -a[j]);
  hi = std::min(hi, y[j] > 0 ? a[j] : u[j] - a[j]);
  lo = std::min(lo, 0.0);
  hi = std::max(hi, 0.0);
  return std::clamp(nu, lo, hi);
}

StepResult smo_step(DualState& state, std::size_t i, std::size_t j) {
  StepResult result;
  const auto nu_star = nu_direction(state, i, j);
  if (!nu_star) {
    result.skipped = true;
    return result;
  }
  const double nu = clip_nu(state, i, j, *nu_star);
  if (std::abs(nu) < kMinStep) return result;

  auto& a = state.alpha_;
  auto& g = state.g_;
  const auto& y = state.y_;
  const auto& u = state.upper_;
  const double eta = pair_eta(state, i, j);
  const double slope = (y[i] - y[j]) - (g[i] - g[j]);
  state.objective_ += nu * slope - 0.5 * nu * nu * eta;

  a[i] = std::clamp(a[i] + nu * y[i], 0.0, u[i]);
  a[j] = std::clamp(a[j] - nu * y[j], 0.0, u[j]);
  if (nu != *nu_star) {
    // A clipped step lands on a box face; remove the rounding residue.
    auto snap = [](double v, double hi) {
      const double eps = 8.0 * std::numeric_limits<double>::epsilon() * hi;
      return v <= eps ? 0.0 : (v >= hi - eps ? hi : v);
    };
    a[i] = snap(a[i], u[i]);
    a[j] = snap(a[j], u[j]);
  }

  // d(a_i y_i) = nu and d(a_j y_j) = -nu, so g moves along K_i - K_j.
  const auto row_i = state.gram_.row(i);
  const auto row_j = state.gram_.row(j);
  for (std::size_t p = 0; p < g.size(); ++p) g[p] += nu * (row_i[p] - row_j[p]);

  result.accepted = true;
  result.nu = nu;
  return result;
}

namespace {

struct Violation {
  double up_max = -std::numeric_limits<double>::infinity();
  double low_min = std::numeric_limits<double>::infinity();
  std::size_t up_arg = 0;
  std::size_t low_arg = 0;
};

Violation scan_violation(const DualState& s) {
  const auto a = s.alpha();
  const auto u = s.upper();
  const auto y = s.y();
  const auto g = s.g();
  Violation v;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double val = y[i] - g[i];
    const bool below = a[i] < u[i];
    const bool above = a[i] > 0.0;
    const bool in_up = y[i] > 0 ? below : above;
    const bool in_low = y[i] > 0 ? above : below;
    if (in_up && val > v.up_max) {
      v.up_max = val;
      v.up_arg = i;
    }
    if (in_low && val < v.low_min) {
      v.low_min = val;
      v.low_arg = i;
    }
  }
  return v;
}

}  // namespace

double max_kkt_violation(const DualState& state) {
  const auto v = scan_violation(state);
  if (!std::isfinite(v.up_max) || !std::isfinite(v.low_min)) return 0.0;
  return std::max(0.0, v.up_max - v.low_min);
}

std::optional<std::pair<std::size_t, std::size_t>> most_violating_pair(const DualState& state) {
  const auto v = scan_violation(state);
  if (!std::isfinite(v.up_max) || !std::isfinite(v.low_min) || v.up_arg == v.low_arg)
    return std::nullopt;
  return std::pair{v.up_arg, v.low_arg};
}

double compute_bias(const DualState& state) {
  const auto a = state.alpha();
  const auto u = state.upper();
  const auto y = state.y();
  const auto g = state.g();

  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double tol = kMarginRelTol * u[i];
    if (a[i] > tol && a[i] < u[i] - tol) {
      sum += y[i] - g[i];
      ++count;
    }
  }
  if (count > 0) return sum / static_cast<double>(count);

  // KKT with f_i = g_i + b:
  //   y_i = +1: a_i = 0 => b >= 1 - g_i ; a_i = u_i => b <= 1 - g_i
  //   y_i = -1: a_i = 0 => b <= -1 - g_i; a_i = u_i => b >= -1 - g_i
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double val = y[i] - g[i];
    const bool at_zero = a[i] <= kMarginRelTol * u[i];
    const bool raises_lower = (y[i] > 0) == at_zero;
    if (raises_lower)
      lower = std::max(lower, val);
    else
      upper = std::min(upper, val);
  }
  const bool has_lower = std::isfinite(lower);
  const bool has_upper = std::isfinite(upper);
  if (has_lower && has_upper) return 0.5 * (lower + upper);
  if (has_lower) return lower;
  if (has_upper) return upper;
  return 0.0;
}

namespace {

void verify_invariants(const DualState& s, double previous_objective, std::uint64_t it) {
  const auto a = s.alpha();
  const auto u = s.upper();
  const auto y = s.y();
  double balance = 0.0, total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(a[i] >= 0.0 && a[i] <= u[i]))
      throw InvariantViolation(fmt::format(
          "iteration {}: alpha[{}] = {} outside [0, {}]", it, i, a[i], u[i]));
    balance += a[i] * y[i];
    total += a[i];
  }
  if (std::abs(balance) > 1e-10 * std::max(1.0, total))
    throw InvariantViolation(
        fmt::format("iteration {}: sum alpha_i y_i = {} (sum alpha {})", it, balance, total));
  const auto g = s.g();
  double linear = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    linear += a[i];
    quad += a[i] * y[i] * g[i];
  }
  const double current = linear - 0.5 * quad;
  if (current < previous_objective - 1e-12 * std::max(1.0, std::abs(previous_objective)))
    throw InvariantViolation(fmt::format(
        "iteration {}: dual objective decreased from {} to {}", it, previous_objective, current));
}

double objective_from_gradient(const DualState& s) {
  const auto a = s.alpha();
  const auto y = s.y();
  const auto g = s.g();
  double linear = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    linear += a[i];
    quad += a[i] * y[i] * g[i];
  }
  return linear - 0.5 * quad;
}

}  // namespace

SolveResult solve(DualState& state, const SvcParams& params) {
  const std::size_t l = state.size();
  if (l < 2) throw Error("SMO needs at least two multipliers");
  const std::uint64_t budget =
      params.max_iterations
          ? *params.max_iterations
          : static_cast<std::uint64_t>(std::ceil(params.iter_multiplier * double(l) * double(l)));
  const std::uint64_t refresh_every = std::uint64_t(l) * l;
  const std::uint64_t check_every = l;

  Rng rng(params.seed);
  std::uniform_int_distribution<std::size_t> first(0, l - 1);
  std::uniform_int_distribution<std::size_t> second(0, l - 2);

  SolveResult result;
  double last_objective = objective_from_gradient(state);
  std::uint64_t it = 0;
  for (; it < budget; ++it) {
    std::size_t i = 0, j = 0;
    if (params.selection == PairSelection::max_violating) {
      if (params.early_stop && max_kkt_violation(state) < params.kkt_tolerance) {
        result.converged = true;
        break;
      }
      const auto pair = most_violating_pair(state);
      if (!pair) {
        result.converged = true;
        break;
      }
      std::tie(i, j) = *pair;
    } else {
      if (params.early_stop && it % check_every == 0 &&
          max_kkt_violation(state) < params.kkt_tolerance) {
        result.converged = true;
        break;
      }
      i = first(rng);
      j = second(rng);
      if (j >= i) ++j;
    }

    const auto step = smo_step(state, i, j);
    if (step.accepted) {
      ++result.accepted;
      if (params.check_invariants) {
        verify_invariants(state, last_objective, it);
        last_objective = objective_from_gradient(state);
      }
    }
    if ((it + 1) % refresh_every == 0) {
      if (params.check_invariants && state.gradient_drift() > 1e-8)
        throw InvariantViolation(fmt::format("iteration {}: gradient drift {}", it,
                                             state.gradient_drift()));
      state.refresh();
    }
  }
  result.iterations = it;
  state.refresh();
  if (!result.converged) result.converged = max_kkt_violation(state) < params.kkt_tolerance;
  return result;
}

SvcModel train(const Dataset& train, const SvcParams& params, const SampleWeights& weights) {
  const std::size_t l = train.size();
  if (train.task != Task::classification) throw Error("SVC training needs a classification dataset");
  if (l < 2) throw Error(fmt::format("SVC training needs at least 2 samples, got {}", l));
  if (weights.size() != l)
    throw Error(fmt::format("{} weights for {} samples", weights.size(), l));
  if (!(params.C > 0.0)) throw Error(fmt::format("C must be positive, got {}", params.C));
  if (!(params.gamma_k > 0.0))
    throw Error(fmt::format("gamma_k must be positive, got {}", params.gamma_k));
  const bool has_pos = std::find(train.y.begin(), train.y.end(), 1.0) != train.y.end();
  const bool has_neg = std::find(train.y.begin(), train.y.end(), -1.0) != train.y.end();
  if (!has_pos || !has_neg) throw Error("SVC training needs samples of both classes");

  std::vector<double> upper(l);
  for (std::size_t i = 0; i < l; ++i) upper[i] = params.C * weights.values[i];

  DualState state(GramCache(train.features(), params.gamma_k), train.y, std::move(upper));
  const auto solved = solve(state, params);

  SvcModel model;
  model.dim = train.dim;
  model.gamma_k = params.gamma_k;
  model.b = compute_bias(state);
  const auto a = state.alpha();
  for (std::size_t i = 0; i < l; ++i) {
    if (a[i] <= 0.0) continue;
    const auto row = train.row(i);
    model.sv_x.insert(model.sv_x.end(), row.begin(), row.end());
    model.sv_y.push_back(train.y[i]);
    model.sv_alpha.push_back(a[i]);
  }
  auto& meta = model.meta;
  meta.scheme = scheme_name(weights.scheme);
  meta.gamma_s = weights.gamma_s;
  meta.C = params.C;
  meta.solver_seed = params.seed;
  meta.weight_seed = weights.seed;
  meta.iterations = solved.iterations;
  meta.accepted_steps = solved.accepted;
  meta.converged = solved.converged;
  meta.objective = state.objective();
  meta.kkt_violation = max_kkt_violation(state);
  return model;
}

double decision_function(const SvcModel& model, std::span<const double> x) {
  if (x.size() != model.dim)
    throw Error(fmt::format("model expects {} features, got {}", model.dim, x.size()));
  double f = model.b;
  for (std::size_t k = 0; k < model.support_size(); ++k)
    f += model.sv_alpha[k] * model.sv_y[k] *
         std::exp(-model.gamma_k * squared_distance(model.support_vector(k), x));
  return f;
}

std::vector<double> decision_values(const SvcModel& model, FeatureView x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = decision_function(model, x[i]);
  return out;
}

int predict(const SvcModel& model, std::span<const double> x) {
  return sign_label(decision_function(model, x));
}

}  // namespace gwl
