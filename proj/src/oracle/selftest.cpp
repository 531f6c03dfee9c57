#include "gwl/oracle/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "gwl/oracle/projected_gradient.hpp"

namespace gwl::oracle {

Instance random_instance(Rng& rng, const InstanceRanges& ranges) {
  std::uniform_int_distribution<std::size_t> pick_l(ranges.min_l, ranges.max_l);
  std::uniform_int_distribution<std::size_t> pick_d(ranges.min_d, ranges.max_d);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::uniform_real_distribution<double> weight(ranges.min_w, ranges.max_w);
  std::uniform_int_distribution<std::size_t> pick_c(0, ranges.C.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_g(0, ranges.gamma_k.size() - 1);
  std::bernoulli_distribution coin(0.5);

  Instance inst;
  inst.l = pick_l(rng);
  inst.d = pick_d(rng);
  inst.x.resize(inst.l * inst.d);
  for (auto& v : inst.x) v = coord(rng);
  inst.y.resize(inst.l);
  for (auto& v : inst.y) v = coin(rng) ? 1.0 : -1.0;
  // Force both classes.
  inst.y[0] = 1.0;
  inst.y[1] = -1.0;
  inst.w.resize(inst.l);
  for (auto& v : inst.w) v = ranges.unit_weights ? 1.0 : weight(rng);
  inst.C = ranges.C[pick_c(rng)];
  inst.gamma_k = ranges.gamma_k[pick_g(rng)];
  return inst;
}

SvcParams oracle_smo_params(std::uint64_t seed) {
  SvcParams p;
  p.early_stop = true;
  p.kkt_tolerance = 1e-6;
  p.max_iterations = 1'000'000;
  p.seed = seed;
  p.check_invariants = true;
  return p;
}

Comparison compare(const Instance& inst, const SvcParams& base) {
  Dataset ds;
  ds.dim = inst.d;
  for (std::size_t i = 0; i < inst.l; ++i)
    ds.push_back(std::span<const double>(inst.x).subspan(i * inst.d, inst.d), inst.y[i]);
  SampleWeights w;
  w.values = inst.w;
  SvcParams params = base;
  params.C = inst.C;
  params.gamma_k = inst.gamma_k;
  const auto model = train(ds, params, w);

  std::vector<double> upper(inst.l);
  for (std::size_t i = 0; i < inst.l; ++i) upper[i] = inst.C * inst.w[i];
  const auto problem = make_problem(inst.x, inst.d, inst.y, upper, inst.gamma_k);
  const auto ref = maximize(problem);

  Comparison c;
  c.smo_objective = model.meta.objective;
  c.oracle_objective = ref.objective;
  c.objective_gap = std::abs(c.smo_objective - c.oracle_objective);
  c.iterations = model.meta.iterations;
  c.converged = model.meta.converged;

  auto gap_at = [&](std::span<const double> x) {
    const double mine = decision_function(model, x);
    const double theirs =
        decision(inst.x, inst.d, inst.y, ref.alpha, ref.bias, inst.gamma_k, x);
    c.decision_gap = std::max(c.decision_gap, std::abs(mine - theirs));
  };
  for (std::size_t i = 0; i < inst.l; ++i)
    gap_at(std::span<const double>(inst.x).subspan(i * inst.d, inst.d));
  // Probes between consecutive training points.
  std::vector<double> probe(inst.d);
  for (std::size_t i = 0; i + 1 < inst.l; ++i) {
    for (std::size_t k = 0; k < inst.d; ++k)
      probe[k] = 0.5 * (inst.x[i * inst.d + k] + inst.x[(i + 1) * inst.d + k]);
    gap_at(probe);
  }
  return c;
}

SuiteSummary run_suite(std::size_t count, std::uint64_t seed, const InstanceRanges& ranges) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(seed);
  SuiteSummary s;
  for (std::size_t n = 0; n < count; ++n) {
    const auto inst = random_instance(rng, ranges);
    const auto c = compare(inst, oracle_smo_params(derive_seed(seed, n)));
    ++s.instances;
    s.max_objective_gap = std::max(s.max_objective_gap, c.objective_gap);
    s.max_decision_gap = std::max(s.max_decision_gap, c.decision_gap);
    if (!c.converged) ++s.unconverged;
  }
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

}  // namespace gwl::oracle
