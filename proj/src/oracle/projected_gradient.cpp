#include "gwl/oracle/projected_gradient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gwl::oracle {

namespace {

double kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
  return std::exp(-gamma * d2);
}

std::vector<double> gradient(const DualProblem& p, std::span<const double> alpha) {
  // Gradient of f = 1/2 a'Qa - sum a (minimization form).
  std::vector<double> grad(p.l, -1.0);
  for (std::size_t i = 0; i < p.l; ++i)
    for (std::size_t j = 0; j < p.l; ++j) grad[i] += p.q[i * p.l + j] * alpha[j];
  return grad;
}

double clip(double v, double hi) { return std::min(std::max(v, 0.0), hi); }

double balance(std::span<const double> z, std::span<const double> y,
               std::span<const double> upper, double lambda) {
  double h = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) h += y[i] * clip(z[i] - lambda * y[i], upper[i]);
  return h;
}

}  // namespace

DualProblem make_problem(std::span<const double> points, std::size_t d,
                         std::span<const double> y, std::span<const double> upper, double gamma) {
  DualProblem p;
  p.l = y.size();
  if (points.size() != p.l * d || upper.size() != p.l)
    throw std::invalid_argument("oracle: inconsistent problem sizes");
  p.y.assign(y.begin(), y.end());
  p.upper.assign(upper.begin(), upper.end());
  p.q.resize(p.l * p.l);
  for (std::size_t i = 0; i < p.l; ++i)
    for (std::size_t j = 0; j < p.l; ++j)
      p.q[i * p.l + j] =
          y[i] * y[j] * kernel(points.subspan(i * d, d), points.subspan(j * d, d), gamma);
  return p;
}

double objective(const DualProblem& p, std::span<const double> alpha) {
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < p.l; ++i) {
    lin += alpha[i];
    for (std::size_t j = 0; j < p.l; ++j) quad += alpha[i] * p.q[i * p.l + j] * alpha[j];
  }
  return lin - 0.5 * quad;
}

std::vector<double> project(std::span<const double> z, std::span<const double> y,
                            std::span<const double> upper) {
  // a(lambda) = clip(z - lambda y, 0, u); h(lambda) = y'a(lambda) is
  // continuous, piecewise linear and nonincreasing. Its kinks sit where
  // z_i - lambda y_i hits 0 or u_i; find the bracketing kinks and interpolate.
  const std::size_t n = z.size();
  std::vector<double> kinks;
  kinks.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    kinks.push_back(y[i] * z[i]);
    kinks.push_back(y[i] * (z[i] - upper[i]));
  }
  std::sort(kinks.begin(), kinks.end());

  double lambda = 0.0;
  if (balance(z, y, upper, kinks.front()) <= 0.0) {
    lambda = kinks.front();
  } else if (balance(z, y, upper, kinks.back()) >= 0.0) {
    lambda = kinks.back();
  } else {
    std::size_t lo = 0, hi = kinks.size() - 1;  // h(lo) > 0 > h(hi)
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (balance(z, y, upper, kinks[mid]) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    const double h_lo = balance(z, y, upper, kinks[lo]);
    const double h_hi = balance(z, y, upper, kinks[hi]);
    lambda = h_lo == h_hi ? kinks[lo]
                          : kinks[lo] + (kinks[hi] - kinks[lo]) * h_lo / (h_lo - h_hi);
  }
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = clip(z[i] - lambda * y[i], upper[i]);
  return a;
}

Result maximize(const DualProblem& p, const Options& options) {
  const std::size_t l = p.l;
  // Lipschitz bound of the gradient: largest absolute row sum of Q.
  double lipschitz = 0.0;
  for (std::size_t i = 0; i < l; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < l; ++j) row += std::abs(p.q[i * l + j]);
    lipschitz = std::max(lipschitz, row);
  }
  const double step = 1.0 / lipschitz;

  // FISTA with function-value restart.
  std::vector<double> x(l, 0.0), x_prev(l, 0.0), v(l, 0.0), z(l);
  double t = 1.0;
  double f_prev = -objective(p, x);
  Result r;
  for (; r.iterations < options.max_iterations; ++r.iterations) {
    const auto grad = gradient(p, v);
    for (std::size_t i = 0; i < l; ++i) z[i] = v[i] - step * grad[i];
    x_prev = x;
    x = project(z, p.y, p.upper);

    const double f = -objective(p, x);
    double moved = 0.0;
    for (std::size_t i = 0; i < l; ++i) moved = std::max(moved, std::abs(x[i] - x_prev[i]));
    if (f > f_prev) {
      // A plain projected step cannot increase f beyond rounding, so we are done.
      if (t == 1.0) {
        x = x_prev;
        break;
      }
      // Momentum overshot: restart from the previous iterate.
      t = 1.0;
      v = x_prev;
      x = x_prev;
      continue;
    }
    f_prev = f;
    if (moved < options.step_tolerance) break;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    for (std::size_t i = 0; i < l; ++i) v[i] = x[i] + ((t - 1.0) / t_next) * (x[i] - x_prev[i]);
    t = t_next;
  }
  r.alpha = x;
  r.objective = objective(p, x);

  // Bias: f_i = (Q a)_i * y_i + b. Average over free multipliers, else the
  // midpoint of the KKT interval.
  std::vector<double> g(l, 0.0);
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = 0; j < l; ++j) g[i] += p.q[i * l + j] * x[j];
    g[i] *= p.y[i];
  }
  double sum = 0.0;
  std::size_t free = 0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < l; ++i) {
    const double e = p.y[i] - g[i];
    const double eps = 1e-9 * p.upper[i];
    if (x[i] > eps && x[i] < p.upper[i] - eps) {
      sum += e;
      ++free;
    } else if ((x[i] <= eps) == (p.y[i] > 0)) {
      lo = std::max(lo, e);
    } else {
      hi = std::min(hi, e);
    }
  }
  if (free > 0)
    r.bias = sum / double(free);
  else if (std::isfinite(lo) && std::isfinite(hi))
    r.bias = 0.5 * (lo + hi);
  else
    r.bias = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
  return r;
}

double decision(std::span<const double> points, std::size_t d, std::span<const double> y,
                std::span<const double> alpha, double bias, double gamma,
                std::span<const double> x) {
  double f = bias;
  for (std::size_t i = 0; i < y.size(); ++i)
    f += alpha[i] * y[i] * kernel(points.subspan(i * d, d), x, gamma);
  return f;
}

}  // namespace gwl::oracle
