#include "gwl/kernel.hpp"

#include <cmath>

#include <fmt/format.h>

#include "gwl/error.hpp"

namespace gwl {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(fmt::format("dimension mismatch: {} vs {}", a.size(), b.size()));
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    acc += diff * diff;
  }
  return acc;
}

double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
  if (!(gamma > 0.0)) throw Error(fmt::format("RBF gamma must be positive, got {}", gamma));
  return std::exp(-gamma * squared_distance(a, b));
}

GramCache::GramCache(FeatureView x, double gamma) : n_(x.size()), gamma_(gamma) {
  if (n_ == 0) throw Error("Gram matrix of an empty sample set");
  if (!(gamma > 0.0)) throw Error(fmt::format("RBF gamma must be positive, got {}", gamma));
  values_.assign(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    values_[i * n_ + i] = 1.0;
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double k = std::exp(-gamma * squared_distance(x[i], x[j]));
      values_[i * n_ + j] = k;
      values_[j * n_ + i] = k;
    }
  }
}

GramCache GramCache::from_values(std::size_t n, std::vector<double> values, double gamma) {
  if (values.size() != n * n)
    throw Error(fmt::format("Gram matrix needs {} values, got {}", n * n, values.size()));
  GramCache g;
  g.n_ = n;
  g.gamma_ = gamma;
  g.values_ = std::move(values);
  return g;
}

}  // namespace gwl
