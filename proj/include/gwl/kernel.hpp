#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gwl/dataset.hpp"

namespace gwl {

/// exp(-gamma * ||a - b||^2). Throws gwl::Error on dimension mismatch or
/// non-positive gamma.
double rbf(std::span<const double> a, std::span<const double> b, double gamma);

double squared_distance(std::span<const double> a, std::span<const double> b);

/// Dense symmetric RBF Gram matrix. Each unordered pair is evaluated once and
/// mirrored, so symmetry is exact and the diagonal is exactly 1.
class GramCache {
public:
  GramCache() = default;
  GramCache(FeatureView x, double gamma);

  /// Wraps an explicit symmetric n x n matrix (row-major).
  static GramCache from_values(std::size_t n, std::vector<double> values, double gamma = 0.0);

  std::size_t size() const { return n_; }
  double gamma() const { return gamma_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * n_, n_);
  }

private:
  std::size_t n_ = 0;
  double gamma_ = 0.0;
  std::vector<double> values_;
};

inline GramCache gram(FeatureView x, double gamma) { return GramCache(x, gamma); }

}  // namespace gwl
