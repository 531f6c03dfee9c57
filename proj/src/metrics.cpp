#include "gwl/metrics.hpp"

#include <cmath>
#include <cstddef>

#include <fmt/format.h>

#include "gwl/error.hpp"

namespace gwl {

double f1(std::span<const int> predicted, std::span<const int> truth, int positive) {
  if (predicted.size() != truth.size())
    throw Error(fmt::format("f1: {} predictions for {} labels", predicted.size(), truth.size()));
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] == positive;
    const bool t = truth[i] == positive;
    tp += p && t;
    fp += p && !t;
    fn += !p && t;
  }
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * double(tp) / double(denom);
}

double mae(std::span<const double> predicted, std::span<const double> target) {
  if (predicted.size() != target.size())
    throw Error(fmt::format("mae: {} predictions for {} targets", predicted.size(), target.size()));
  if (target.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) acc += std::abs(predicted[i] - target[i]);
  return acc / double(target.size());
}

}  // namespace gwl
