#pragma once

#include <span>

namespace gwl {

/// F1 of the `positive` class: 2TP / (2TP + FP + FN), 0 when undefined.
double f1(std::span<const int> predicted, std::span<const int> truth, int positive = 1);

double mae(std::span<const double> predicted, std::span<const double> target);

}  // namespace gwl
