#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Reference maximizer for the weighted SVC dual, written independently of
// gwl::svc. It evaluates its own kernel, uses accelerated projected gradient
// with an exact projection, and recovers the bias by its own KKT scan.
namespace gwl::oracle {

struct DualProblem {
  std::size_t l = 0;
  std::vector<double> q;  // Q_ij = y_i y_j K(x_i, x_j), row-major
  std::vector<double> y;
  std::vector<double> upper;
};

/// Builds Q from row-major points of dimension d with an RBF kernel.
DualProblem make_problem(std::span<const double> points, std::size_t d,
                         std::span<const double> y, std::span<const double> upper, double gamma);

/// D(a) = sum a - 1/2 a'Qa.
double objective(const DualProblem& p, std::span<const double> alpha);

/// Euclidean projection of z onto {0 <= a <= upper, y'a = 0}.
std::vector<double> project(std::span<const double> z, std::span<const double> y,
                            std::span<const double> upper);

struct Options {
  std::size_t max_iterations = 2'000'000;
  /// Stop when an iteration moves alpha by less than this (infinity norm).
  double step_tolerance = 1e-15;
};

struct Result {
  std::vector<double> alpha;
  double objective = 0.0;
  double bias = 0.0;
  std::size_t iterations = 0;
};

Result maximize(const DualProblem& p, const Options& options = {});

/// Decision value sum_i a_i y_i K(x_i, x) + b at an arbitrary point.
double decision(std::span<const double> points, std::size_t d, std::span<const double> y,
                std::span<const double> alpha, double bias, double gamma,
                std::span<const double> x);

}  // namespace gwl::oracle
