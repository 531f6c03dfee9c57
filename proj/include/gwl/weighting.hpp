#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gwl/dataset.hpp"

namespace gwl {

/// Weighting functions w_i = f(s_i) applied to the slack (or loss) of sample i.
enum class Scheme {
  none,         // w = 1
  sqrt_density, // 1: sqrt(s)
  density,      // 2: s
  square,       // 3: s^2
  inv_sqrt,     // 4: 1 / sqrt(s)
  inv,          // 5: 1 / s
  inv_square,   // 6: 1 / s^2
  signed_density, // 7: sy, clamped to stay positive
  random,       // 8: 1 + U[0, 1]
};

/// Short name used on the command line and in reports: "none", "1" ... "8".
std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);
std::vector<Scheme> parse_scheme_list(const std::string& csv);

/// True for schemes 1-7, which need a density and therefore a gamma_s.
bool uses_density(Scheme s);

/// Lower clamp applied to signed-density weights.
inline constexpr double kSignedDensityFloor = 1e-6;

struct DensityVector {
  std::vector<double> s;
  std::optional<std::vector<double>> sy;
  double gamma_s = 0.0;
};

/// s_i = sum_j exp(-gamma_s ||x_i - x_j||^2) over all j, self term included.
DensityVector density(FeatureView x, double gamma_s);

/// Adds sy_i = sum_j y_i y_j exp(-gamma_s ||x_i - x_j||^2).
DensityVector signed_density(FeatureView x, std::span<const double> y, double gamma_s);

struct SampleWeights {
  Scheme scheme = Scheme::none;
  std::optional<double> gamma_s;
  std::vector<double> values;
  std::uint64_t seed = 0;

  std::size_t size() const { return values.size(); }
  friend bool operator==(const SampleWeights&, const SampleWeights&) = default;
};

/// Maps a density vector to weights. dv is required for schemes 1-7 (with sy
/// for scheme 7); l is only used by none/random when dv is absent.
SampleWeights make_weights(const DensityVector* dv, Scheme scheme, std::uint64_t seed,
                           std::size_t l = 0);

SampleWeights uniform_weights(std::size_t l);

/// Computes whatever density the scheme needs on `train` and maps it to weights.
SampleWeights compute_weights(const Dataset& train, Scheme scheme,
                              std::optional<double> gamma_s, std::uint64_t seed);

/// Rescales to unit mean; the scheme, gamma and seed are kept.
SampleWeights normalized(SampleWeights w);

/// One value per line, shortest round-trip decimal form.
void write_weights(std::ostream& out, const SampleWeights& w);

}  // namespace gwl
