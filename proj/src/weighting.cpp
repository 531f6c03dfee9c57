#include "gwl/weighting.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "gwl/error.hpp"
#include "gwl/kernel.hpp"
#include "gwl/random.hpp"

namespace gwl {

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::none: return "none";
    case Scheme::sqrt_density: return "1";
    case Scheme::density: return "2";
    case Scheme::square: return "3";
    case Scheme::inv_sqrt: return "4";
    case Scheme::inv: return "5";
    case Scheme::inv_square: return "6";
    case Scheme::signed_density: return "7";
    case Scheme::random: return "8";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "none" || name == "0") return Scheme::none;
  if (name.size() == 1 && name[0] >= '1' && name[0] <= '8')
    return static_cast<Scheme>(name[0] - '0');
  throw Error(fmt::format("unknown weighting scheme '{}', expected none or 1-8", name));
}

std::vector<Scheme> parse_scheme_list(const std::string& csv) {
  std::vector<Scheme> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto pos = csv.find(',', start);
    out.push_back(parse_scheme(csv.substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

bool uses_density(Scheme s) { return s != Scheme::none && s != Scheme::random; }

namespace {

void check_gamma(double gamma_s) {
  if (!(gamma_s > 0.0)) throw Error(fmt::format("gamma_s must be positive, got {}", gamma_s));
}

}  // namespace

DensityVector density(FeatureView x, double gamma_s) {
  check_gamma(gamma_s);
  const std::size_t l = x.size();
  if (l == 0) throw Error("density of an empty sample set");
  DensityVector dv;
  dv.gamma_s = gamma_s;
  dv.s.assign(l, 1.0);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = i + 1; j < l; ++j) {
      const double k = std::exp(-gamma_s * squared_distance(x[i], x[j]));
      dv.s[i] += k;
      dv.s[j] += k;
    }
  return dv;
}

DensityVector signed_density(FeatureView x, std::span<const double> y, double gamma_s) {
  check_gamma(gamma_s);
  const std::size_t l = x.size();
  if (l == 0) throw Error("density of an empty sample set");
  if (y.size() != l) throw Error(fmt::format("{} labels for {} samples", y.size(), l));
  for (double v : y)
    if (v != 1.0 && v != -1.0) throw Error("signed density needs labels in {-1, +1}");
  DensityVector dv;
  dv.gamma_s = gamma_s;
  dv.s.assign(l, 1.0);
  std::vector<double> sy(l, 1.0);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = i + 1; j < l; ++j) {
      const double k = std::exp(-gamma_s * squared_distance(x[i], x[j]));
      dv.s[i] += k;
      dv.s[j] += k;
      const double signed_k = y[i] * y[j] * k;
      sy[i] += signed_k;
      sy[j] += signed_k;
    }
  dv.sy = std::move(sy);
  return dv;
}

SampleWeights uniform_weights(std::size_t l) {
  SampleWeights w;
  w.values.assign(l, 1.0);
  return w;
}

SampleWeights make_weights(const DensityVector* dv, Scheme scheme, std::uint64_t seed,
                           std::size_t l) {
  if (dv) l = dv->s.size();
  SampleWeights w;
  w.scheme = scheme;

  if (scheme == Scheme::none) {
    w.values.assign(l, 1.0);
    return w;
  }
  if (scheme == Scheme::random) {
    w.seed = seed;
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    w.values.resize(l);
    for (auto& v : w.values) v = 1.0 + unit(rng);
    return w;
  }

  if (!dv) throw Error(fmt::format("scheme {} needs a density vector", scheme_name(scheme)));
  w.gamma_s = dv->gamma_s;
  if (scheme == Scheme::signed_density) {
    if (!dv->sy) throw Error("scheme 7 needs the signed density sy");
    w.values = *dv->sy;
    for (auto& v : w.values) v = std::max(v, kSignedDensityFloor);
    return w;
  }

  w.values.resize(l);
  for (std::size_t i = 0; i < l; ++i) {
    const double s = dv->s[i];
    double v = s;
    switch (scheme) {
      case Scheme::sqrt_density: v = std::sqrt(s); break;
      case Scheme::density: v = s; break;
      case Scheme::square: v = s * s; break;
      case Scheme::inv_sqrt: v = 1.0 / std::sqrt(s); break;
      case Scheme::inv: v = 1.0 / s; break;
      case Scheme::inv_square: v = 1.0 / (s * s); break;
      default: break;
    }
    w.values[i] = v;
  }
  return w;
}

SampleWeights compute_weights(const Dataset& train, Scheme scheme,
                              std::optional<double> gamma_s, std::uint64_t seed) {
  if (!uses_density(scheme)) return make_weights(nullptr, scheme, seed, train.size());
  if (!gamma_s)
    throw Error(fmt::format("scheme {} needs a gamma_s value", scheme_name(scheme)));
  const auto dv = scheme == Scheme::signed_density
                      ? signed_density(train.features(), train.y, *gamma_s)
                      : density(train.features(), *gamma_s);
  return make_weights(&dv, scheme, seed);
}

SampleWeights normalized(SampleWeights w) {
  if (w.values.empty()) return w;
  double mean = 0.0;
  for (double v : w.values) mean += v;
  mean /= static_cast<double>(w.values.size());
  for (auto& v : w.values) v /= mean;
  return w;
}

void write_weights(std::ostream& out, const SampleWeights& w) {
  for (double v : w.values) out << fmt::format("{}\n", v);
}

}  // namespace gwl
