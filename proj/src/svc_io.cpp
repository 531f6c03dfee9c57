// SVC model text format, one "key value" pair per line followed by the
// support vectors:
//
//   gwl-svc-model 1
//   dim <d>
//   gamma_k <real>
//   b <real>
//   scheme <none|1..8>
//   gamma_s <real|none>
//   C <real>
//   solver_seed <uint>
//   weight_seed <uint>
//   iterations <uint>
//   accepted_steps <uint>
//   converged <0|1>
//   objective <real>
//   kkt_violation <real>
//   support <n>
//   <alpha> <y> <x_1> ... <x_d>        (n lines)
//
// Reals use the shortest representation that parses back to the same double.

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gwl/error.hpp"
#include "gwl/svc.hpp"

namespace gwl {

namespace {

constexpr const char* kMagic = "gwl-svc-model";
constexpr int kVersion = 1;

template <typename T>
T parse_number(const std::string& tok, const std::string& what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw Error(fmt::format("model file: bad value '{}' for {}", tok, what));
  return v;
}

std::string expect_key(std::istream& in, const std::string& key) {
  std::string k, v;
  if (!(in >> k >> v) || k != key)
    throw Error(fmt::format("model file: expected '{}' entry", key));
  return v;
}

}  // namespace

void save_model(std::ostream& out, const SvcModel& m) {
  const auto& meta = m.meta;
  fmt::print(out, "{} {}\n", kMagic, kVersion);
  fmt::print(out, "dim {}\ngamma_k {}\nb {}\n", m.dim, m.gamma_k, m.b);
  fmt::print(out, "scheme {}\n", meta.scheme);
  if (meta.gamma_s)
    fmt::print(out, "gamma_s {}\n", *meta.gamma_s);
  else
    fmt::print(out, "gamma_s none\n");
  fmt::print(out, "C {}\nsolver_seed {}\nweight_seed {}\n", meta.C, meta.solver_seed,
             meta.weight_seed);
  fmt::print(out, "iterations {}\naccepted_steps {}\nconverged {}\n", meta.iterations,
             meta.accepted_steps, meta.converged ? 1 : 0);
  fmt::print(out, "objective {}\nkkt_violation {}\n", meta.objective, meta.kkt_violation);
  fmt::print(out, "support {}\n", m.support_size());
  for (std::size_t k = 0; k < m.support_size(); ++k) {
    fmt::print(out, "{} {}", m.sv_alpha[k], m.sv_y[k]);
    for (double v : m.support_vector(k)) fmt::print(out, " {}", v);
    out << '\n';
  }
}

SvcModel load_model(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic)
    throw Error("not a gwl SVC model file");
  if (version != kVersion)
    throw Error(fmt::format("unsupported SVC model version {}", version));

  SvcModel m;
  auto& meta = m.meta;
  m.dim = parse_number<std::size_t>(expect_key(in, "dim"), "dim");
  m.gamma_k = parse_number<double>(expect_key(in, "gamma_k"), "gamma_k");
  m.b = parse_number<double>(expect_key(in, "b"), "b");
  meta.scheme = expect_key(in, "scheme");
  const auto gs = expect_key(in, "gamma_s");
  if (gs != "none") meta.gamma_s = parse_number<double>(gs, "gamma_s");
  meta.C = parse_number<double>(expect_key(in, "C"), "C");
  meta.solver_seed = parse_number<std::uint64_t>(expect_key(in, "solver_seed"), "solver_seed");
  meta.weight_seed = parse_number<std::uint64_t>(expect_key(in, "weight_seed"), "weight_seed");
  meta.iterations = parse_number<std::uint64_t>(expect_key(in, "iterations"), "iterations");
  meta.accepted_steps =
      parse_number<std::uint64_t>(expect_key(in, "accepted_steps"), "accepted_steps");
  meta.converged = parse_number<int>(expect_key(in, "converged"), "converged") != 0;
  meta.objective = parse_number<double>(expect_key(in, "objective"), "objective");
  meta.kkt_violation = parse_number<double>(expect_key(in, "kkt_violation"), "kkt_violation");
  const auto n = parse_number<std::size_t>(expect_key(in, "support"), "support");

  m.sv_alpha.reserve(n);
  m.sv_y.reserve(n);
  m.sv_x.reserve(n * m.dim);
  std::string tok;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(in >> tok)) throw Error(fmt::format("model file: support vector {} missing", k));
    m.sv_alpha.push_back(parse_number<double>(tok, "alpha"));
    if (!(in >> tok)) throw Error(fmt::format("model file: support vector {} truncated", k));
    m.sv_y.push_back(parse_number<double>(tok, "label"));
    for (std::size_t c = 0; c < m.dim; ++c) {
      if (!(in >> tok)) throw Error(fmt::format("model file: support vector {} truncated", k));
      m.sv_x.push_back(parse_number<double>(tok, "feature"));
    }
  }
  return m;
}

}  // namespace gwl
