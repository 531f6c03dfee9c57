#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gwl/error.hpp"
#include "gwl/metrics.hpp"
#include "gwl/mlp.hpp"
#include "gwl/random.hpp"

using namespace gwl;

namespace {

MlpModel random_net(std::vector<std::size_t> sizes, std::uint64_t seed, double range = 0.5) {
  MlpArch arch{std::move(sizes), Activation::relu, seed};
  MlpModel m(arch);
  Rng rng(seed + 1);
  std::uniform_real_distribution<double> u(-range, range);
  for (auto& layer : m.layers()) {
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = u(rng);
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = u(rng);
  }
  return m;
}

double loss_at(const MlpModel& m, const Eigen::MatrixXd& x, const std::vector<double>& t,
               const std::vector<double>& w) {
  const Eigen::VectorXd p = m.forward(x);
  return weighted_loss(std::span<const double>(p.data(), p.size()), t, w, BaseLoss::mse);
}

}  // namespace

TEST_CASE("forward pass") {
  MlpArch arch{{3, 4, 1}, Activation::relu, 1};
  MlpModel m(arch);
  for (auto& l : m.layers()) {
    l.weight.setZero();
    l.bias.setZero();
  }
  const std::vector<double> x{1, 2, 3};
  CHECK(m.forward(x) == 0.0);

  std::vector<DenseLayer> id(2);
  id[0].weight = Eigen::MatrixXd::Constant(1, 1, 1.0);
  id[0].bias = Eigen::VectorXd::Zero(1);
  id[1] = id[0];
  const MlpModel ident(MlpArch{{1, 1, 1}, Activation::relu, 0}, id);
  CHECK(ident.forward(std::vector<double>{-5.0}) == 0.0);
  CHECK(ident.forward(std::vector<double>{2.5}) == 2.5);
}

TEST_CASE("forward matches a hand evaluation") {
  const auto m = random_net({2, 3, 2, 1}, 9);
  const std::vector<double> x{0.3, -0.8};
  std::vector<double> h(x);
  const auto& ls = m.layers();
  for (std::size_t k = 0; k < ls.size(); ++k) {
    std::vector<double> next(ls[k].weight.rows());
    for (Eigen::Index r = 0; r < ls[k].weight.rows(); ++r) {
      double v = ls[k].bias[r];
      for (Eigen::Index c = 0; c < ls[k].weight.cols(); ++c) v += ls[k].weight(r, c) * h[c];
      next[r] = (k + 1 < ls.size()) ? std::max(v, 0.0) : v;
    }
    h = next;
  }
  CHECK(m.forward(x) == doctest::Approx(h[0]).epsilon(1e-14));
  CHECK(m.parameter_count() == (2 * 3 + 3) + (3 * 2 + 2) + (2 + 1));
}

TEST_CASE("weighted loss") {
  const std::vector<double> p{1, 2}, t{1, 4};
  CHECK(weighted_loss(p, p, std::vector<double>{3, 7}, BaseLoss::mse) == 0.0);
  CHECK(weighted_loss(p, t, std::vector<double>{1, 1}, BaseLoss::mae) == 1.0);
  CHECK(weighted_loss(p, t, {}, BaseLoss::mse) == 2.0);
  CHECK(weighted_loss(p, t, std::vector<double>{1, 1}, BaseLoss::mse) ==
        weighted_loss(p, t, {}, BaseLoss::mse));
  CHECK(weighted_loss(p, t, std::vector<double>{2.5, 2.5}, BaseLoss::mse) ==
        doctest::Approx(2.5 * 2.0));
}

TEST_CASE("gradients match central differences") {
  for (std::uint64_t seed : {3u, 4u}) {
    auto m = random_net({11, 20, 10, 1}, seed);
    Rng rng(seed * 31);
    std::uniform_real_distribution<double> u(-1, 1), wd(1, 3);
    Eigen::MatrixXd x(16, 11);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
    std::vector<double> t(16), w(16);
    for (auto& v : t) v = u(rng);
    for (auto& v : w) v = wd(rng);

    const auto g = gradients(m, x, t, w, BaseLoss::mse);
    const double h = 1e-5;
    double worst = 0;
    for (std::size_t k = 0; k < m.layers().size(); ++k) {
      auto probe = [&](double& param, double analytic) {
        const double keep = param;
        param = keep + h;
        const double up = loss_at(m, x, t, w);
        param = keep - h;
        const double down = loss_at(m, x, t, w);
        param = keep;
        const double numeric = (up - down) / (2 * h);
        const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
        worst = std::max(worst, std::abs(numeric - analytic) / denom);
      };
      auto& layer = m.layers()[k];
      for (Eigen::Index i = 0; i < layer.weight.size(); ++i)
        probe(layer.weight.data()[i], g.layers[k].weight.data()[i]);
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i)
        probe(layer.bias[i], g.layers[k].bias[i]);
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("gradient linearity and stationarity") {
  const auto m = random_net({3, 5, 1}, 12);
  Eigen::MatrixXd x(4, 3);
  x << 0.1, 0.2, 0.3, -0.4, 0.5, 0.1, 0.9, -0.9, 0.0, 0.3, 0.3, -0.2;
  std::vector<double> t{0.5, -0.1, 0.2, 0.7}, w{1, 2, 0.5, 1.5}, w2{2, 4, 1, 3};
  const auto a = gradients(m, x, t, w, BaseLoss::mse);
  const auto b = gradients(m, x, t, w2, BaseLoss::mse);
  for (std::size_t k = 0; k < a.layers.size(); ++k)
    CHECK(b.layers[k].weight.isApprox(2.0 * a.layers[k].weight, 1e-14));

  const Eigen::VectorXd p = m.forward(x);
  const std::vector<double> fit(p.data(), p.data() + p.size());
  const auto z = gradients(m, x, fit, w, BaseLoss::mse);
  for (const auto& l : z.layers) {
    CHECK(l.weight.cwiseAbs().maxCoeff() == 0.0);
    CHECK(l.bias.cwiseAbs().maxCoeff() == 0.0);
  }
}

namespace {

Dataset line_data() {
  Dataset ds;
  ds.task = Task::regression;
  ds.dim = 1;
  for (int i = 0; i < 64; ++i) {
    const double x = -1.0 + 2.0 * i / 63.0;
    ds.push_back(std::vector<double>{x}, 0.8 * x + 0.3);
  }
  return ds;
}

}  // namespace

TEST_CASE("training descends and is deterministic") {
  const auto ds = line_data();
  MlpArch arch{{1, 8, 1}, Activation::relu, 5};
  TrainConfig cfg;
  cfg.epochs = 8;
  cfg.batch_size = 64;
  cfg.learning_rate = 0.05;
  cfg.seed = 6;
  std::vector<double> losses;
  cfg.on_epoch = [&](std::size_t, const MlpModel& m) {
    const auto p = m.predict(ds.features());
    losses.push_back(mae(p, ds.y));
  };
  const auto a = train_mlp(ds, arch, cfg);
  for (std::size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] < losses[i - 1]);

  cfg.on_epoch = nullptr;
  const auto b = train_mlp(ds, arch, cfg);
  for (std::size_t k = 0; k < a.layers().size(); ++k)
    CHECK(a.layers()[k].weight == b.layers()[k].weight);

  std::vector<double> w(ds.size(), 1.0);
  for (std::size_t i = 48; i < ds.size(); ++i) w[i] = 5.0;
  const auto c = train_mlp(ds, arch, cfg, w);
  CHECK_FALSE(a.layers()[0].weight == c.layers()[0].weight);
}

TEST_CASE("mlp file round trip") {
  const auto m = random_net({4, 6, 3, 1}, 21);
  std::stringstream io;
  save_mlp(io, m);
  const auto back = load_mlp(io);
  const std::vector<double> x{0.1, -2, 0.5, 1};
  CHECK(back.forward(x) == m.forward(x));
  CHECK(back.arch().layer_sizes == m.arch().layer_sizes);
}

TEST_CASE("mae") {
  const std::vector<double> a{1, 2}, b{1, 4};
  CHECK(mae(a, a) == 0.0);
  CHECK(mae(std::vector<double>{0}, std::vector<double>{1}) == 1.0);
  CHECK(mae(a, b) == 1.0);
  CHECK_THROWS_AS(mae(a, std::vector<double>{1}), Error);
}
