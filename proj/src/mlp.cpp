#include "gwl/mlp.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gwl/error.hpp"
#include "gwl/random.hpp"

namespace gwl {

std::string activation_name(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  throw Error(fmt::format("unknown activation '{}', expected relu or tanh", name));
}

std::string loss_name(BaseLoss b) { return b == BaseLoss::mse ? "mse" : "mae"; }

BaseLoss parse_loss(const std::string& name) {
  if (name == "mse") return BaseLoss::mse;
  if (name == "mae") return BaseLoss::mae;
  throw Error(fmt::format("unknown loss '{}', expected mse or mae", name));
}

std::vector<std::size_t> parse_layer_sizes(const std::string& csv) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    auto pos = csv.find(',', start);
    if (pos == std::string::npos) pos = csv.size();
    const auto tok = std::string_view(csv).substr(start, pos - start);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || v == 0)
      throw Error(fmt::format("bad layer size '{}' in '{}'", tok, csv));
    out.push_back(v);
    start = pos + 1;
  }
  return out;
}

namespace {

void check_arch(const MlpArch& arch) {
  if (arch.layer_sizes.size() < 2)
    throw Error("MLP needs at least an input and an output layer");
  if (arch.layer_sizes.back() != 1)
    throw Error(fmt::format("MLP output size must be 1, got {}", arch.layer_sizes.back()));
  for (auto s : arch.layer_sizes)
    if (s == 0) throw Error("MLP layer sizes must be positive");
}

void activate(Eigen::MatrixXd& z, Activation a) {
  if (a == Activation::relu)
    z = z.cwiseMax(0.0);
  else
    z = z.array().tanh().matrix();
}

// Derivative of the activation expressed through its pre-activation input.
Eigen::MatrixXd activation_slope(const Eigen::MatrixXd& z, Activation a) {
  if (a == Activation::relu) return (z.array() > 0.0).cast<double>().matrix();
  return (1.0 - z.array().tanh().square()).matrix();
}

}  // namespace

MlpModel::MlpModel(MlpArch arch) : arch_(std::move(arch)) {
  check_arch(arch_);
  Rng rng(arch_.seed);
  for (std::size_t k = 1; k < arch_.layer_sizes.size(); ++k) {
    const auto in = arch_.layer_sizes[k - 1];
    const auto out = arch_.layer_sizes[k];
    const double bound = 1.0 / std::sqrt(double(in));
    std::uniform_real_distribution<double> init(-bound, bound);
    DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd(out)};
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = init(rng);
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = init(rng);
    layers_.push_back(std::move(layer));
  }
}

MlpModel::MlpModel(MlpArch arch, std::vector<DenseLayer> layers)
    : arch_(std::move(arch)), layers_(std::move(layers)) {
  check_arch(arch_);
  if (layers_.size() != arch_.layer_sizes.size() - 1)
    throw Error("layer count does not match the architecture");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto in = Eigen::Index(arch_.layer_sizes[k]);
    const auto out = Eigen::Index(arch_.layer_sizes[k + 1]);
    if (layers_[k].weight.rows() != out || layers_[k].weight.cols() != in ||
        layers_[k].bias.size() != out)
      throw Error(fmt::format("layer {} shape does not match the architecture", k));
  }
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += std::size_t(l.weight.size() + l.bias.size());
  return n;
}

Eigen::VectorXd MlpModel::forward(const Eigen::MatrixXd& x) const {
  if (std::size_t(x.cols()) != input_dim())
    throw Error(fmt::format("MLP expects {} inputs, got {}", input_dim(), x.cols()));
  Eigen::MatrixXd a = x;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    Eigen::MatrixXd z = (a * layers_[k].weight.transpose()).rowwise() +
                        layers_[k].bias.transpose();
    if (k + 1 < layers_.size()) activate(z, arch_.activation);
    a = std::move(z);
  }
  return a.col(0);
}

double MlpModel::forward(std::span<const double> x) const {
  Eigen::MatrixXd row(1, Eigen::Index(x.size()));
  for (std::size_t c = 0; c < x.size(); ++c) row(0, Eigen::Index(c)) = x[c];
  return forward(row)(0);
}

std::vector<double> MlpModel::predict(FeatureView x) const {
  const Eigen::VectorXd out = forward(to_matrix(x));
  return {out.data(), out.data() + out.size()};
}

Eigen::MatrixXd to_matrix(FeatureView x) {
  Eigen::MatrixXd m(Eigen::Index(x.size()), Eigen::Index(x.dim()));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t c = 0; c < x.dim(); ++c) m(Eigen::Index(i), Eigen::Index(c)) = x[i][c];
  return m;
}

double weighted_loss(std::span<const double> predicted, std::span<const double> target,
                     std::span<const double> weights, BaseLoss base) {
  if (predicted.size() != target.size())
    throw Error(fmt::format("loss: {} predictions for {} targets", predicted.size(), target.size()));
  if (!weights.empty() && weights.size() != target.size())
    throw Error(fmt::format("loss: {} weights for {} targets", weights.size(), target.size()));
  if (target.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double r = predicted[i] - target[i];
    const double l = base == BaseLoss::mse ? r * r : std::abs(r);
    acc += (weights.empty() ? 1.0 : weights[i]) * l;
  }
  return acc / double(target.size());
}

Gradients gradients(const MlpModel& model, const Eigen::MatrixXd& x,
                    std::span<const double> target, std::span<const double> weights,
                    BaseLoss base) {
  const auto n = x.rows();
  if (std::size_t(n) != target.size())
    throw Error(fmt::format("gradients: {} rows for {} targets", n, target.size()));
  if (!weights.empty() && weights.size() != target.size())
    throw Error(fmt::format("gradients: {} weights for {} targets", weights.size(), target.size()));
  const auto& layers = model.layers();
  const auto act = model.arch().activation;

  // Forward pass keeping pre-activations and activations.
  std::vector<Eigen::MatrixXd> inputs{x};
  std::vector<Eigen::MatrixXd> pre;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    Eigen::MatrixXd z = (inputs.back() * layers[k].weight.transpose()).rowwise() +
                        layers[k].bias.transpose();
    pre.push_back(z);
    if (k + 1 < layers.size()) activate(z, act);
    inputs.push_back(std::move(z));
  }
  const Eigen::VectorXd pred = inputs.back().col(0);

  Gradients out;
  out.layers.resize(layers.size());
  Eigen::MatrixXd delta(n, 1);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = weights.empty() ? 1.0 : weights[std::size_t(i)];
    const double r = pred(i) - target[std::size_t(i)];
    if (base == BaseLoss::mse) {
      loss += w * r * r;
      delta(i, 0) = 2.0 * w * r / double(n);
    } else {
      loss += w * std::abs(r);
      delta(i, 0) = w * double((r > 0.0) - (r < 0.0)) / double(n);
    }
  }
  out.loss = n > 0 ? loss / double(n) : 0.0;

  for (std::size_t k = layers.size(); k-- > 0;) {
    out.layers[k].weight = delta.transpose() * inputs[k];
    out.layers[k].bias = delta.colwise().sum().transpose();
    if (k > 0)
      delta = (delta * layers[k].weight).cwiseProduct(activation_slope(pre[k - 1], act));
  }
  return out;
}

MlpModel train_mlp(const Dataset& data, const MlpArch& arch, const TrainConfig& cfg,
                   std::span<const double> weights) {
  if (data.task != Task::regression) throw Error("MLP training needs a regression dataset");
  if (cfg.epochs == 0 || cfg.batch_size == 0 || !(cfg.learning_rate > 0.0))
    throw Error("MLP training needs positive epochs, batch size and learning rate");
  if (!weights.empty() && weights.size() != data.size())
    throw Error(fmt::format("{} weights for {} samples", weights.size(), data.size()));
  if (arch.layer_sizes.empty() || arch.layer_sizes.front() != data.dim)
    throw Error(fmt::format("MLP input size must equal the feature count {}", data.dim));

  MlpModel model(arch);
  const Eigen::MatrixXd x = to_matrix(data.features());
  const std::size_t l = data.size();
  std::vector<std::size_t> order(l);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.seed);

  Eigen::MatrixXd batch_x;
  std::vector<double> batch_t, batch_w;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < l; start += cfg.batch_size) {
      const std::size_t stop = std::min(l, start + cfg.batch_size);
      const auto m = Eigen::Index(stop - start);
      batch_x.resize(m, x.cols());
      batch_t.resize(std::size_t(m));
      batch_w.resize(weights.empty() ? 0 : std::size_t(m));
      for (Eigen::Index r = 0; r < m; ++r) {
        const auto idx = order[start + std::size_t(r)];
        batch_x.row(r) = x.row(Eigen::Index(idx));
        batch_t[std::size_t(r)] = data.y[idx];
        if (!weights.empty()) batch_w[std::size_t(r)] = weights[idx];
      }
      const auto grad = gradients(model, batch_x, batch_t, batch_w, cfg.base);
      for (std::size_t k = 0; k < grad.layers.size(); ++k) {
        model.layers()[k].weight -= cfg.learning_rate * grad.layers[k].weight;
        model.layers()[k].bias -= cfg.learning_rate * grad.layers[k].bias;
      }
    }
    if (cfg.on_epoch) cfg.on_epoch(epoch, model);
  }
  return model;
}

// Layout:
//   gwl-mlp-model 1
//   arch <n_layers> <size_0> ... <size_n-1> <activation> <seed>
//   layer <k> <rows> <cols>
//   <rows lines of cols weights>
//   <one line of rows biases>
void save_mlp(std::ostream& out, const MlpModel& model) {
  const auto& arch = model.arch();
  fmt::print(out, "gwl-mlp-model 1\narch {}", arch.layer_sizes.size());
  for (auto s : arch.layer_sizes) fmt::print(out, " {}", s);
  fmt::print(out, " {} {}\n", activation_name(arch.activation), arch.seed);
  for (std::size_t k = 0; k < model.layers().size(); ++k) {
    const auto& layer = model.layers()[k];
    fmt::print(out, "layer {} {} {}\n", k, layer.weight.rows(), layer.weight.cols());
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
        fmt::print(out, "{}{}", c ? " " : "", layer.weight(r, c));
      out << '\n';
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r)
      fmt::print(out, "{}{}", r ? " " : "", layer.bias(r));
    out << '\n';
  }
}

namespace {

template <typename T>
T read_value(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) throw Error(fmt::format("MLP model file: missing {}", what));
  T v{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw Error(fmt::format("MLP model file: bad {} '{}'", what, tok));
  return v;
}

void expect_word(std::istream& in, const std::string& word) {
  std::string tok;
  if (!(in >> tok) || tok != word)
    throw Error(fmt::format("MLP model file: expected '{}'", word));
}

}  // namespace

MlpModel load_mlp(std::istream& in) {
  expect_word(in, "gwl-mlp-model");
  if (read_value<int>(in, "version") != 1) throw Error("unsupported MLP model version");
  expect_word(in, "arch");
  MlpArch arch;
  const auto n = read_value<std::size_t>(in, "layer count");
  for (std::size_t k = 0; k < n; ++k) arch.layer_sizes.push_back(read_value<std::size_t>(in, "layer size"));
  std::string act;
  in >> act;
  arch.activation = parse_activation(act);
  arch.seed = read_value<std::uint64_t>(in, "seed");
  check_arch(arch);

  std::vector<DenseLayer> layers;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    expect_word(in, "layer");
    if (read_value<std::size_t>(in, "layer index") != k) throw Error("MLP model file: layers out of order");
    const auto rows = read_value<Eigen::Index>(in, "rows");
    const auto cols = read_value<Eigen::Index>(in, "cols");
    DenseLayer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) layer.weight(r, c) = read_value<double>(in, "weight");
    for (Eigen::Index r = 0; r < rows; ++r) layer.bias(r) = read_value<double>(in, "bias");
    layers.push_back(std::move(layer));
  }
  return MlpModel(std::move(arch), std::move(layers));
}

}  // namespace gwl
