#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gwl/dataset.hpp"

namespace gwl {

enum class Activation { relu, tanh };
enum class BaseLoss { mse, mae };

std::string activation_name(Activation a);
Activation parse_activation(const std::string& name);
std::string loss_name(BaseLoss b);
BaseLoss parse_loss(const std::string& name);

struct MlpArch {
  /// Input dimension, hidden widths..., 1.
  std::vector<std::size_t> layer_sizes;
  Activation activation = Activation::relu;
  std::uint64_t seed = 0;
};

/// Parses "11,100,50,20,1".
std::vector<std::size_t> parse_layer_sizes(const std::string& csv);

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

/// Feed-forward regressor: hidden layers use the activation, the output
/// layer is linear.
class MlpModel {
public:
  MlpModel() = default;
  /// Uniform initialization in [-1/sqrt(fan_in), 1/sqrt(fan_in)], seeded.
  explicit MlpModel(MlpArch arch);
  MlpModel(MlpArch arch, std::vector<DenseLayer> layers);

  const MlpArch& arch() const { return arch_; }
  std::size_t input_dim() const { return arch_.layer_sizes.front(); }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  std::size_t parameter_count() const;

  double forward(std::span<const double> x) const;
  /// One prediction per row of x (n x d).
  Eigen::VectorXd forward(const Eigen::MatrixXd& x) const;
  std::vector<double> predict(FeatureView x) const;

private:
  MlpArch arch_;
  std::vector<DenseLayer> layers_;
};

/// L = (1/n) sum_i w_i * loss(pred_i, target_i). Empty weights mean w_i = 1.
double weighted_loss(std::span<const double> predicted, std::span<const double> target,
                     std::span<const double> weights, BaseLoss base);

/// Gradients of weighted_loss over a batch with respect to every parameter,
/// laid out like the model's layers.
struct Gradients {
  std::vector<DenseLayer> layers;
  double loss = 0.0;
};
Gradients gradients(const MlpModel& model, const Eigen::MatrixXd& x,
                    std::span<const double> target, std::span<const double> weights,
                    BaseLoss base);

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double learning_rate = 0.01;
  BaseLoss base = BaseLoss::mse;
  std::uint64_t seed = 0;
  /// Called after every epoch.
  std::function<void(std::size_t epoch, const MlpModel&)> on_epoch;
};

/// Mini-batch SGD on the weighted loss. `weights` must be empty or one per
/// sample of `data`.
MlpModel train_mlp(const Dataset& data, const MlpArch& arch, const TrainConfig& cfg,
                   std::span<const double> weights = {});

Eigen::MatrixXd to_matrix(FeatureView x);

/// Text format: header, arch line, then for each layer its shape, weight rows
/// and bias row.
void save_mlp(std::ostream& out, const MlpModel& model);
MlpModel load_mlp(std::istream& in);

}  // namespace gwl
