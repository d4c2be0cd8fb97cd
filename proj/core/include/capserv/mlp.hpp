#pragma once

#include <string>
#include <vector>

#include "capserv/window.hpp"

namespace capserv {

/// Training hyperparameters. Targets enter the loss as
/// (cm, cm, angle_scale*rad, angle_scale*rad) so translation and rotation
/// errors carry comparable weight; with the default 10 cm/rad, 0.1 rad of
/// angle error costs as much as 1 cm of position error.
struct TrainConfig {
  int epochs = 20;
  int batch_size = 128;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double angle_scale = 10.0;   // rad -> training units
  double val_fraction = 0.1;   // split by trajectory
  std::uint64_t seed = 0;

  void validate() const;
};

struct MlpGradients {
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::VectorXd> b;
};

/// Fully connected pose regressor: 300 inputs, four 400-node ReLU layers,
/// linear 4-node head. Input normalization stats and the target scaling are
/// frozen into the model at training time.
class MlpModel {
 public:
  static const std::vector<int>& layer_dims();

  MlpModel();  // zero weights, identity normalization

  /// Forward pass for one flattened window: z-scores the input, runs the
  /// network, and de-scales the angle outputs back to radians.
  Vec4 predict(const Eigen::VectorXd& x) const;

  /// Batched forward pass; X is n x 300, result n x 4.
  Eigen::MatrixXd predict_batch(const Eigen::MatrixXd& X) const;

  /// Mean squared error and parameter gradients on a batch in the training
  /// domain (normalized inputs, scaled targets). Exposed so gradient checks
  /// can compare against finite differences.
  double scaled_loss_and_gradients(const Eigen::MatrixXd& x_norm,
                                   const Eigen::MatrixXd& y_scaled,
                                   MlpGradients& grads) const;

  /// Forward pass in the training domain (no normalization, no de-scaling).
  Eigen::MatrixXd scaled_forward(const Eigen::MatrixXd& x_norm) const;

  Eigen::MatrixXd normalize(const Eigen::MatrixXd& X) const;

  void save(const std::string& path) const;
  static MlpModel load(const std::string& path);

  // Parameters. weights[l] is out x in, evaluated as a = act(W a_prev + b).
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  Eigen::VectorXd input_mean;  // 300
  Eigen::VectorXd input_sd;    // 300, all > 0
  Vec4 target_scale;           // (1, 1, angle_scale, angle_scale)
};

struct EpochLoss {
  int epoch = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;
};

struct TrainResult {
  MlpModel model;
  std::vector<EpochLoss> curve;
  std::vector<int> val_trajectories;  // trajectory ids held out for validation
};

/// Trains the pose regressor with Adam on seeded shuffled mini-batches.
/// Normalization stats come from the training split only; the validation
/// split holds out whole trajectories. Throws on NaN loss.
TrainResult mlp_train(const WindowedData& data, const TrainConfig& config);

}  // namespace capserv
