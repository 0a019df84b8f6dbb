#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace nac {

// Per-feature affine map onto [0,1] fitted from data ranges.
struct Normalizer {
  Eigen::VectorXd lo;
  Eigen::VectorXd range;  // max(hi - lo, tiny)

  static Normalizer fit(const Eigen::MatrixXd& samples);  // cols = samples
  Eigen::VectorXd normalize(const Eigen::VectorXd& v) const {
    return (v - lo).cwiseQuotient(range);
  }
  Eigen::VectorXd denormalize(const Eigen::VectorXd& v) const {
    return v.cwiseProduct(range) + lo;
  }
  Eigen::MatrixXd normalize_all(const Eigen::MatrixXd& m) const;
  Eigen::MatrixXd denormalize_all(const Eigen::MatrixXd& m) const;
};

struct MlpConfig {
  std::vector<int> hidden = {128, 128, 128, 128};
  bool batch_norm = true;
  double bn_momentum = 0.1;
  double bn_eps = 1e-5;
  int batch_size = 256;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double target_loss = 1e-3;
  int max_epochs = 60;
  std::uint64_t seed = 0;
};

// Fully connected network: each hidden layer is linear -> batch norm -> ReLU,
// the output layer is linear. Inference always uses the running statistics.
class MlpModel {
 public:
  struct Layer {
    Eigen::MatrixXd W;   // out x in
    Eigen::VectorXd b;
    bool has_bn = false;
    Eigen::VectorXd gamma, beta;
    Eigen::VectorXd running_mean, running_var;
    bool relu = false;
  };

  MlpModel() = default;
  static MlpModel init(int input_dim, int output_dim, const MlpConfig& config);

  int input_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_[0].W.cols()); }
  int output_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().W.rows()); }

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }
  Normalizer& input_norm() { return input_norm_; }
  const Normalizer& input_norm() const { return input_norm_; }
  Normalizer& output_norm() { return output_norm_; }
  const Normalizer& output_norm() const { return output_norm_; }

  // Raw-unit inference: denormalize(net(normalize(features))).
  Eigen::VectorXd forward(const Eigen::VectorXd& features) const;
  Eigen::MatrixXd forward_all(const Eigen::MatrixXd& features) const;

  // Normalized-space forward in training mode (batch statistics); does not
  // touch the running statistics.
  Eigen::MatrixXd forward_train(const Eigen::MatrixXd& x, double bn_eps) const;

  std::string to_json() const;
  static MlpModel from_json(const std::string& text);

 private:
  Eigen::MatrixXd forward_eval(const Eigen::MatrixXd& x) const;

  std::vector<Layer> layers_;
  Normalizer input_norm_;
  Normalizer output_norm_;
  double bn_eps_ = 1e-5;
};

struct TrainingData {
  Eigen::MatrixXd features;  // in x N
  Eigen::MatrixXd targets;   // out x N
};

struct TrainResult {
  MlpModel model;
  std::vector<double> loss_curve;  // mean per-batch loss per epoch (normalized units)
  int epochs = 0;
  bool reached_target = false;
};

// Deterministic minibatch Adam on the MSE loss; data is normalized to [0,1]
// from its own ranges before training. Throws on empty data and on a
// non-finite loss (message carries the epoch index).
TrainResult train_mlp(const TrainingData& data, const MlpConfig& config);

struct GradCheckResult {
  double max_rel_error = 0.0;
  double grad_norm = 0.0;
};

// Central-difference check of the analytic parameter gradients of the MSE
// loss on the given batch (normalized units, training-mode forward).
GradCheckResult gradient_check(const MlpModel& model, const Eigen::MatrixXd& x,
                               const Eigen::MatrixXd& y, double epsilon);

}  // namespace nac
