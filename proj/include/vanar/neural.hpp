#ifndef VANAR_NEURAL_HPP
#define VANAR_NEURAL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "vanar/core.hpp"

namespace vanar::nn {

enum class Activation { Relu, Linear };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// Affine map followed by an elementwise activation. weights is out x in.
struct Layer {
  Matrix weights;
  Vector biases;
  Activation activation = Activation::Relu;
};

/**
 * @brief Fully connected feed-forward network.
 *
 * Hidden layers use ReLU and the output layer is linear for every network
 * built by `Mlp::initialized`. Batched methods take samples as rows.
 */
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<Layer> layers);

  /// Glorot-uniform weights drawn from a generator seeded with `seed`,
  /// zero biases, ReLU hidden layers, linear output.
  static Mlp initialized(const std::vector<int>& dims, std::uint64_t seed);

  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }
  std::vector<int> dims() const;
  Eigen::Index input_dim() const;
  Eigen::Index output_dim() const;
  std::size_t parameter_count() const;

  Vector forward(const Vector& x) const;
  Matrix forward_batch(const Matrix& inputs) const;

 private:
  std::vector<Layer> layers_;
};

/// Parameter-shaped container used for gradients and AdaGrad accumulators.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static Gradients zeros_like(const Mlp& net);
};

struct LossAndGradients {
  double loss = 0.0;
  Gradients grads;
};

/// Mean squared error over every (sample, output) entry and its exact
/// gradient by reverse-mode differentiation. ReLU'(0) is taken as 0.
LossAndGradients loss_and_gradients(const Mlp& net, const Matrix& inputs, const Matrix& targets);

double mse(const Mlp& net, const Matrix& inputs, const Matrix& targets);

/// AdaGrad: acc += g^2; w -= lr * g / (sqrt(acc) + eps).
class AdaGrad {
 public:
  AdaGrad(const Mlp& shape, double learning_rate, double epsilon = 1e-8);

  void step(Mlp& net, const Gradients& grads);

  const Gradients& accumulators() const { return acc_; }
  double learning_rate() const { return lr_; }
  double epsilon() const { return eps_; }

 private:
  Gradients acc_;
  double lr_;
  double eps_;
};

struct TrainConfig {
  int epochs = 200;
  int batch_size = 32;
  std::uint64_t seed = 0;
  /// Fraction of rows, taken from the tail, held out for early stopping.
  double validation_fraction = 0.1;
  int patience = 20;
  double learning_rate = 1e-4;
  double adagrad_epsilon = 1e-8;

  void validate(Eigen::Index rows) const;
};

struct TrainResult {
  Mlp net;
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  /// Epoch (1-based) whose weights were kept; 0 when no epoch ran.
  int best_epoch = 0;
};

/**
 * Mini-batch AdaGrad on MSE. Each epoch visits the training rows in a
 * shuffled order drawn from `cfg.seed`. With a validation split, the weights
 * from the epoch with the lowest validation loss are returned and training
 * stops after `patience` epochs without improvement.
 *
 * Throws "training diverged" on a non-finite loss.
 */
TrainResult train(Mlp net, const Matrix& inputs, const Matrix& targets, const TrainConfig& cfg);

/// Number of tail rows held out by `cfg` for a design with `rows` rows.
Eigen::Index validation_rows(Eigen::Index rows, double fraction);

}  // namespace vanar::nn

#endif  // VANAR_NEURAL_HPP
