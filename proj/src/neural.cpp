#include "vanar/neural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace vanar::nn {

std::string to_string(Activation a) { return a == Activation::Relu ? "relu" : "linear"; }

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "linear") return Activation::Linear;
  throw Error("unknown activation '" + s + "'");
}

Mlp::Mlp(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw Error("mlp: no layers");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    if (layer.weights.rows() < 1 || layer.weights.cols() < 1) throw Error("mlp: empty layer");
    if (layer.biases.size() != layer.weights.rows()) throw Error("mlp: bias shape mismatch");
    if (l > 0 && layer.weights.cols() != layers_[l - 1].weights.rows()) {
      throw Error("mlp: layer " + std::to_string(l) + " does not chain with its predecessor");
    }
  }
}

Mlp Mlp::initialized(const std::vector<int>& dims, std::uint64_t seed) {
  if (dims.size() < 2) throw Error("mlp: need input and output dims");
  for (int d : dims) {
    if (d < 1) throw Error("mlp: layer dims must be positive");
  }
  std::mt19937_64 rng(seed);
  std::vector<Layer> layers;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Layer layer;
    layer.weights.resize(fan_out, fan_in);
    for (Eigen::Index i = 0; i < fan_out; ++i) {
      for (Eigen::Index j = 0; j < fan_in; ++j) layer.weights(i, j) = dist(rng);
    }
    layer.biases = Vector::Zero(fan_out);
    layer.activation = (l + 2 == dims.size()) ? Activation::Linear : Activation::Relu;
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

std::vector<int> Mlp::dims() const {
  std::vector<int> d;
  if (layers_.empty()) return d;
  d.push_back(static_cast<int>(layers_.front().weights.cols()));
  for (const auto& l : layers_) d.push_back(static_cast<int>(l.weights.rows()));
  return d;
}

Eigen::Index Mlp::input_dim() const { return layers_.empty() ? 0 : layers_.front().weights.cols(); }
Eigen::Index Mlp::output_dim() const { return layers_.empty() ? 0 : layers_.back().weights.rows(); }

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.biases.size());
  return n;
}

namespace {

void activate(Matrix& z, Activation a) {
  if (a == Activation::Relu) z = z.cwiseMax(0.0);
}

}  // namespace

Vector Mlp::forward(const Vector& x) const {
  if (x.size() != input_dim()) {
    throw Error("mlp: input has " + std::to_string(x.size()) + " entries, expected " +
                std::to_string(input_dim()));
  }
  Vector a = x;
  for (const auto& layer : layers_) {
    Vector z = layer.weights * a + layer.biases;
    if (layer.activation == Activation::Relu) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

Matrix Mlp::forward_batch(const Matrix& inputs) const {
  if (inputs.cols() != input_dim()) throw Error("mlp: input width mismatch");
  Matrix a = inputs.transpose();
  for (const auto& layer : layers_) {
    Matrix z = layer.weights * a;
    z.colwise() += layer.biases;
    activate(z, layer.activation);
    a = std::move(z);
  }
  return a.transpose();
}

Gradients Gradients::zeros_like(const Mlp& net) {
  Gradients g;
  for (const auto& l : net.layers()) {
    g.weights.push_back(Matrix::Zero(l.weights.rows(), l.weights.cols()));
    g.biases.push_back(Vector::Zero(l.biases.size()));
  }
  return g;
}

namespace {

// Writes into `out`, reusing its buffers when the shapes already match.
void loss_and_gradients_into(const Mlp& net, const Matrix& inputs, const Matrix& targets,
                             LossAndGradients& out) {
  if (inputs.rows() == 0) throw Error("loss: empty batch");
  if (inputs.rows() != targets.rows()) throw Error("loss: batch row mismatch");
  if (inputs.cols() != net.input_dim()) throw Error("loss: input width mismatch");
  if (targets.cols() != net.output_dim()) throw Error("loss: target width mismatch");

  const auto& layers = net.layers();
  // acts[l] is the input to layer l (columns are samples).
  std::vector<Matrix> acts;
  acts.reserve(layers.size() + 1);
  acts.push_back(inputs.transpose());
  for (const auto& layer : layers) {
    Matrix z = layer.weights * acts.back();
    z.colwise() += layer.biases;
    activate(z, layer.activation);
    acts.push_back(std::move(z));
  }

  const double count = static_cast<double>(targets.size());
  const Matrix diff = acts.back() - targets.transpose();
  out.loss = diff.squaredNorm() / count;
  if (out.grads.weights.size() != layers.size()) out.grads = Gradients::zeros_like(net);

  Matrix delta = (2.0 / count) * diff;
  for (std::size_t i = layers.size(); i-- > 0;) {
    if (layers[i].activation == Activation::Relu) {
      delta = delta.cwiseProduct((acts[i + 1].array() > 0.0).cast<double>().matrix());
    }
    out.grads.weights[i].noalias() = delta * acts[i].transpose();
    out.grads.biases[i] = delta.rowwise().sum();
    if (i > 0) delta = layers[i].weights.transpose() * delta;
  }
}

}  // namespace

LossAndGradients loss_and_gradients(const Mlp& net, const Matrix& inputs, const Matrix& targets) {
  LossAndGradients out;
  loss_and_gradients_into(net, inputs, targets, out);
  return out;
}

double mse(const Mlp& net, const Matrix& inputs, const Matrix& targets) {
  if (inputs.rows() == 0) throw Error("mse: empty batch");
  return (net.forward_batch(inputs) - targets).squaredNorm() / static_cast<double>(targets.size());
}

AdaGrad::AdaGrad(const Mlp& shape, double learning_rate, double epsilon)
    : acc_(Gradients::zeros_like(shape)), lr_(learning_rate), eps_(epsilon) {
  if (!(learning_rate > 0.0)) throw Error("adagrad: learning rate must be positive");
  if (epsilon < 0.0) throw Error("adagrad: negative epsilon");
}

void AdaGrad::step(Mlp& net, const Gradients& grads) {
  auto& layers = net.layers();
  if (grads.weights.size() != layers.size() || acc_.weights.size() != layers.size()) {
    throw Error("adagrad: parameter shape mismatch");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (grads.weights[l].rows() != layers[l].weights.rows() ||
        grads.weights[l].cols() != layers[l].weights.cols() ||
        grads.biases[l].size() != layers[l].biases.size()) {
      throw Error("adagrad: parameter shape mismatch");
    }
    acc_.weights[l].array() += grads.weights[l].array().square();
    acc_.biases[l].array() += grads.biases[l].array().square();
    layers[l].weights.array() -= lr_ * grads.weights[l].array() / (acc_.weights[l].array().sqrt() + eps_);
    layers[l].biases.array() -= lr_ * grads.biases[l].array() / (acc_.biases[l].array().sqrt() + eps_);
  }
}

Eigen::Index validation_rows(Eigen::Index rows, double fraction) {
  return static_cast<Eigen::Index>(std::floor(fraction * static_cast<double>(rows)));
}

void TrainConfig::validate(Eigen::Index rows) const {
  if (epochs < 0) throw Error("train: epochs must be nonnegative");
  if (batch_size < 1) throw Error("train: batch size must be positive");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw Error("train: validation fraction must lie in [0, 1)");
  }
  if (patience < 0) throw Error("train: patience must be nonnegative");
  if (!(learning_rate > 0.0)) throw Error("train: learning rate must be positive");
  if (rows - validation_rows(rows, validation_fraction) < 1) {
    throw Error("train: validation split leaves no training rows");
  }
}

TrainResult train(Mlp net, const Matrix& inputs, const Matrix& targets, const TrainConfig& cfg) {
  if (inputs.rows() == 0) throw Error("train: empty design");
  if (inputs.rows() != targets.rows()) throw Error("train: row mismatch");
  cfg.validate(inputs.rows());

  const Eigen::Index n_val = validation_rows(inputs.rows(), cfg.validation_fraction);
  const Eigen::Index n_train = inputs.rows() - n_val;
  const Matrix x_train = inputs.topRows(n_train);
  const Matrix y_train = targets.topRows(n_train);
  const Matrix x_val = inputs.bottomRows(n_val);
  const Matrix y_val = targets.bottomRows(n_val);

  TrainResult result;
  result.net = net;
  if (cfg.epochs == 0) return result;

  AdaGrad opt(net, cfg.learning_rate, cfg.adagrad_epsilon);
  std::mt19937_64 rng(cfg.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_train));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  const Eigen::Index batch = std::min<Eigen::Index>(cfg.batch_size, n_train);
  Matrix xb(batch, inputs.cols());
  Matrix yb(batch, targets.cols());
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;
  LossAndGradients lg;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (Eigen::Index start = 0; start < n_train; start += batch) {
      const Eigen::Index len = std::min(batch, n_train - start);
      xb.resize(len, inputs.cols());
      yb.resize(len, targets.cols());
      for (Eigen::Index r = 0; r < len; ++r) {
        xb.row(r) = x_train.row(order[static_cast<std::size_t>(start + r)]);
        yb.row(r) = y_train.row(order[static_cast<std::size_t>(start + r)]);
      }
      loss_and_gradients_into(net, xb, yb, lg);
      if (!std::isfinite(lg.loss)) throw Error("training diverged");
      loss_sum += lg.loss * static_cast<double>(len);
      opt.step(net, lg.grads);
    }
    result.train_loss.push_back(loss_sum / static_cast<double>(n_train));

    if (n_val == 0) {
      result.net = net;
      result.best_epoch = epoch;
      continue;
    }
    const double val = mse(net, x_val, y_val);
    if (!std::isfinite(val)) throw Error("training diverged");
    result.validation_loss.push_back(val);
    if (val < best_val) {
      best_val = val;
      since_best = 0;
      result.net = net;
      result.best_epoch = epoch;
    } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

}  // namespace vanar::nn
