#ifndef VANAR_MODEL_HPP
#define VANAR_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vanar/core.hpp"
#include "vanar/neural.hpp"

namespace vanar {

/**
 * @brief Lag-vector autoencoder.
 *
 * The encoder maps a scaled lag vector (width p * N) through three ReLU
 * layers to a linear code of `embedding_dim` features; the decoder mirrors
 * it back to the input width.
 */
struct Autoencoder {
  nn::Mlp encoder;
  nn::Mlp decoder;
  int embedding_dim = 0;
  /// Validation reconstruction MSE (training MSE when no rows are held out).
  double reconstruction_error = 0.0;

  Vector encode(const Vector& lag_vector) const;
  Matrix encode_batch(const Matrix& lag_vectors) const;
};

/// Funnel widths for the three hidden layers, interpolated geometrically
/// from `input_width` down to `embedding_dim`.
std::vector<int> autoencoder_hidden_widths(int input_width, int embedding_dim);

Autoencoder fit_autoencoder(const Matrix& inputs, int embedding_dim, const nn::TrainConfig& cfg);

/// Deterministic encoder pass; same as `ae.encode`.
Vector encode_features(const Autoencoder& ae, const Vector& lag_vector);

/// max(2, floor(p * N / 4)).
int default_embedding_dim(int p, int n_vars);

/// Smallest lag order at which the autoencoder is considered at all.
inline constexpr int kMinAutoencoderLag = 4;

struct VanarOptions {
  /// Unset: decide by validation one-step RMSE (only when p >= 4).
  std::optional<bool> force_autoencoder;
  std::optional<int> embedding_dim;
  std::vector<int> hidden = {256, 256};
  nn::TrainConfig head_cfg;
  nn::TrainConfig autoencoder_cfg{.epochs = 200, .batch_size = 32, .seed = 0,
                                  .validation_fraction = 0.1, .patience = 20,
                                  .learning_rate = 1e-4, .adagrad_epsilon = 1e-8};
  /// Base seed; every network derives its own stream from it.
  std::uint64_t seed = 0;
};

/**
 * @brief Vector autoencoder nonlinear autoregression.
 *
 * One MLP head per variable maps the scaled lag vector, optionally
 * concatenated with autoencoder features, to that variable's next scaled
 * value. A single-variable model is the univariate (ANA) form.
 */
struct VanarModel {
  int p = 0;
  std::vector<std::string> names;
  std::optional<Autoencoder> autoencoder;
  std::vector<nn::Mlp> heads;
  Scaler scaler;
  bool activated = false;
  /// Mean over variables of the validation one-step RMSE in scaled units.
  double validation_rmse = 0.0;

  Eigen::Index dim() const { return static_cast<Eigen::Index>(names.size()); }
  Eigen::Index head_input_width() const;
  /// Throws if heads, autoencoder, and scaler disagree on shapes.
  void check_shapes() const;

  /// Head inputs for one scaled lag vector.
  Vector head_input(const Vector& scaled_lags) const;
  /// Next row (original units) following `values` (original units).
  Vector predict_next(const Matrix& values) const;
};

VanarModel fit_vanar(const Dataset& train, int p, const VanarOptions& opts);

/// Univariate form; `series` must hold exactly one variable.
VanarModel fit_ana(const Dataset& series, int p, const VanarOptions& opts);

Dataset vanar_forecast(const VanarModel& model, const Dataset& history, int h);

/// Derives an independent 64-bit seed from a base seed and a tag.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);

}  // namespace vanar

#endif  // VANAR_MODEL_HPP
