#include "vanar/model.hpp"

#include <algorithm>
#include <cmath>

namespace vanar {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Vector Autoencoder::encode(const Vector& lag_vector) const { return encoder.forward(lag_vector); }

Matrix Autoencoder::encode_batch(const Matrix& lag_vectors) const {
  return encoder.forward_batch(lag_vectors);
}

Vector encode_features(const Autoencoder& ae, const Vector& lag_vector) {
  if (lag_vector.size() != ae.encoder.input_dim()) {
    throw Error("encode: lag vector has " + std::to_string(lag_vector.size()) +
                " entries, encoder expects " + std::to_string(ae.encoder.input_dim()));
  }
  return ae.encode(lag_vector);
}

std::vector<int> autoencoder_hidden_widths(int input_width, int embedding_dim) {
  std::vector<int> widths;
  const double ratio = static_cast<double>(embedding_dim) / static_cast<double>(input_width);
  for (int k = 1; k <= 3; ++k) {
    const double w = static_cast<double>(input_width) * std::pow(ratio, k / 4.0);
    widths.push_back(std::max(embedding_dim, static_cast<int>(std::lround(w))));
  }
  return widths;
}

int default_embedding_dim(int p, int n_vars) { return std::max(2, (p * n_vars) / 4); }

Autoencoder fit_autoencoder(const Matrix& inputs, int embedding_dim, const nn::TrainConfig& cfg) {
  const int width = static_cast<int>(inputs.cols());
  if (embedding_dim < 1) throw Error("autoencoder: embedding dimension must be positive");
  if (embedding_dim >= width) {
    throw Error("autoencoder: embedding dimension " + std::to_string(embedding_dim) +
                " must be below the input width " + std::to_string(width));
  }
  const auto h = autoencoder_hidden_widths(width, embedding_dim);

  // Train encoder and decoder as one network whose code layer is linear.
  nn::Mlp joint = nn::Mlp::initialized({width, h[0], h[1], h[2], embedding_dim, h[2], h[1], h[0], width},
                                       derive_seed(cfg.seed, 0xAE));
  joint.layers()[3].activation = nn::Activation::Linear;
  nn::TrainResult fit = nn::train(std::move(joint), inputs, inputs, cfg);

  const auto& layers = fit.net.layers();
  Autoencoder ae;
  ae.encoder = nn::Mlp(std::vector<nn::Layer>(layers.begin(), layers.begin() + 4));
  ae.decoder = nn::Mlp(std::vector<nn::Layer>(layers.begin() + 4, layers.end()));
  ae.embedding_dim = embedding_dim;

  const Eigen::Index n_val = nn::validation_rows(inputs.rows(), cfg.validation_fraction);
  ae.reconstruction_error = n_val > 0 ? nn::mse(fit.net, inputs.bottomRows(n_val), inputs.bottomRows(n_val))
                                      : nn::mse(fit.net, inputs, inputs);
  return ae;
}

Eigen::Index VanarModel::head_input_width() const {
  return dim() * p + (activated && autoencoder ? autoencoder->embedding_dim : 0);
}

void VanarModel::check_shapes() const {
  if (p < 1) throw Error("vanar: invalid lag");
  if (names.empty()) throw Error("vanar: no variables");
  if (static_cast<Eigen::Index>(heads.size()) != dim()) throw Error("vanar: one head per variable required");
  if (activated != autoencoder.has_value()) throw Error("vanar: activation flag disagrees with autoencoder");
  if (activated && p < kMinAutoencoderLag) throw Error("vanar: autoencoder requires p >= 4");
  if (autoencoder) {
    if (autoencoder->encoder.input_dim() != dim() * p) throw Error("vanar: encoder width mismatch");
    if (autoencoder->encoder.output_dim() != autoencoder->embedding_dim) {
      throw Error("vanar: encoder output does not match embedding dimension");
    }
  }
  for (const auto& head : heads) {
    if (head.input_dim() != head_input_width()) {
      throw Error("vanar: head input width " + std::to_string(head.input_dim()) + " != expected " +
                  std::to_string(head_input_width()));
    }
    if (head.output_dim() != 1) throw Error("vanar: heads must produce one output");
  }
  if (scaler.means.size() != dim() || scaler.sds.size() != dim()) throw Error("vanar: scaler shape mismatch");
}

Vector VanarModel::head_input(const Vector& scaled_lags) const {
  if (!activated) return scaled_lags;
  Vector x(head_input_width());
  x << scaled_lags, encode_features(*autoencoder, scaled_lags);
  return x;
}

namespace {

Vector predict_scaled(const VanarModel& m, const Vector& scaled_lags) {
  const Vector x = m.head_input(scaled_lags);
  Vector out(m.dim());
  for (Eigen::Index j = 0; j < m.dim(); ++j) out(j) = m.heads[static_cast<std::size_t>(j)].forward(x)(0);
  return out;
}

struct Variant {
  std::optional<Autoencoder> autoencoder;
  std::vector<nn::Mlp> heads;
  double validation_rmse = 0.0;
};

Variant fit_variant(const LagDesign& design, bool with_autoencoder, int embedding_dim,
                    const VanarOptions& opts) {
  Variant v;
  Matrix head_inputs = design.inputs;
  const std::uint64_t variant_tag = with_autoencoder ? 1 : 0;
  if (with_autoencoder) {
    nn::TrainConfig ae_cfg = opts.autoencoder_cfg;
    ae_cfg.seed = derive_seed(opts.seed, 1000 + variant_tag);
    v.autoencoder = fit_autoencoder(design.inputs, embedding_dim, ae_cfg);
    head_inputs.resize(design.inputs.rows(), design.inputs.cols() + embedding_dim);
    head_inputs << design.inputs, v.autoencoder->encode_batch(design.inputs);
  }

  std::vector<int> dims{static_cast<int>(head_inputs.cols())};
  dims.insert(dims.end(), opts.hidden.begin(), opts.hidden.end());
  dims.push_back(1);

  const Eigen::Index n_val = nn::validation_rows(design.inputs.rows(), opts.head_cfg.validation_fraction);
  const Eigen::Index eval_rows = n_val > 0 ? n_val : design.inputs.rows();
  double rmse_sum = 0.0;
  for (Eigen::Index j = 0; j < design.targets.cols(); ++j) {
    const std::uint64_t tag = 10 * static_cast<std::uint64_t>(j) + variant_tag;
    nn::TrainConfig cfg = opts.head_cfg;
    cfg.seed = derive_seed(opts.seed, 2000 + tag);
    nn::Mlp head = nn::Mlp::initialized(dims, derive_seed(opts.seed, 3000 + tag));
    nn::TrainResult fit = nn::train(std::move(head), head_inputs, design.targets.col(j), cfg);
    rmse_sum += std::sqrt(nn::mse(fit.net, head_inputs.bottomRows(eval_rows),
                                  design.targets.col(j).tail(eval_rows)));
    v.heads.push_back(std::move(fit.net));
  }
  v.validation_rmse = rmse_sum / static_cast<double>(design.targets.cols());
  return v;
}

}  // namespace

Vector VanarModel::predict_next(const Matrix& values) const {
  if (values.rows() < p) throw Error("insufficient history");
  if (values.cols() != dim()) throw Error("vanar: variable count mismatch");
  const Matrix tail = scaler.apply(values.bottomRows(p));
  return scaler.invert_row(predict_scaled(*this, lag_vector(tail, p)));
}

VanarModel fit_vanar(const Dataset& train, int p, const VanarOptions& opts) {
  if (p <= 0) throw Error("invalid lag");
  if (opts.hidden.empty()) throw Error("vanar: at least one hidden layer required");
  const Eigen::Index usable = train.rows() - p;
  if (usable < 1) throw Error("insufficient history");
  opts.head_cfg.validate(usable);

  VanarModel model;
  model.p = p;
  model.names = train.names();
  model.scaler = fit_scaler(train);
  const LagDesign design = build_lag_design(model.scaler.apply(train.values()), p);

  const int n_vars = static_cast<int>(train.cols());
  const int embedding = opts.embedding_dim.value_or(default_embedding_dim(p, n_vars));
  const bool allowed = p >= kMinAutoencoderLag && embedding < p * n_vars;
  if (opts.force_autoencoder.value_or(false) && !allowed) {
    throw Error("vanar: autoencoder cannot be activated for p = " + std::to_string(p) +
                " with embedding dimension " + std::to_string(embedding));
  }

  const bool try_plain = !opts.force_autoencoder.value_or(false);
  const bool try_encoded = allowed && opts.force_autoencoder.value_or(true);

  std::optional<Variant> chosen;
  if (try_encoded) chosen = fit_variant(design, true, embedding, opts);
  if (try_plain) {
    Variant plain = fit_variant(design, false, embedding, opts);
    // Ties favour the activated variant.
    if (!chosen || plain.validation_rmse < chosen->validation_rmse) chosen = std::move(plain);
  }

  model.activated = chosen->autoencoder.has_value();
  model.autoencoder = std::move(chosen->autoencoder);
  model.heads = std::move(chosen->heads);
  model.validation_rmse = chosen->validation_rmse;
  model.check_shapes();
  return model;
}

VanarModel fit_ana(const Dataset& series, int p, const VanarOptions& opts) {
  if (series.cols() != 1) throw Error("ana: expected a single variable");
  return fit_vanar(series, p, opts);
}

Dataset vanar_forecast(const VanarModel& model, const Dataset& history, int h) {
  if (h < 1) throw Error("forecast: horizon must be positive");
  if (history.rows() < model.p) throw Error("insufficient history");
  if (history.names() != model.names) throw Error("forecast: history variables do not match model");
  model.check_shapes();

  Matrix scaled(model.p + h, model.dim());
  scaled.topRows(model.p) = model.scaler.apply(history.values().bottomRows(model.p));
  for (int s = 0; s < h; ++s) {
    const Vector lags = lag_vector(scaled.topRows(model.p + s), model.p);
    scaled.row(model.p + s) = predict_scaled(model, lags).transpose();
  }
  return Dataset(model.names, model.scaler.invert(scaled.bottomRows(h)));
}

}  // namespace vanar
