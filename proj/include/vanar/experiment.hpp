#ifndef VANAR_EXPERIMENT_HPP
#define VANAR_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vanar/analysis.hpp"
#include "vanar/serialize.hpp"
#include "vanar/sim.hpp"

namespace vanar::exp {

inline constexpr const char* kVersion = "0.1.0";

/// Config validation failure; `problems` lists every issue found.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct IngestOptions {
  /// Mean of consecutive 3-row blocks; a trailing partial block is dropped.
  bool quarterly = false;
  /// Natural log applied after aggregation.
  std::vector<std::string> log_columns;
  /// Keep only these variables (all when empty).
  std::vector<std::string> columns;
};

Dataset aggregate_quarterly(const Dataset& monthly);
Dataset log_transform(const Dataset& data, const std::vector<std::string>& columns);
Dataset ingest_csv(const std::filesystem::path& path, const IngestOptions& opts = {});

/// One model entry of an experiment. Types: var, ar, vanar, ana, naive,
/// mlp-baseline. Neural hyperparameters are ignored by var/ar/naive.
struct ModelSpec {
  std::string type;
  std::vector<int> hidden = {256, 256};
  int epochs = 200;
  int batch_size = 32;
  double learning_rate = 1e-2;
  int patience = 20;
  double validation_fraction = 0.1;
  int autoencoder_epochs = 200;
  double autoencoder_learning_rate = 1e-2;
  std::optional<int> embedding_dim;
  std::optional<bool> force_autoencoder;
  Deterministic det = Deterministic::None;

  bool univariate() const;
  bool neural() const;
  /// Column label used in reports (VANAR, ANA, VAR, AR, NAIVE, MLP).
  std::string label() const;
  VanarOptions vanar_options() const;
};

struct ExperimentConfig {
  /// "system1" or "csv".
  std::string system = "system1";
  std::string csv_path;
  IngestOptions csv;

  sim::ScenarioSpec scenario;
  sim::State x0{0.4, 0.2};
  int burn_in = 0;

  Eigen::Index train_len = 850;
  Eigen::Index test_len = 20;

  /// Fixed lag order; when unset, chosen by AIC on the training rows.
  std::optional<int> p;
  /// AIC search bound; when unset, min(15, train_len / 12).
  std::optional<int> p_max;
  Deterministic lag_det = Deterministic::None;

  std::vector<ModelSpec> models;
  std::vector<std::string> tasks;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::vector<int> horizons = {20, 10};

  std::string granger_center;
  std::vector<std::string> granger_families = {"vanar", "var"};
  EvalMode granger_mode = EvalMode::Recursive;

  std::string irf_shock_var = "y";
  double irf_epsilon = 0.1;
  int irf_horizon = 20;

  std::string output_dir = "out";
};

inline const std::vector<std::string> kTasks = {"forecast", "granger", "irf", "one-step"};
inline const std::vector<std::string> kModelTypes = {"var", "ar", "vanar", "ana", "naive", "mlp-baseline"};

/// Parses and validates; throws ConfigError listing every problem. A
/// manifest (object with a "config" member) is accepted and its echo used.
ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& cfg);

/// Semantic checks that need the data (CSV columns, split lengths, task
/// requirements). Empty when valid.
std::vector<std::string> validate(const ExperimentConfig& cfg, const Dataset& data);

Dataset load_data(const ExperimentConfig& cfg);
int default_p_max(Eigen::Index train_len);

std::filesystem::path preset_dir();
std::vector<std::string> preset_names();
ExperimentConfig load_preset(const std::string& name);

struct RunReport {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> task_errors;
  int lag = 0;

  int exit_code() const { return task_errors.empty() ? 0 : 1; }
};

/**
 * Runs every configured task and writes its CSVs plus `manifest.json` into
 * `out_dir` (the config's output_dir when empty). The manifest echoes the
 * config without its output location, so replaying it elsewhere produces
 * byte-identical files.
 */
RunReport run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir = {});

}  // namespace vanar::exp

#endif  // VANAR_EXPERIMENT_HPP
