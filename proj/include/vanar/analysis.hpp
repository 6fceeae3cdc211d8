#ifndef VANAR_ANALYSIS_HPP
#define VANAR_ANALYSIS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vanar/core.hpp"
#include "vanar/linvar.hpp"
#include "vanar/model.hpp"

namespace vanar {

double rmse(std::span<const double> pred, std::span<const double> actual);

/// RMSE relative to the naive last-value forecast. The naive forecast for
/// actual[0] is `last_train_value`, for actual[t] it is actual[t-1].
double rmsse(std::span<const double> pred, std::span<const double> actual, double last_train_value);

/// Recursive forecaster: (history, horizon) -> the next `horizon` rows.
using ForecastFn = std::function<Dataset(const Dataset&, int)>;

ForecastFn forecaster(const VarModel& model);
ForecastFn forecaster(const VanarModel& model);

/// Rolling one-step predictions for rows begin .. begin+count-1 of `data`,
/// each conditioned on the actual rows before it.
Dataset one_step_rolling(const ForecastFn& fn, const Dataset& data, Eigen::Index begin, Eigen::Index count);

enum class ModelFamily { Var, Vanar };
std::string to_string(ModelFamily f);
ModelFamily model_family_from_string(const std::string& s);

/// How test-set error is measured when scoring causality.
enum class EvalMode { Recursive, OneStep };
std::string to_string(EvalMode m);
EvalMode eval_mode_from_string(const std::string& s);

struct CausalityOptions {
  ModelFamily family = ModelFamily::Vanar;
  int p = 1;
  Eigen::Index train_len = 0;
  Eigen::Index test_len = 20;
  EvalMode mode = EvalMode::Recursive;
  /// Neural fits run once per seed; RMSEs are aggregated by median.
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  Deterministic det = Deterministic::None;
  VanarOptions vanar;
};

/**
 * @brief Directed, forecast-based causality evidence.
 *
 * score = 1 - full_rmse / univariate_rmse; the sources are causal iff
 * score > 0. With more than one source this is the joint (n-1) form.
 */
struct CausalityEdge {
  std::vector<std::string> sources;
  std::string target;
  double score = 0.0;
  double full_rmse = 0.0;
  double univariate_rmse = 0.0;

  bool causal() const { return score > 0.0; }
  std::string source_label() const;
};

double causality_score_value(double full_rmse, double univariate_rmse);

/// Test-set predictions keyed by `forecast_cache_key`. A cache must only be
/// shared between calls on the same underlying dataset.
using ForecastCache = std::map<std::string, std::vector<Dataset>>;

std::string forecast_cache_key(const Dataset& data, const CausalityOptions& opts);

/// Predicted test rows of `data` for a model of `opts.family` fitted on the
/// first train_len rows: one entry per seed (a single entry for VAR).
std::vector<Dataset> test_forecasts(const Dataset& data, const CausalityOptions& opts,
                                    ForecastCache* cache = nullptr);

/// Test-set RMSE per variable over the first `horizon` test rows (all when
/// 0), median over seeds.
Vector test_rmse(const Dataset& data, const CausalityOptions& opts, ForecastCache* cache = nullptr,
                 Eigen::Index horizon = 0);

CausalityEdge causality_score(const Dataset& data, const std::vector<std::string>& causes,
                              const std::string& target, const CausalityOptions& opts,
                              ForecastCache* cache = nullptr);

/// Star of pairwise edges between `center` and every other variable, both
/// directions. `rendered()` keeps positive-score edges only.
struct CausalityGraph {
  std::string center;
  std::vector<CausalityEdge> edges;

  std::vector<CausalityEdge> rendered() const;
};

CausalityGraph causality_graph(const Dataset& data, const std::string& center, const CausalityOptions& opts,
                               ForecastCache* cache = nullptr);

/**
 * @brief History with a one-time additive shock and its recursive extension.
 *
 * `base` equals the original history except entry (shock_time, shock_var),
 * which carries the added epsilon. `path` holds the model's predicted rows
 * after the shock.
 */
struct ImpulseSet {
  Dataset base;
  std::string shock_var;
  double epsilon = 0.0;
  Eigen::Index shock_time = 0;
  int horizon = 0;
  Dataset path;
};

/// Shocked history with the shock applied to the final row.
Dataset shocked_history(const Dataset& base, const std::string& shock_var, double epsilon);

ImpulseSet impulse_set(const ForecastFn& fn, const Dataset& base, const std::string& shock_var,
                       double epsilon, int horizon);

Dataset impulse_path(const ForecastFn& fn, const Dataset& base, const std::string& shock_var,
                     double epsilon, int horizon);
Dataset impulse_path(const VarModel& model, const Dataset& base, const std::string& shock_var,
                     double epsilon, int horizon);
Dataset impulse_path(const VanarModel& model, const Dataset& base, const std::string& shock_var,
                     double epsilon, int horizon);

Dataset impulse_response(const ForecastFn& fn, const Dataset& base, const std::string& shock_var,
                         double epsilon, int horizon);
Dataset impulse_response(const VarModel& model, const Dataset& base, const std::string& shock_var,
                         double epsilon, int horizon);
Dataset impulse_response(const VanarModel& model, const Dataset& base, const std::string& shock_var,
                         double epsilon, int horizon);

}  // namespace vanar

#endif  // VANAR_ANALYSIS_HPP
