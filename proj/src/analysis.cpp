#include "vanar/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace vanar {

double rmse(std::span<const double> pred, std::span<const double> actual) {
  if (pred.size() != actual.size()) throw Error("rmse: length mismatch");
  if (pred.empty()) throw Error("rmse: empty series");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += (pred[i] - actual[i]) * (pred[i] - actual[i]);
  return std::sqrt(sum / static_cast<double>(pred.size()));
}

double rmsse(std::span<const double> pred, std::span<const double> actual, double last_train_value) {
  if (pred.size() != actual.size()) throw Error("rmsse: length mismatch");
  if (actual.empty()) throw Error("rmsse: empty series");
  std::vector<double> naive(actual.size());
  naive[0] = last_train_value;
  for (std::size_t t = 1; t < actual.size(); ++t) naive[t] = actual[t - 1];
  const double denom = rmse(naive, actual);
  if (denom == 0.0) throw Error("constant series");
  return rmse(pred, actual) / denom;
}

ForecastFn forecaster(const VarModel& model) {
  return [model](const Dataset& history, int h) { return var_forecast(model, history, h); };
}

ForecastFn forecaster(const VanarModel& model) {
  return [model](const Dataset& history, int h) { return vanar_forecast(model, history, h); };
}

Dataset one_step_rolling(const ForecastFn& fn, const Dataset& data, Eigen::Index begin, Eigen::Index count) {
  if (begin < 1 || count < 1 || begin + count > data.rows()) throw Error("one-step: row range out of bounds");
  Matrix out(count, data.cols());
  for (Eigen::Index i = 0; i < count; ++i) {
    out.row(i) = fn(data.slice_rows(0, begin + i), 1).values().row(0);
  }
  return Dataset(data.names(), std::move(out));
}

std::string to_string(ModelFamily f) { return f == ModelFamily::Var ? "var" : "vanar"; }

ModelFamily model_family_from_string(const std::string& s) {
  if (s == "var" || s == "ar") return ModelFamily::Var;
  if (s == "vanar" || s == "ana") return ModelFamily::Vanar;
  throw Error("unknown model family '" + s + "'");
}

std::string to_string(EvalMode m) { return m == EvalMode::Recursive ? "recursive" : "one-step"; }

EvalMode eval_mode_from_string(const std::string& s) {
  if (s == "recursive") return EvalMode::Recursive;
  if (s == "one-step" || s == "onestep") return EvalMode::OneStep;
  throw Error("unknown evaluation mode '" + s + "'");
}

std::string CausalityEdge::source_label() const {
  std::string label;
  for (const auto& s : sources) label += (label.empty() ? "" : "+") + s;
  return label;
}

double causality_score_value(double full_rmse, double univariate_rmse) {
  if (!(univariate_rmse > 0.0)) throw Error("causality: univariate error is zero");
  return 1.0 - full_rmse / univariate_rmse;
}

namespace {

std::string format_key(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Vector per_variable_rmse(const Dataset& pred, const Dataset& actual) {
  Vector out(actual.cols());
  for (Eigen::Index j = 0; j < actual.cols(); ++j) {
    const Vector p = pred.values().col(j);
    const Vector a = actual.values().col(j);
    out(j) = rmse(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())),
                  std::span<const double>(a.data(), static_cast<std::size_t>(a.size())));
  }
  return out;
}

Dataset predict_test(const ForecastFn& fn, const Dataset& data, const CausalityOptions& opts) {
  const Dataset train = data.slice_rows(0, opts.train_len);
  return opts.mode == EvalMode::Recursive
             ? fn(train, static_cast<int>(opts.test_len))
             : one_step_rolling(fn, data.slice_rows(0, opts.train_len + opts.test_len), opts.train_len,
                                opts.test_len);
}

}  // namespace

std::string forecast_cache_key(const Dataset& data, const CausalityOptions& opts) {
  std::string key = to_string(opts.family) + "|" + to_string(opts.mode) + "|p=" + std::to_string(opts.p) +
                    "|train=" + std::to_string(opts.train_len) + "|test=" + std::to_string(opts.test_len) + "|vars=";
  for (const auto& n : data.names()) key += n + ",";
  if (opts.family == ModelFamily::Var) return key + "|det=" + to_string(opts.det);
  const VanarOptions& v = opts.vanar;
  key += "|seeds=";
  for (auto s : opts.seeds) key += std::to_string(s) + ",";
  key += "|hidden=";
  for (int h : v.hidden) key += std::to_string(h) + ",";
  key += "|force=" + (v.force_autoencoder ? std::to_string(*v.force_autoencoder) : std::string("auto"));
  key += "|emb=" + (v.embedding_dim ? std::to_string(*v.embedding_dim) : std::string("auto"));
  for (const nn::TrainConfig* c : {&v.head_cfg, &v.autoencoder_cfg}) {
    key += "|" + std::to_string(c->epochs) + "," + std::to_string(c->batch_size) + "," +
           std::to_string(c->patience) + "," + format_key(c->learning_rate) + "," +
           format_key(c->validation_fraction) + "," + format_key(c->adagrad_epsilon);
  }
  return key;
}

std::vector<Dataset> test_forecasts(const Dataset& data, const CausalityOptions& opts, ForecastCache* cache) {
  if (opts.test_len < 1 || opts.train_len < 1 || opts.train_len + opts.test_len > data.rows()) {
    throw Error("causality: degenerate train/test split");
  }
  std::string key;
  if (cache) {
    key = forecast_cache_key(data, opts);
    if (auto it = cache->find(key); it != cache->end()) return it->second;
  }
  const Dataset train = data.slice_rows(0, opts.train_len);
  std::vector<Dataset> runs;
  if (opts.family == ModelFamily::Var) {
    runs.push_back(predict_test(forecaster(fit_var_ols(train, opts.p, opts.det)), data, opts));
  } else {
    if (opts.seeds.empty()) throw Error("causality: no seeds for neural fits");
    for (std::uint64_t seed : opts.seeds) {
      VanarOptions vo = opts.vanar;
      vo.seed = seed;
      runs.push_back(predict_test(forecaster(fit_vanar(train, opts.p, vo)), data, opts));
    }
  }
  if (cache) cache->emplace(key, runs);
  return runs;
}

Vector test_rmse(const Dataset& data, const CausalityOptions& opts, ForecastCache* cache, Eigen::Index horizon) {
  const auto runs = test_forecasts(data, opts, cache);
  const Eigen::Index h = horizon > 0 ? horizon : opts.test_len;
  if (h > opts.test_len) throw Error("test_rmse: horizon exceeds the test length");
  const Dataset actual = data.slice_rows(opts.train_len, h);
  Vector out(data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    std::vector<double> v;
    for (const auto& r : runs) v.push_back(per_variable_rmse(r.slice_rows(0, h), actual)(j));
    out(j) = median(std::move(v));
  }
  return out;
}

namespace {

// Variables of `data` that appear in `wanted`, in dataset order.
std::vector<std::string> ordered_subset(const Dataset& data, const std::vector<std::string>& wanted) {
  std::vector<std::string> out;
  for (const auto& n : data.names()) {
    if (std::find(wanted.begin(), wanted.end(), n) != wanted.end()) out.push_back(n);
  }
  return out;
}

CausalityEdge make_edge(std::vector<std::string> sources, std::string target, double full, double uni) {
  CausalityEdge e;
  e.sources = std::move(sources);
  e.target = std::move(target);
  e.full_rmse = full;
  e.univariate_rmse = uni;
  e.score = causality_score_value(full, uni);
  return e;
}

}  // namespace

CausalityEdge causality_score(const Dataset& data, const std::vector<std::string>& causes,
                              const std::string& target, const CausalityOptions& opts, ForecastCache* cache) {
  if (causes.empty()) throw Error("causality: no cause variables");
  if (std::find(causes.begin(), causes.end(), target) != causes.end()) {
    throw Error("causality: target '" + target + "' listed among its causes");
  }
  for (const auto& c : causes) data.index_of(c);
  data.index_of(target);

  std::vector<std::string> all = causes;
  all.push_back(target);
  const Dataset full = data.select(ordered_subset(data, all));
  const double full_rmse = test_rmse(full, opts, cache)(full.index_of(target));
  const double uni_rmse = test_rmse(data.select({target}), opts, cache)(0);
  return make_edge(causes, target, full_rmse, uni_rmse);
}

std::vector<CausalityEdge> CausalityGraph::rendered() const {
  std::vector<CausalityEdge> out;
  for (const auto& e : edges) {
    if (e.causal()) out.push_back(e);
  }
  return out;
}

CausalityGraph causality_graph(const Dataset& data, const std::string& center, const CausalityOptions& opts,
                               ForecastCache* cache) {
  if (data.cols() < 2) throw Error("causality graph: need at least two variables");
  data.index_of(center);

  CausalityGraph graph;
  graph.center = center;
  ForecastCache local;
  ForecastCache* memo = cache ? cache : &local;
  auto uni = [&](const std::string& name) { return test_rmse(data.select({name}), opts, memo)(0); };

  for (const auto& other : data.names()) {
    if (other == center) continue;
    // One bivariate fit serves both directions of the pair.
    const Dataset pair = data.select(ordered_subset(data, {center, other}));
    const Vector full = test_rmse(pair, opts, memo);
    graph.edges.push_back(make_edge({other}, center, full(pair.index_of(center)), uni(center)));
    graph.edges.push_back(make_edge({center}, other, full(pair.index_of(other)), uni(other)));
  }
  return graph;
}

Dataset shocked_history(const Dataset& base, const std::string& shock_var, double epsilon) {
  Matrix values = base.values();
  values(values.rows() - 1, base.index_of(shock_var)) += epsilon;
  return Dataset(base.names(), std::move(values), base.freq(), base.dates());
}

ImpulseSet impulse_set(const ForecastFn& fn, const Dataset& base, const std::string& shock_var,
                       double epsilon, int horizon) {
  if (horizon < 1) throw Error("impulse: horizon must be positive");
  Dataset shocked = shocked_history(base, shock_var, epsilon);
  Dataset path = fn(shocked, horizon);
  return ImpulseSet{std::move(shocked), shock_var, epsilon, base.rows() - 1, horizon, std::move(path)};
}

Dataset impulse_path(const ForecastFn& fn, const Dataset& base, const std::string& shock_var,
                     double epsilon, int horizon) {
  return impulse_set(fn, base, shock_var, epsilon, horizon).path;
}

Dataset impulse_path(const VarModel& model, const Dataset& base, const std::string& shock_var,
                     double epsilon, int horizon) {
  return impulse_path(forecaster(model), base, shock_var, epsilon, horizon);
}

Dataset impulse_path(const VanarModel& model, const Dataset& base, const std::string& shock_var,
                     double epsilon, int horizon) {
  return impulse_path(forecaster(model), base, shock_var, epsilon, horizon);
}

Dataset impulse_response(const ForecastFn& fn, const Dataset& base, const std::string& shock_var,
                         double epsilon, int horizon) {
  const Dataset shocked = impulse_path(fn, base, shock_var, epsilon, horizon);
  const Dataset unshocked = impulse_path(fn, base, shock_var, 0.0, horizon);
  return Dataset(base.names(), shocked.values() - unshocked.values());
}

Dataset impulse_response(const VarModel& model, const Dataset& base, const std::string& shock_var,
                         double epsilon, int horizon) {
  return impulse_response(forecaster(model), base, shock_var, epsilon, horizon);
}

Dataset impulse_response(const VanarModel& model, const Dataset& base, const std::string& shock_var,
                         double epsilon, int horizon) {
  return impulse_response(forecaster(model), base, shock_var, epsilon, horizon);
}

}  // namespace vanar
