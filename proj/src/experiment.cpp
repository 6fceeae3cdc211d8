#include "vanar/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

namespace vanar::exp {

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error("invalid config:\n  - " + join(problems, "\n  - ")), problems_(std::move(problems)) {}

// ---------------------------------------------------------------------------
// CSV ingestion

Dataset aggregate_quarterly(const Dataset& monthly) {
  const Eigen::Index quarters = monthly.rows() / 3;
  if (quarters < 1) throw Error("empty dataset");
  Matrix values(quarters, monthly.cols());
  std::vector<std::string> dates;
  for (Eigen::Index q = 0; q < quarters; ++q) {
    values.row(q) = monthly.values().middleRows(3 * q, 3).colwise().mean();
    if (!monthly.dates().empty()) dates.push_back(monthly.dates()[static_cast<std::size_t>(3 * q)]);
  }
  return Dataset(monthly.names(), std::move(values), std::string("quarterly"), std::move(dates));
}

Dataset log_transform(const Dataset& data, const std::vector<std::string>& columns) {
  Matrix values = data.values();
  for (const auto& name : columns) {
    const Eigen::Index j = data.index_of(name);
    for (Eigen::Index t = 0; t < values.rows(); ++t) {
      if (!(values(t, j) > 0.0)) {
        throw Error("log of non-positive value in column '" + name + "' at data row " + std::to_string(t + 1));
      }
      values(t, j) = std::log(values(t, j));
    }
  }
  return Dataset(data.names(), std::move(values), data.freq(), data.dates());
}

Dataset ingest_csv(const std::filesystem::path& path, const IngestOptions& opts) {
  Dataset data = read_csv(path);
  if (!opts.columns.empty()) data = data.select(opts.columns);
  if (opts.quarterly) data = aggregate_quarterly(data);
  if (!opts.log_columns.empty()) data = log_transform(data, opts.log_columns);
  return data;
}

// ---------------------------------------------------------------------------
// Model specs

bool ModelSpec::univariate() const {
  return type == "ar" || type == "ana" || type == "naive" || type == "mlp-baseline";
}

bool ModelSpec::neural() const { return type == "vanar" || type == "ana" || type == "mlp-baseline"; }

std::string ModelSpec::label() const {
  if (type == "mlp-baseline") return "MLP";
  std::string out = type;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

VanarOptions ModelSpec::vanar_options() const {
  VanarOptions o;
  o.hidden = hidden;
  o.embedding_dim = embedding_dim;
  o.force_autoencoder = type == "mlp-baseline" ? std::optional<bool>(false) : force_autoencoder;
  o.head_cfg.epochs = epochs;
  o.head_cfg.batch_size = batch_size;
  o.head_cfg.learning_rate = learning_rate;
  o.head_cfg.patience = patience;
  o.head_cfg.validation_fraction = validation_fraction;
  o.autoencoder_cfg = o.head_cfg;
  o.autoencoder_cfg.epochs = autoencoder_epochs;
  o.autoencoder_cfg.learning_rate = autoencoder_learning_rate;
  return o;
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

// Collects every problem instead of stopping at the first one.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

  template <typename T>
  void read(const Json& obj, const char* key, const std::string& path, T& out) {
    if (!obj.contains(key) || obj.at(key).is_null()) return;
    try {
      out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      problems_.push_back(path + "." + key + ": wrong type");
    }
  }

  template <typename T>
  void read_optional(const Json& obj, const char* key, const std::string& path, std::optional<T>& out) {
    if (!obj.contains(key) || obj.at(key).is_null()) return;
    T v{};
    read(obj, key, path, v);
    out = v;
  }

  void known_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) {
      problems_.push_back(path + ": expected an object");
      return;
    }
    for (const auto& [k, v] : obj.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* key) { return k == key; })) {
        problems_.push_back(path + ": unknown key '" + k + "'");
      }
    }
  }

  void problem(std::string msg) { problems_.push_back(std::move(msg)); }

 private:
  std::vector<std::string>& problems_;
};

ModelSpec parse_model(const Json& j, const std::string& path, Reader& r) {
  ModelSpec m;
  r.known_keys(j, path, {"type", "hidden", "epochs", "batch_size", "learning_rate", "patience",
                         "validation_fraction", "autoencoder_epochs", "autoencoder_learning_rate",
                         "embedding_dim", "force_autoencoder", "det"});
  if (!j.is_object()) return m;
  r.read(j, "type", path, m.type);
  if (!contains(kModelTypes, m.type)) {
    r.problem(path + ".type: '" + m.type + "' is not one of " + join(kModelTypes, ", "));
  }
  r.read(j, "hidden", path, m.hidden);
  r.read(j, "epochs", path, m.epochs);
  r.read(j, "batch_size", path, m.batch_size);
  r.read(j, "learning_rate", path, m.learning_rate);
  r.read(j, "patience", path, m.patience);
  r.read(j, "validation_fraction", path, m.validation_fraction);
  r.read(j, "autoencoder_epochs", path, m.autoencoder_epochs);
  r.read(j, "autoencoder_learning_rate", path, m.autoencoder_learning_rate);
  r.read_optional(j, "embedding_dim", path, m.embedding_dim);
  r.read_optional(j, "force_autoencoder", path, m.force_autoencoder);
  std::string det = to_string(m.det);
  r.read(j, "det", path, det);
  try {
    m.det = deterministic_from_string(det);
  } catch (const Error& e) {
    r.problem(path + ".det: " + e.what());
  }

  if (m.neural()) {
    if (m.hidden.empty() || std::any_of(m.hidden.begin(), m.hidden.end(), [](int h) { return h < 1; })) {
      r.problem(path + ".hidden: needs at least one positive width");
    }
    if (m.epochs < 0 || m.autoencoder_epochs < 0) r.problem(path + ": epochs must be nonnegative");
    if (m.batch_size < 1) r.problem(path + ".batch_size: must be positive");
    if (!(m.learning_rate > 0.0) || !(m.autoencoder_learning_rate > 0.0)) {
      r.problem(path + ": learning rates must be positive");
    }
    if (m.patience < 0) r.problem(path + ".patience: must be nonnegative");
    if (!(m.validation_fraction >= 0.0 && m.validation_fraction < 1.0)) {
      r.problem(path + ".validation_fraction: must lie in [0, 1)");
    }
    if (m.embedding_dim && *m.embedding_dim < 1) r.problem(path + ".embedding_dim: must be positive");
  }
  return m;
}

}  // namespace

ExperimentConfig config_from_json(const Json& input) {
  const Json& j = input.is_object() && input.contains("config") ? input.at("config") : input;
  std::vector<std::string> problems;
  Reader r(problems);
  ExperimentConfig cfg;
  r.known_keys(j, "config", {"system", "csv", "scenario", "environment", "lag", "models", "tasks", "seeds",
                             "horizons", "granger", "irf", "output_dir"});
  if (!j.is_object()) throw ConfigError(problems);

  r.read(j, "system", "config", cfg.system);
  if (cfg.system != "system1" && cfg.system != "csv") r.problem("config.system: must be 'system1' or 'csv'");

  if (j.contains("csv")) {
    const Json& c = j.at("csv");
    r.known_keys(c, "csv", {"path", "quarterly", "log_columns", "columns"});
    if (c.is_object()) {
      r.read(c, "path", "csv", cfg.csv_path);
      r.read(c, "quarterly", "csv", cfg.csv.quarterly);
      r.read(c, "log_columns", "csv", cfg.csv.log_columns);
      r.read(c, "columns", "csv", cfg.csv.columns);
    }
  }
  if (cfg.system == "csv" && cfg.csv_path.empty()) r.problem("csv.path: required when system is 'csv'");

  if (j.contains("scenario")) {
    const Json& s = j.at("scenario");
    r.known_keys(s, "scenario", {"kind", "noise_sd", "seed", "x0", "burn_in"});
    if (s.is_object()) {
      std::string kind = "default";
      r.read(s, "kind", "scenario", kind);
      std::uint64_t seed = 0;
      r.read(s, "seed", "scenario", seed);
      try {
        cfg.scenario = sim::ScenarioSpec::make(sim::scenario_from_string(kind), seed);
      } catch (const Error& e) {
        r.problem(std::string("scenario.kind: ") + e.what());
      }
      std::optional<double> noise;
      r.read_optional(s, "noise_sd", "scenario", noise);
      if (noise && *noise != cfg.scenario.noise_sd) {
        r.problem("scenario.noise_sd: " + format_double(*noise) + " does not match scenario '" + kind +
                  "' (" + format_double(cfg.scenario.noise_sd) + ")");
      }
      std::vector<double> x0{cfg.x0[0], cfg.x0[1]};
      r.read(s, "x0", "scenario", x0);
      if (x0.size() != 2 || !(x0[0] >= 0.0 && x0[0] <= 1.0 && x0[1] >= 0.0 && x0[1] <= 1.0)) {
        r.problem("scenario.x0: need two values in [0, 1]");
      } else {
        cfg.x0 = {x0[0], x0[1]};
      }
      r.read(s, "burn_in", "scenario", cfg.burn_in);
      if (cfg.burn_in < 0) r.problem("scenario.burn_in: must be nonnegative");
    }
  }

  if (j.contains("environment")) {
    const Json& e = j.at("environment");
    r.known_keys(e, "environment", {"train_len", "test_len"});
    if (e.is_object()) {
      r.read(e, "train_len", "environment", cfg.train_len);
      r.read(e, "test_len", "environment", cfg.test_len);
    }
  }
  if (cfg.train_len < 2) r.problem("environment.train_len: must be at least 2");
  if (cfg.test_len < 1) r.problem("environment.test_len: must be positive");

  if (j.contains("lag")) {
    const Json& l = j.at("lag");
    r.known_keys(l, "lag", {"p", "p_max", "det"});
    if (l.is_object()) {
      r.read_optional(l, "p", "lag", cfg.p);
      r.read_optional(l, "p_max", "lag", cfg.p_max);
      std::string det = "none";
      r.read(l, "det", "lag", det);
      try {
        cfg.lag_det = deterministic_from_string(det);
      } catch (const Error& e) {
        r.problem(std::string("lag.det: ") + e.what());
      }
    }
  }
  if (cfg.p && (*cfg.p < 1 || *cfg.p >= cfg.train_len)) r.problem("lag.p: must lie in [1, train_len)");
  if (cfg.p_max && (*cfg.p_max < 1 || 2 * *cfg.p_max >= cfg.train_len)) {
    r.problem("lag.p_max: must lie in [1, train_len / 2)");
  }

  if (j.contains("models")) {
    if (!j.at("models").is_array()) {
      r.problem("config.models: expected an array");
    } else {
      for (std::size_t i = 0; i < j.at("models").size(); ++i) {
        cfg.models.push_back(parse_model(j.at("models")[i], "models[" + std::to_string(i) + "]", r));
      }
    }
  }

  r.read(j, "tasks", "config", cfg.tasks);
  for (const auto& t : cfg.tasks) {
    if (!contains(kTasks, t)) r.problem("config.tasks: unknown task '" + t + "' (expected " + join(kTasks, ", ") + ")");
  }
  r.read(j, "seeds", "config", cfg.seeds);
  if (cfg.seeds.empty()) r.problem("config.seeds: at least one seed required");
  r.read(j, "horizons", "config", cfg.horizons);
  for (int h : cfg.horizons) {
    if (h < 1 || h > cfg.test_len) {
      r.problem("config.horizons: " + std::to_string(h) + " outside [1, test_len]");
    }
  }

  if (j.contains("granger")) {
    const Json& g = j.at("granger");
    r.known_keys(g, "granger", {"center", "families", "mode"});
    if (g.is_object()) {
      r.read(g, "center", "granger", cfg.granger_center);
      r.read(g, "families", "granger", cfg.granger_families);
      for (const auto& f : cfg.granger_families) {
        if (f != "var" && f != "vanar") r.problem("granger.families: unknown family '" + f + "'");
      }
      std::string mode = to_string(cfg.granger_mode);
      r.read(g, "mode", "granger", mode);
      try {
        cfg.granger_mode = eval_mode_from_string(mode);
      } catch (const Error& e) {
        r.problem(std::string("granger.mode: ") + e.what());
      }
    }
  }

  if (j.contains("irf")) {
    const Json& i = j.at("irf");
    r.known_keys(i, "irf", {"shock_var", "epsilon", "horizon"});
    if (i.is_object()) {
      r.read(i, "shock_var", "irf", cfg.irf_shock_var);
      r.read(i, "epsilon", "irf", cfg.irf_epsilon);
      r.read(i, "horizon", "irf", cfg.irf_horizon);
    }
  }
  if (cfg.irf_horizon < 1) r.problem("irf.horizon: must be positive");

  r.read(j, "output_dir", "config", cfg.output_dir);

  const bool needs_models = std::any_of(cfg.tasks.begin(), cfg.tasks.end(), [](const std::string& t) {
    return t == "forecast" || t == "irf" || t == "one-step";
  });
  if (needs_models && cfg.models.empty()) r.problem("config.models: tasks require at least one model");
  if (contains(cfg.tasks, "irf") &&
      std::none_of(cfg.models.begin(), cfg.models.end(), [](const ModelSpec& m) { return !m.univariate(); })) {
    r.problem("irf: requires a multivariate model (var or vanar)");
  }
  if (contains(cfg.tasks, "one-step") &&
      std::none_of(cfg.models.begin(), cfg.models.end(), [](const ModelSpec& m) { return m.univariate(); })) {
    r.problem("one-step: requires a univariate model (ar, ana, naive, mlp-baseline)");
  }

  if (!problems.empty()) throw ConfigError(problems);
  return cfg;
}

namespace {

Json model_to_json(const ModelSpec& m) {
  Json j;
  j["type"] = m.type;
  j["hidden"] = m.hidden;
  j["epochs"] = m.epochs;
  j["batch_size"] = m.batch_size;
  j["learning_rate"] = m.learning_rate;
  j["patience"] = m.patience;
  j["validation_fraction"] = m.validation_fraction;
  j["autoencoder_epochs"] = m.autoencoder_epochs;
  j["autoencoder_learning_rate"] = m.autoencoder_learning_rate;
  j["embedding_dim"] = m.embedding_dim ? Json(*m.embedding_dim) : Json(nullptr);
  j["force_autoencoder"] = m.force_autoencoder ? Json(*m.force_autoencoder) : Json(nullptr);
  j["det"] = to_string(m.det);
  return j;
}

}  // namespace

Json to_json(const ExperimentConfig& cfg) {
  Json j;
  j["system"] = cfg.system;
  if (cfg.system == "csv") {
    j["csv"] = {{"path", cfg.csv_path},
                {"quarterly", cfg.csv.quarterly},
                {"log_columns", cfg.csv.log_columns},
                {"columns", cfg.csv.columns}};
  }
  j["scenario"] = {{"kind", sim::to_string(cfg.scenario.kind)},
                   {"noise_sd", cfg.scenario.noise_sd},
                   {"seed", cfg.scenario.seed},
                   {"x0", {cfg.x0[0], cfg.x0[1]}},
                   {"burn_in", cfg.burn_in}};
  j["environment"] = {{"train_len", cfg.train_len}, {"test_len", cfg.test_len}};
  j["lag"] = {{"p", cfg.p ? Json(*cfg.p) : Json(nullptr)},
              {"p_max", cfg.p_max ? Json(*cfg.p_max) : Json(nullptr)},
              {"det", to_string(cfg.lag_det)}};
  Json models = Json::array();
  for (const auto& m : cfg.models) models.push_back(model_to_json(m));
  j["models"] = std::move(models);
  j["tasks"] = cfg.tasks;
  j["seeds"] = cfg.seeds;
  j["horizons"] = cfg.horizons;
  j["granger"] = {{"center", cfg.granger_center},
                  {"families", cfg.granger_families},
                  {"mode", to_string(cfg.granger_mode)}};
  j["irf"] = {{"shock_var", cfg.irf_shock_var}, {"epsilon", cfg.irf_epsilon}, {"horizon", cfg.irf_horizon}};
  j["output_dir"] = cfg.output_dir;
  return j;
}

int default_p_max(Eigen::Index train_len) {
  return static_cast<int>(std::clamp<Eigen::Index>(train_len / 12, 1, 15));
}

Dataset load_data(const ExperimentConfig& cfg) {
  if (cfg.system == "csv") return ingest_csv(cfg.csv_path, cfg.csv);
  const int steps = static_cast<int>(cfg.train_len + cfg.test_len) - 1;
  return sim::simulate_scenario(cfg.scenario, cfg.x0, steps, cfg.burn_in);
}

std::vector<std::string> validate(const ExperimentConfig& cfg, const Dataset& data) {
  std::vector<std::string> problems;
  if (cfg.train_len + cfg.test_len > data.rows()) {
    problems.push_back("environment: train_len + test_len = " + std::to_string(cfg.train_len + cfg.test_len) +
                       " exceeds the " + std::to_string(data.rows()) + " available rows");
  }
  if (contains(cfg.tasks, "granger")) {
    if (data.cols() < 2) problems.push_back("granger: needs at least two variables");
    if (!cfg.granger_center.empty() && !data.has(cfg.granger_center)) {
      problems.push_back("granger.center: unknown variable '" + cfg.granger_center + "'");
    }
  }
  if (contains(cfg.tasks, "irf") && !data.has(cfg.irf_shock_var)) {
    problems.push_back("irf.shock_var: unknown variable '" + cfg.irf_shock_var + "'");
  }
  if (cfg.p && *cfg.p >= cfg.train_len) problems.push_back("lag.p: exceeds the training length");
  return problems;
}

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("VANAR_PRESET_DIR"); env && *env) return env;
  return VANAR_PRESET_DIR;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(preset_dir())) {
    if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

ExperimentConfig load_preset(const std::string& name) {
  const auto path = preset_dir() / (name + ".json");
  if (!std::filesystem::exists(path)) {
    throw Error("unknown preset '" + name + "' (available: " + join(preset_names(), ", ") + ")");
  }
  return config_from_json(read_json(path));
}

// ---------------------------------------------------------------------------
// Running

namespace {

struct Context {
  const ExperimentConfig& cfg;
  const Dataset& data;
  int p;
  ForecastCache cache;
  std::filesystem::path out;
  RunReport& report;

  void write(const std::string& name, const std::string& text) {
    write_text_atomic(out / name, text);
    report.files.push_back(name);
  }
};

CausalityOptions options_for(const Context& ctx, const ModelSpec& m, EvalMode mode) {
  CausalityOptions o;
  o.family = (m.type == "var" || m.type == "ar") ? ModelFamily::Var : ModelFamily::Vanar;
  o.p = ctx.p;
  o.train_len = ctx.cfg.train_len;
  o.test_len = ctx.cfg.test_len;
  o.mode = mode;
  o.seeds = ctx.cfg.seeds;
  o.det = m.det;
  o.vanar = m.vanar_options();
  return o;
}

// Test RMSE of variable `var` for model `m` over the first h test rows.
double model_rmse(Context& ctx, const ModelSpec& m, const std::string& var, Eigen::Index h, EvalMode mode) {
  const Dataset actual = ctx.data.slice_rows(ctx.cfg.train_len, h);
  const Vector truth = actual.column(var);
  if (m.type == "naive") {
    Vector pred(h);
    if (mode == EvalMode::Recursive) {
      pred.setConstant(ctx.data.values()(ctx.cfg.train_len - 1, ctx.data.index_of(var)));
    } else {
      pred = ctx.data.column(var).segment(ctx.cfg.train_len - 1, h);
    }
    return rmse(std::span<const double>(pred.data(), static_cast<std::size_t>(h)),
                std::span<const double>(truth.data(), static_cast<std::size_t>(h)));
  }
  const CausalityOptions o = options_for(ctx, m, mode);
  if (m.univariate()) return test_rmse(ctx.data.select({var}), o, &ctx.cache, h)(0);
  return test_rmse(ctx.data, o, &ctx.cache, h)(ctx.data.index_of(var));
}

std::vector<std::string> unique_labels(const std::vector<ModelSpec>& models) {
  std::vector<std::string> labels;
  for (const auto& m : models) {
    std::string label = m.label();
    int n = 2;
    while (contains(labels, label)) label = m.label() + "_" + std::to_string(n++);
    labels.push_back(label);
  }
  return labels;
}

void forecast_task(Context& ctx) {
  const auto labels = unique_labels(ctx.cfg.models);
  for (const auto& var : ctx.data.names()) {
    std::string csv = "horizon," + join(labels, ",") + "\n";
    for (int h : ctx.cfg.horizons) {
      csv += std::to_string(h);
      for (const auto& m : ctx.cfg.models) csv += "," + format_double(model_rmse(ctx, m, var, h, EvalMode::Recursive));
      csv += "\n";
    }
    ctx.write("forecast_" + var + ".csv", csv);
  }
}

const ModelSpec* find_model(const ExperimentConfig& cfg, std::initializer_list<const char*> types) {
  for (const char* t : types) {
    for (const auto& m : cfg.models) {
      if (m.type == t) return &m;
    }
  }
  return nullptr;
}

std::string edges_csv(const std::vector<CausalityEdge>& edges) {
  std::string csv = "source,target,score,full_rmse,uni_rmse\n";
  for (const auto& e : edges) {
    csv += e.source_label() + "," + e.target + "," + format_double(e.score) + "," + format_double(e.full_rmse) +
           "," + format_double(e.univariate_rmse) + "\n";
  }
  return csv;
}

void granger_task(Context& ctx) {
  const std::string center = ctx.cfg.granger_center.empty() ? ctx.data.names().front() : ctx.cfg.granger_center;
  for (const auto& family : ctx.cfg.granger_families) {
    ModelSpec fallback;
    fallback.type = family;
    const ModelSpec* spec = family == "var" ? find_model(ctx.cfg, {"var", "ar"})
                                            : find_model(ctx.cfg, {"vanar", "ana", "mlp-baseline"});
    ModelSpec m = spec ? *spec : fallback;
    m.type = family;
    const CausalityGraph graph = causality_graph(ctx.data, center, options_for(ctx, m, ctx.cfg.granger_mode), &ctx.cache);
    ctx.write("granger_" + family + ".csv", edges_csv(graph.edges));
    ctx.write("granger_" + family + "_graph.csv", edges_csv(graph.rendered()));
  }
}

std::string irf_csv(const Dataset& shocked, const Dataset& unshocked) {
  std::string csv = "step";
  for (const auto& v : shocked.names()) csv += ",shocked_" + v + ",unshocked_" + v + ",response_" + v;
  csv += "\n";
  for (Eigen::Index t = 0; t < shocked.rows(); ++t) {
    csv += std::to_string(t + 1);
    for (Eigen::Index j = 0; j < shocked.cols(); ++j) {
      const double a = shocked.values()(t, j);
      const double b = unshocked.values()(t, j);
      csv += "," + format_double(a) + "," + format_double(b) + "," + format_double(a - b);
    }
    csv += "\n";
  }
  return csv;
}

void irf_task(Context& ctx) {
  const Dataset train = ctx.data.slice_rows(0, ctx.cfg.train_len);
  const auto labels = unique_labels(ctx.cfg.models);
  for (std::size_t i = 0; i < ctx.cfg.models.size(); ++i) {
    const ModelSpec& m = ctx.cfg.models[i];
    if (m.univariate()) continue;
    ForecastFn fn;
    if (m.type == "var") {
      fn = forecaster(fit_var_ols(train, ctx.p, m.det));
    } else {
      VanarOptions o = m.vanar_options();
      o.seed = ctx.cfg.seeds.front();
      fn = forecaster(fit_vanar(train, ctx.p, o));
    }
    const Dataset shocked = impulse_path(fn, train, ctx.cfg.irf_shock_var, ctx.cfg.irf_epsilon, ctx.cfg.irf_horizon);
    const Dataset base = impulse_path(fn, train, ctx.cfg.irf_shock_var, 0.0, ctx.cfg.irf_horizon);
    std::string name = labels[i];
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
    ctx.write("irf_" + name + ".csv", irf_csv(shocked, base));
  }
  if (ctx.cfg.system == "system1") {
    // Noise is observational, so the true system evolves from the latent states.
    const auto params = ctx.cfg.scenario.params();
    const Dataset latent =
        sim::simulate_system1(params, ctx.cfg.x0, static_cast<int>(ctx.cfg.train_len) - 1, ctx.cfg.burn_in);
    const Dataset shocked =
        sim::true_impulse_path(params, latent, ctx.cfg.irf_shock_var, ctx.cfg.irf_epsilon, ctx.cfg.irf_horizon);
    const Dataset base = sim::true_impulse_path(params, latent, ctx.cfg.irf_shock_var, 0.0, ctx.cfg.irf_horizon);
    ctx.write("irf_true.csv", irf_csv(shocked, base));
  }
}

void one_step_task(Context& ctx) {
  const auto labels = unique_labels(ctx.cfg.models);
  std::string csv = "variable,model,rmse,rmsse\n";
  for (const auto& var : ctx.data.names()) {
    ModelSpec naive;
    naive.type = "naive";
    const double naive_rmse = model_rmse(ctx, naive, var, ctx.cfg.test_len, EvalMode::OneStep);
    for (std::size_t i = 0; i < ctx.cfg.models.size(); ++i) {
      const ModelSpec& m = ctx.cfg.models[i];
      if (!m.univariate()) continue;
      const double e = model_rmse(ctx, m, var, ctx.cfg.test_len, EvalMode::OneStep);
      const std::string rmsse_text = naive_rmse > 0.0 ? format_double(e / naive_rmse) : std::string("nan");
      csv += var + "," + labels[i] + "," + format_double(e) + "," + rmsse_text + "\n";
    }
  }
  ctx.write("one_step.csv", csv);
}

}  // namespace

RunReport run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  RunReport report;
  Dataset data = [&] {
    try {
      return load_data(cfg);
    } catch (const Error& e) {
      throw ConfigError({std::string("data: ") + e.what()});
    }
  }();
  if (auto problems = validate(cfg, data); !problems.empty()) throw ConfigError(std::move(problems));

  const std::filesystem::path out = out_dir.empty() ? std::filesystem::path(cfg.output_dir) : out_dir;
  std::filesystem::create_directories(out);

  Json manifest;
  manifest["tool"] = "vanar";
  manifest["version"] = kVersion;
  Json echo = to_json(cfg);
  echo.erase("output_dir");
  manifest["config"] = echo;
  manifest["seeds"] = cfg.seeds;

  if (!cfg.tasks.empty()) {
    const Dataset train = data.slice_rows(0, cfg.train_len);
    report.lag = cfg.p ? *cfg.p : select_lag_aic(train, cfg.p_max.value_or(default_p_max(cfg.train_len)), cfg.lag_det);
    manifest["lag"] = report.lag;

    Context ctx{cfg, data, report.lag, {}, out, report};
    for (const auto& task : cfg.tasks) {
      try {
        if (task == "forecast") forecast_task(ctx);
        if (task == "granger") granger_task(ctx);
        if (task == "irf") irf_task(ctx);
        if (task == "one-step") one_step_task(ctx);
      } catch (const Error& e) {
        report.task_errors.push_back(task + ": " + e.what());
      }
    }
  } else {
    manifest["lag"] = nullptr;
  }

  Json files = Json::array();
  for (const auto& f : report.files) files.push_back(f.string());
  manifest["files"] = std::move(files);
  manifest["task_errors"] = report.task_errors;
  write_json(out / "manifest.json", manifest);
  report.files.push_back("manifest.json");
  return report;
}

}  // namespace vanar::exp
