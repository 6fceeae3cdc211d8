#include <CLI11.hpp>

#include <iostream>

#include "vanar/experiment.hpp"

using namespace vanar;

namespace {

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text_atomic(out, text);
  }
}

void emit(const std::string& out, const Json& j) { emit(out, j.dump(2) + "\n"); }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = std::min(s.find(',', start), s.size());
    if (end > start) out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

exp::ExperimentConfig base_config(const std::string& config, const std::string& preset) {
  if (!config.empty() && !preset.empty()) throw Error("--config and --preset are mutually exclusive");
  if (!config.empty()) return exp::config_from_json(read_json(config));
  if (!preset.empty()) return exp::load_preset(preset);
  return {};
}

// Either a CSV given by --data or the data described by --config/--preset.
Dataset input_data(const std::string& data, const std::string& config, const std::string& preset) {
  if (!data.empty()) return read_csv(data);
  if (config.empty() && preset.empty()) throw Error("no input: pass --data, --config or --preset");
  return exp::load_data(base_config(config, preset));
}

// Training rows of a config-described dataset, or the whole CSV.
Dataset training_data(const std::string& data, const std::string& config, const std::string& preset) {
  Dataset d = input_data(data, config, preset);
  if (!data.empty()) return d;
  return d.slice_rows(0, base_config(config, preset).train_len);
}

Json load_model_json(const std::string& path) {
  Json j = read_json(path);
  if (!j.contains("kind")) throw Error("model file lacks a \"kind\" field");
  return j;
}

ForecastFn load_forecaster(const std::string& path) {
  const Json j = load_model_json(path);
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "var") return forecaster(var_model_from_json(j));
  if (kind == "vanar") return forecaster(vanar_model_from_json(j));
  throw Error("unknown model kind '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear and neural vector autoregressions for forecasting, causality and impulse responses"};
  app.set_version_flag("--version", exp::kVersion);
  app.require_subcommand(1);

  std::string config, preset, out, data, model;
  std::uint64_t seed = 0;
  bool seed_given = false;

  auto add_source = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Experiment config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--preset", preset, "Named preset");
  };

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Simulate the coupled logistic benchmark as CSV");
  std::string scenario = "default";
  int steps = 1000;
  std::vector<double> x0{0.4, 0.2};
  int burn_in = 0;
  simulate->add_option("--scenario", scenario, "default, nointeraction, noise1 or noise2");
  simulate->add_option("-n,--steps", steps, "Number of steps (n+1 rows)");
  simulate->add_option("--x0", x0, "Initial state x y")->expected(2);
  simulate->add_option("--burn-in", burn_in, "Discarded leading steps");
  simulate->add_option("--seed", seed, "Observation noise seed");
  simulate->add_option("--out", out, "Output CSV (stdout when omitted)");
  add_source(simulate);

  // fit-var
  auto* fit_var = app.add_subcommand("fit-var", "Fit a VAR by OLS and write it as JSON");
  int p = 0;
  int p_max = 0;
  std::string det = "none";
  fit_var->add_option("--data", data, "Training CSV")->check(CLI::ExistingFile);
  fit_var->add_option("-p,--lag", p, "Lag order (AIC selection when omitted)");
  fit_var->add_option("--p-max", p_max, "AIC search bound");
  fit_var->add_option("--det", det, "none, constant or constant+trend");
  fit_var->add_option("--out", out, "Output JSON (stdout when omitted)");
  add_source(fit_var);

  // fit-vanar
  auto* fit_vanar_cmd = app.add_subcommand("fit-vanar", "Fit a VANAR model and write it as JSON");
  exp::ModelSpec spec;
  spec.type = "vanar";
  fit_vanar_cmd->add_option("--data", data, "Training CSV")->check(CLI::ExistingFile);
  fit_vanar_cmd->add_option("-p,--lag", p, "Lag order (AIC selection when omitted)");
  fit_vanar_cmd->add_option("--hidden", spec.hidden, "Head hidden widths");
  fit_vanar_cmd->add_option("--epochs", spec.epochs, "Head training epochs");
  fit_vanar_cmd->add_option("--learning-rate", spec.learning_rate, "Head AdaGrad learning rate");
  fit_vanar_cmd->add_option("--ae-epochs", spec.autoencoder_epochs, "Autoencoder training epochs");
  fit_vanar_cmd->add_option("--embedding-dim", spec.embedding_dim, "Autoencoder code width");
  fit_vanar_cmd->add_option("--autoencoder", spec.force_autoencoder, "Force the autoencoder on or off");
  fit_vanar_cmd->add_option("--seed", seed, "Model seed");
  fit_vanar_cmd->add_option("--out", out, "Output JSON (stdout when omitted)");
  add_source(fit_vanar_cmd);

  // forecast
  auto* forecast = app.add_subcommand("forecast", "Recursive forecast from a fitted model");
  int horizon = 20;
  forecast->add_option("--model", model, "Model JSON from fit-var or fit-vanar")->required()->check(CLI::ExistingFile);
  forecast->add_option("--data", data, "History CSV")->required()->check(CLI::ExistingFile);
  forecast->add_option("--horizon", horizon, "Steps ahead")->check(CLI::PositiveNumber);
  forecast->add_option("--out", out, "Output CSV (stdout when omitted)");

  // granger
  auto* granger = app.add_subcommand("granger", "Forecast-based causality edges around a center variable");
  std::string family = "vanar", center, mode = "recursive";
  exp::ModelSpec granger_spec;
  long train_len = 0, test_len = 20;
  granger->add_option("--data", data, "Input CSV")->check(CLI::ExistingFile);
  granger->add_option("--family", family, "vanar or var");
  granger->add_option("--center", center, "Center variable (first column when omitted)");
  granger->add_option("--mode", mode, "recursive or one-step");
  granger->add_option("-p,--lag", p, "Lag order (AIC selection when omitted)");
  granger->add_option("--train-len", train_len, "Training rows (all but the test rows when omitted)");
  granger->add_option("--test-len", test_len, "Test rows");
  granger->add_option("--epochs", granger_spec.epochs, "Head training epochs");
  granger->add_option("--hidden", granger_spec.hidden, "Head hidden widths");
  granger->add_option("--seed", seed, "Single model seed (default 1,2,3)");
  granger->add_option("--out", out, "Output CSV (stdout when omitted)");
  add_source(granger);

  // irf
  auto* irf = app.add_subcommand("irf", "Impulse response of a fitted model");
  std::string shock_var = "y";
  double epsilon = 0.1;
  irf->add_option("--model", model, "Model JSON from fit-var or fit-vanar")->required()->check(CLI::ExistingFile);
  irf->add_option("--data", data, "History CSV; the shock hits its last row")->required()->check(CLI::ExistingFile);
  irf->add_option("--shock-var", shock_var, "Shocked variable");
  irf->add_option("--epsilon", epsilon, "Shock size");
  irf->add_option("--horizon", horizon, "Steps after the shock")->check(CLI::PositiveNumber);
  irf->add_option("--out", out, "Output CSV (stdout when omitted)");

  // run
  auto* run = app.add_subcommand("run", "Run a config-driven experiment");
  run->add_option("--seed", seed, "Replace the config's seeds with this single seed");
  run->add_option("--out", out, "Output directory (config output_dir when omitted)");
  add_source(run);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Read, aggregate and transform an empirical CSV");
  exp::IngestOptions ingest_opts;
  std::string log_columns, columns;
  ingest->add_option("--data", data, "Input CSV")->required()->check(CLI::ExistingFile);
  ingest->add_flag("--quarterly", ingest_opts.quarterly, "Average 3-row blocks");
  ingest->add_option("--log", log_columns, "Comma-separated columns to log-transform");
  ingest->add_option("--columns", columns, "Comma-separated columns to keep");
  ingest->add_option("--out", out, "Output CSV (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);
  for (auto* sub : {simulate, fit_vanar_cmd, granger, run}) {
    if (sub->parsed() && sub->count("--seed")) seed_given = true;
  }

  try {
    if (simulate->parsed()) {
      Dataset d = [&] {
        if (!config.empty() || !preset.empty()) {
          auto cfg = base_config(config, preset);
          if (seed_given) cfg.scenario.seed = seed;
          return exp::load_data(cfg);
        }
        const auto spec_s = sim::ScenarioSpec::make(sim::scenario_from_string(scenario), seed);
        return sim::simulate_scenario(spec_s, {x0[0], x0[1]}, steps, burn_in);
      }();
      emit(out, to_csv(d));
    } else if (fit_var->parsed()) {
      const Dataset train = training_data(data, config, preset);
      const Deterministic d = deterministic_from_string(det);
      const int lag = p > 0 ? p : select_lag_aic(train, p_max > 0 ? p_max : exp::default_p_max(train.rows()), d);
      emit(out, to_json(fit_var_ols(train, lag, d)));
    } else if (fit_vanar_cmd->parsed()) {
      const Dataset train = training_data(data, config, preset);
      const int lag = p > 0 ? p : select_lag_aic(train, exp::default_p_max(train.rows()), Deterministic::None);
      VanarOptions o = spec.vanar_options();
      o.seed = seed;
      emit(out, to_json(fit_vanar(train, lag, o)));
    } else if (forecast->parsed()) {
      emit(out, to_csv(load_forecaster(model)(read_csv(data), horizon)));
    } else if (granger->parsed()) {
      const Dataset d = input_data(data, config, preset);
      CausalityOptions o;
      if (data.empty()) {
        const auto cfg = base_config(config, preset);
        o.train_len = cfg.train_len;
        o.test_len = cfg.test_len;
      } else {
        o.test_len = test_len;
        o.train_len = train_len > 0 ? train_len : d.rows() - test_len;
      }
      o.family = model_family_from_string(family);
      o.mode = eval_mode_from_string(mode);
      granger_spec.type = "vanar";
      o.vanar = granger_spec.vanar_options();
      if (seed_given) o.seeds = {seed};
      const Dataset train = d.slice_rows(0, o.train_len);
      o.p = p > 0 ? p : select_lag_aic(train, exp::default_p_max(o.train_len), Deterministic::None);
      const auto graph = causality_graph(d, center.empty() ? d.names().front() : center, o);
      std::string csv = "source,target,score,full_rmse,uni_rmse\n";
      for (const auto& e : graph.edges) {
        csv += e.source_label() + "," + e.target + "," + format_double(e.score) + "," +
               format_double(e.full_rmse) + "," + format_double(e.univariate_rmse) + "\n";
      }
      emit(out, csv);
    } else if (irf->parsed()) {
      const auto fn = load_forecaster(model);
      const Dataset history = read_csv(data);
      const Dataset shocked = impulse_path(fn, history, shock_var, epsilon, horizon);
      const Dataset base = impulse_path(fn, history, shock_var, 0.0, horizon);
      std::string csv = "step";
      for (const auto& v : history.names()) csv += ",shocked_" + v + ",unshocked_" + v + ",response_" + v;
      csv += "\n";
      for (Eigen::Index t = 0; t < shocked.rows(); ++t) {
        csv += std::to_string(t + 1);
        for (Eigen::Index j = 0; j < shocked.cols(); ++j) {
          const double a = shocked.values()(t, j), b = base.values()(t, j);
          csv += "," + format_double(a) + "," + format_double(b) + "," + format_double(a - b);
        }
        csv += "\n";
      }
      emit(out, csv);
    } else if (run->parsed()) {
      if (config.empty() && preset.empty()) throw Error("run needs --config or --preset");
      auto cfg = base_config(config, preset);
      if (seed_given) cfg.seeds = {seed};
      const auto report = exp::run(cfg, out);
      for (const auto& f : report.files) std::cout << f.string() << "\n";
      for (const auto& e : report.task_errors) std::cerr << "task failed: " << e << "\n";
      return report.exit_code();
    } else if (ingest->parsed()) {
      ingest_opts.log_columns = split_list(log_columns);
      ingest_opts.columns = split_list(columns);
      emit(out, to_csv(exp::ingest_csv(data, ingest_opts)));
    }
  } catch (const exp::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
