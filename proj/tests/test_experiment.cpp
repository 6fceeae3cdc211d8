#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vanar/experiment.hpp"

using namespace vanar;
using namespace vanar::exp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vanar_exp_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Shrinks a preset to a budget that runs in seconds.
ExperimentConfig reduced(ExperimentConfig cfg) {
  for (auto& m : cfg.models) {
    m.hidden = {8, 8};
    m.epochs = 3;
    m.autoencoder_epochs = 3;
  }
  cfg.seeds = {1};
  return cfg;
}

bool same_tree(const fs::path& a, const fs::path& b) {
  std::size_t count = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++count;
    const fs::path other = b / e.path().filename();
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) return false;
  }
  return count == static_cast<std::size_t>(std::distance(fs::directory_iterator(b), fs::directory_iterator{}));
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("quarterly aggregation averages three-row blocks") {
  const fs::path dir = scratch("ingest");
  std::string csv = "date,a,b,c\n";
  for (int m = 1; m <= 13; ++m) {
    csv += "2000-" + std::to_string(m) + "," + std::to_string(m) + "," + std::to_string(2 * m) + "," +
           std::to_string(m * m) + "\n";
  }
  write_file(dir / "m.csv", csv);
  IngestOptions o;
  o.quarterly = true;
  const Dataset q = ingest_csv(dir / "m.csv", o);
  REQUIRE(q.rows() == 4);
  CHECK(q.freq() == std::optional<std::string>("quarterly"));
  CHECK(q.values()(0, 0) == doctest::Approx(2.0));
  CHECK(q.values()(3, 1) == doctest::Approx(22.0));
  CHECK(q.values()(1, 2) == doctest::Approx((16.0 + 25.0 + 36.0) / 3.0));
  CHECK(q.dates()[1] == "2000-4");

  o.log_columns = {"b"};
  o.columns = {"b", "a"};
  const Dataset l = ingest_csv(dir / "m.csv", o);
  CHECK(l.names() == std::vector<std::string>{"b", "a"});
  CHECK(l.values()(0, 0) == doctest::Approx(std::log(4.0)));
}

TEST_CASE("ingest errors") {
  const fs::path dir = scratch("ingest_err");
  write_file(dir / "neg.csv", "a,b\n1,0\n2,3\n");
  IngestOptions o;
  o.log_columns = {"b"};
  CHECK_THROWS_WITH(ingest_csv(dir / "neg.csv", o), doctest::Contains("log of non-positive"));
  write_file(dir / "header.csv", "a,b\n");
  CHECK_THROWS_WITH(ingest_csv(dir / "header.csv"), "empty dataset");
  write_file(dir / "text.csv", "a,b\n1,2\n3,x\n");
  CHECK_THROWS_WITH(ingest_csv(dir / "text.csv"), doctest::Contains("line 3"));
  write_file(dir / "ragged.csv", "a,b\n1,2\n3\n");
  CHECK_THROWS(ingest_csv(dir / "ragged.csv"));
}

TEST_CASE("config problems are listed exhaustively") {
  const Json bad = Json::parse(R"({
    "system": "system2",
    "scenario": {"kind": "noise1", "noise_sd": 0.5, "x0": [2, 0.1]},
    "environment": {"train_len": 100, "test_len": 10},
    "models": [{"type": "lstm"}, {"type": "vanar", "hidden": [], "learning_rate": -1}],
    "tasks": ["forecast", "dance"],
    "horizons": [20],
    "seeds": [],
    "colour": "blue"
  })");
  try {
    config_from_json(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const auto& p = e.problems();
    auto mentions = [&](const std::string& s) {
      return std::any_of(p.begin(), p.end(), [&](const std::string& m) { return m.find(s) != std::string::npos; });
    };
    CHECK(mentions("config.system"));
    CHECK(mentions("noise_sd"));
    CHECK(mentions("x0"));
    CHECK(mentions("models[0].type"));
    CHECK(mentions("models[1].hidden"));
    CHECK(mentions("learning rates"));
    CHECK(mentions("dance"));
    CHECK(mentions("horizons"));
    CHECK(mentions("seeds"));
    CHECK(mentions("colour"));
    CHECK(p.size() >= 10);
  }
}

TEST_CASE("task requirements are checked") {
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"tasks": ["forecast"]})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"tasks": ["irf"], "models": [{"type": "ar"}]})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"tasks": ["one-step"], "models": [{"type": "var"}]})")),
                  ConfigError);

  const fs::path dir = scratch("csvcols");
  write_file(dir / "d.csv", "a,b\n1,2\n2,3\n3,5\n");
  ExperimentConfig cfg;
  cfg.system = "csv";
  cfg.csv_path = (dir / "d.csv").string();
  cfg.csv.columns = {"a", "zz"};
  CHECK_THROWS_AS(run(cfg, dir / "out"), ConfigError);

  cfg.csv.columns.clear();
  cfg.tasks = {"granger", "irf"};
  cfg.models = {ModelSpec{.type = "var"}};
  cfg.granger_center = "q";
  cfg.irf_shock_var = "w";
  try {
    run(cfg, dir / "out");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.problems().size() == 3);
  }
}

TEST_CASE("config echo round trips") {
  ExperimentConfig cfg = load_preset("noise2-medium");
  cfg.p = 3;
  cfg.models[0].embedding_dim = 2;
  const Json j = to_json(cfg);
  CHECK(to_json(config_from_json(j)) == j);
  Json manifest{{"tool", "vanar"}, {"config", j}};
  CHECK(to_json(config_from_json(manifest)) == j);
}

TEST_CASE("empty task list writes only the manifest") {
  const fs::path dir = scratch("empty");
  ExperimentConfig cfg;
  const RunReport r = run(cfg, dir);
  CHECK(r.exit_code() == 0);
  REQUIRE(r.files.size() == 1);
  CHECK(r.files[0] == "manifest.json");
  const Json m = read_json(dir / "manifest.json");
  CHECK(m["tool"] == "vanar");
  CHECK(m["version"] == kVersion);
  CHECK(m["seeds"] == Json::array({1, 2, 3}));
  CHECK_FALSE(m["config"].contains("output_dir"));
}

TEST_CASE("every preset validates and runs at reduced budget") {
  const auto names = preset_names();
  for (const char* expected : {"default-high", "default-medium", "default-low", "default-medium-350",
                               "nointeraction-high", "nointeraction-medium", "nointeraction-low", "noise1-high",
                               "noise1-medium", "noise1-low", "noise2-high", "noise2-medium", "noise2-low"}) {
    CHECK(std::find(names.begin(), names.end(), expected) != names.end());
  }
  for (const auto& name : names) {
    CAPTURE(name);
    const ExperimentConfig cfg = reduced(load_preset(name));
    CHECK(validate(cfg, load_data(cfg)).empty());
    const fs::path dir = scratch("preset_" + name);
    const RunReport r = run(cfg, dir);
    CHECK(r.exit_code() == 0);
    CHECK(r.task_errors.empty());
  }
}

TEST_CASE("forecast report has horizon rows and model columns") {
  const fs::path dir = scratch("layout");
  ExperimentConfig cfg = reduced(load_preset("default-high"));
  cfg.tasks = {"forecast"};
  const RunReport r = run(cfg, dir);
  REQUIRE(r.exit_code() == 0);
  const Dataset x = parse_csv(slurp(dir / "forecast_x.csv"));
  CHECK(x.names() == std::vector<std::string>{"horizon", "VANAR", "ANA", "VAR", "AR"});
  CHECK(x.column("horizon")(0) == 20);
  CHECK(x.column("horizon")(1) == 10);
  CHECK(fs::exists(dir / "forecast_y.csv"));
}

TEST_CASE("replaying a manifest reproduces every file") {
  const fs::path a = scratch("replay_a");
  const fs::path b = scratch("replay_b");
  ExperimentConfig cfg = reduced(load_preset("noise2-low"));
  REQUIRE(run(cfg, a).exit_code() == 0);
  const ExperimentConfig again = config_from_json(read_json(a / "manifest.json"));
  REQUIRE(run(again, b).exit_code() == 0);
  CHECK(same_tree(a, b));
}

TEST_CASE("failing tasks are reported with a nonzero exit") {
  const fs::path dir = scratch("taskfail");
  std::string csv = "a,b\n";
  for (int t = 0; t < 60; ++t) csv += std::to_string(t % 7) + ",1\n";
  write_file(dir / "d.csv", csv);
  ExperimentConfig cfg;
  cfg.system = "csv";
  cfg.csv_path = (dir / "d.csv").string();
  cfg.train_len = 40;
  cfg.test_len = 10;
  cfg.horizons = {10};
  cfg.p = 1;
  cfg.models = {ModelSpec{.type = "var", .det = Deterministic::Constant}, ModelSpec{.type = "naive"}};
  cfg.tasks = {"forecast"};
  const RunReport r = run(cfg, dir / "out");
  CHECK(r.exit_code() != 0);
  REQUIRE(r.task_errors.size() == 1);
  CHECK(r.task_errors[0].find("forecast") == 0);
  CHECK(read_json(dir / "out" / "manifest.json")["task_errors"].size() == 1);
}

}  // TEST_SUITE
