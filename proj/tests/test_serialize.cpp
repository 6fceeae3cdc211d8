#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "vanar/serialize.hpp"
#include "vanar/sim.hpp"

using namespace vanar;

TEST_SUITE("serialize") {

TEST_CASE("csv with a date column") {
  const Dataset d = parse_csv("date,a,b\n2001-01,1,2.5\n2001-02,3,-4e-2\n");
  CHECK(d.names() == std::vector<std::string>{"a", "b"});
  CHECK(d.dates() == std::vector<std::string>{"2001-01", "2001-02"});
  CHECK(d.values()(1, 1) == -0.04);
}

TEST_CASE("csv errors carry locations") {
  CHECK_THROWS_WITH(parse_csv("a,b\n"), "empty dataset");
  CHECK_THROWS(parse_csv("a,b\n1,2\n3\n"));
  try {
    parse_csv("a,b\n1,2\n3,oops\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
  }
}

TEST_CASE("csv round trip is bit exact") {
  const Dataset d = sim::simulate_scenario(sim::ScenarioSpec::make(sim::Scenario::Noise1, 3), {0.4, 0.2}, 50);
  const Dataset back = parse_csv(to_csv(d));
  CHECK(back.values() == d.values());
  CHECK(back.names() == d.names());
}

TEST_CASE("format_double is shortest round trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1e3);
  for (int k = 0; k < 200; ++k) {
    const double v = n(rng);
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("VAR model round trip") {
  const Dataset d = sim::simulate_system1(sim::LogisticParams{}, {0.4, 0.2}, 200);
  const VarModel m = fit_var_ols(d, 3, Deterministic::ConstantTrend);
  const Json j = to_json(m);
  CHECK(j["kind"] == "var");
  const VarModel back = var_model_from_json(Json::parse(j.dump()));
  CHECK(back.p == 3);
  CHECK(back.det == Deterministic::ConstantTrend);
  CHECK(var_forecast(back, d, 10).values() == var_forecast(m, d, 10).values());
}

TEST_CASE("VANAR model round trip") {
  const Dataset d = sim::simulate_system1(sim::LogisticParams{}, {0.4, 0.2}, 150);
  VanarOptions o;
  o.hidden = {8, 8};
  o.head_cfg.epochs = 5;
  o.autoencoder_cfg.epochs = 5;
  o.force_autoencoder = true;
  const VanarModel m = fit_vanar(d, 4, o);
  const VanarModel back = vanar_model_from_json(Json::parse(to_json(m).dump()));
  CHECK(back.activated);
  CHECK(vanar_forecast(back, d, 10).values() == vanar_forecast(m, d, 10).values());
}

TEST_CASE("atomic writes leave no temporary behind") {
  const auto dir = std::filesystem::temp_directory_path() / "vanar_serialize_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  write_json(dir / "a.json", Json{{"k", 1}});
  write_json(dir / "a.json", Json{{"k", 2}});
  CHECK(read_json(dir / "a.json")["k"] == 2);
  CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}) == 1);
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
