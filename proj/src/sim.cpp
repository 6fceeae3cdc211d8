#include "vanar/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace vanar::sim {

LogisticParams LogisticParams::no_interaction() {
  LogisticParams p;
  p.c_x = 0.0;
  p.c_y = 0.0;
  return p;
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Default: return "default";
    case Scenario::NoInteraction: return "nointeraction";
    case Scenario::Noise1: return "noise1";
    case Scenario::Noise2: return "noise2";
  }
  return "default";
}

Scenario scenario_from_string(const std::string& s) {
  if (s == "default") return Scenario::Default;
  if (s == "nointeraction" || s == "no-interaction") return Scenario::NoInteraction;
  if (s == "noise1") return Scenario::Noise1;
  if (s == "noise2") return Scenario::Noise2;
  throw Error("unknown scenario '" + s + "'");
}

ScenarioSpec ScenarioSpec::make(Scenario kind, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  switch (kind) {
    case Scenario::Noise1: spec.noise_sd = 0.1; break;
    case Scenario::Noise2: spec.noise_sd = 0.01; break;
    default: spec.noise_sd = 0.0; break;
  }
  return spec;
}

LogisticParams ScenarioSpec::params() const {
  return kind == Scenario::NoInteraction ? LogisticParams::no_interaction() : LogisticParams{};
}

State step_system1(const LogisticParams& p, const State& s) {
  const double x = s[0];
  const double y = s[1];
  State next{x * (p.a_x - p.b_x * x - p.c_x * y), y * (p.a_y - p.b_y * y - p.c_y * x)};
  for (double v : next) {
    if (!std::isfinite(v) || std::abs(v) > kDivergenceBound) throw Error("divergent trajectory");
  }
  return next;
}

namespace {

Matrix iterate(const LogisticParams& params, State s, int steps) {
  Matrix out(steps, 2);
  for (int t = 0; t < steps; ++t) {
    s = step_system1(params, s);
    out(t, 0) = s[0];
    out(t, 1) = s[1];
  }
  return out;
}

}  // namespace

Dataset simulate_system1(const LogisticParams& params, State x0, int n, int burn_in) {
  if (n < 1) throw Error("simulate: n must be positive");
  if (burn_in < 0) throw Error("simulate: negative burn-in");
  for (double v : x0) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error("simulate: initial state outside [0, 1]");
  }
  State s = x0;
  for (int i = 0; i < burn_in; ++i) s = step_system1(params, s);

  Matrix values(n + 1, 2);
  values(0, 0) = s[0];
  values(0, 1) = s[1];
  values.bottomRows(n) = iterate(params, s, n);
  return Dataset({"x", "y"}, std::move(values));
}

Dataset add_observation_noise(const Dataset& data, double sd, std::uint64_t seed) {
  if (sd < 0.0) throw Error("noise: negative standard deviation");
  if (sd == 0.0) return data;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sd);
  Matrix values = data.values();
  // Row-major draw order so the noise stream does not depend on storage order.
  for (Eigen::Index t = 0; t < values.rows(); ++t) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) values(t, j) += normal(rng);
  }
  return Dataset(data.names(), std::move(values), data.freq(), data.dates());
}

Dataset simulate_scenario(const ScenarioSpec& spec, State x0, int n, int burn_in) {
  return add_observation_noise(simulate_system1(spec.params(), x0, n, burn_in), spec.noise_sd,
                               spec.seed);
}

Dataset true_impulse_path(const LogisticParams& params, const Dataset& history,
                          const std::string& shock_var, double epsilon, int horizon) {
  if (history.cols() != 2) throw Error("true impulse path: history must have two variables");
  if (horizon < 1) throw Error("true impulse path: horizon must be positive");
  const Eigen::Index shocked = history.index_of(shock_var);
  const Eigen::Index last = history.rows() - 1;
  State s{history.values()(last, 0), history.values()(last, 1)};
  s[static_cast<std::size_t>(shocked)] += epsilon;
  return Dataset(history.names(), iterate(params, s, horizon));
}

Dataset true_impulse_response(const LogisticParams& params, const Dataset& history,
                              const std::string& shock_var, double epsilon, int horizon) {
  const Dataset shocked = true_impulse_path(params, history, shock_var, epsilon, horizon);
  const Dataset base = true_impulse_path(params, history, shock_var, 0.0, horizon);
  return Dataset(history.names(), shocked.values() - base.values());
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("spearman: length mismatch");
  if (a.size() < 2) throw Error("spearman: need at least two observations");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw Error("spearman: constant series");
  return sab / std::sqrt(saa * sbb);
}

}  // namespace vanar::sim
