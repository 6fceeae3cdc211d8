#ifndef VANAR_SIM_HPP
#define VANAR_SIM_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "vanar/core.hpp"

namespace vanar::sim {

/**
 * Coefficients of the coupled logistic map
 *
 *   x_t = x_{t-1} (a_x - b_x x_{t-1} - c_x y_{t-1})
 *   y_t = y_{t-1} (a_y - b_y y_{t-1} - c_y x_{t-1})
 *
 * Defaults are the chaotic, weakly coupled benchmark system.
 */
struct LogisticParams {
  double a_x = 3.8;
  double b_x = 3.8;
  double c_x = 0.02;
  double a_y = 3.5;
  double b_y = 3.5;
  double c_y = 0.1;

  static LogisticParams no_interaction();
};

enum class Scenario { Default, NoInteraction, Noise1, Noise2 };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

/// One benchmark scenario: dynamics plus observation-noise level.
struct ScenarioSpec {
  Scenario kind = Scenario::Default;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;

  /// Canonical noise level for `kind` (0, 0, 0.1, 0.01).
  static ScenarioSpec make(Scenario kind, std::uint64_t seed);
  LogisticParams params() const;
};

using State = std::array<double, 2>;

/// Trajectory bound; any state outside [-kDivergenceBound, kDivergenceBound]
/// aborts with "divergent trajectory".
inline constexpr double kDivergenceBound = 10.0;

State step_system1(const LogisticParams& params, const State& s);

/// Noise-free trajectory of n + 1 rows (initial state first), columns x, y.
/// `burn_in` extra steps are iterated and discarded before recording.
Dataset simulate_system1(const LogisticParams& params, State x0, int n, int burn_in = 0);

/// Adds i.i.d. N(0, sd) to every entry. sd == 0 returns the input unchanged.
Dataset add_observation_noise(const Dataset& data, double sd, std::uint64_t seed);

/// Simulates the scenario for n steps from x0 and layers its observation noise.
Dataset simulate_scenario(const ScenarioSpec& spec, State x0, int n, int burn_in = 0);

/// Shocks the final row of `history` by `epsilon` on `shock_var` and
/// iterates the true system H steps. Returns the H future rows (t > T).
Dataset true_impulse_path(const LogisticParams& params, const Dataset& history,
                          const std::string& shock_var, double epsilon, int horizon);

/// Shocked minus unshocked true path.
Dataset true_impulse_response(const LogisticParams& params, const Dataset& history,
                              const std::string& shock_var, double epsilon, int horizon);

/// Spearman rank correlation; ties receive average ranks.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace vanar::sim

#endif  // VANAR_SIM_HPP
