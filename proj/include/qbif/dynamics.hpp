#pragma once

// Continuous-time Boltzmann Q-learning dynamics on the diagonal game.
//
// Integration runs in logit coordinates u = ln(x/(1-x)), v = ln(y/(1-y)),
// where the field is smooth on all of R^2:
//   du/dt = gap_x(y) - T_x u,   dv/dt = gap_y(x) - T_y v.

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qbif/game.hpp"
#include "qbif/qre.hpp"

namespace qbif {

struct TrajectoryRow {
  double t = 0.0;
  double x = 0.5;
  double y = 0.5;
  double t_x = 1.0;
  double t_y = 1.0;
  double sw = std::numeric_limits<double>::quiet_NaN();  // filled by to_original()
  double entropy = 0.0;
};

/// Row index at which a schedule phase finished.
struct PhaseMark {
  std::string label;
  std::size_t row = 0;
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  bool converged = false;
  double final_residual = std::numeric_limits<double>::infinity();
  double final_u = 0.0;
  double final_v = 0.0;
  std::vector<PhaseMark> phases;

  StrategyProfile final_state() const;
};

struct IntegratorConfig {
  double step = 1e-3;
  double max_time = 1e4;
  double residual_tol = 1e-9;
  int record_every = 100;

  void validate() const;
};

struct DiscreteAgentConfig {
  double alpha = 0.01;
  long horizon = 1000;
  std::uint64_t seed = 0;  // rewards are expected values, so nothing is sampled
  std::array<std::array<double, 2>, 2> initial_q{};  // [player][action]

  void validate() const;
};

enum class Which { Tx, Ty, Both };

const char* to_string(Which w);
Which which_from_string(const std::string& s);

struct SchedulePhase {
  Which which = Which::Tx;
  double target = 1.0;
  std::string label;
};

/// Piecewise temperature program. Each phase moves the selected
/// temperature(s) monotonically from the current value to `target`.
struct TemperatureSchedule {
  TemperaturePair initial;
  std::vector<SchedulePhase> phases;

  void validate() const;
  /// Temperatures in force after each phase, in order.
  std::vector<TemperaturePair> phase_ends() const;
};

/// Simplex-coordinate field (dx/dt, dy/dt).
std::pair<double, double> vector_field(const DiagonalForm& diag, StrategyProfile profile, TemperaturePair temps);

std::pair<double, double> logit_field(const DiagonalForm& diag, double u, double v, TemperaturePair temps);

/// Fixed-step RK4 in logit coordinates until the state is within
/// cfg.residual_tol (simplex distance, via one Newton step) of its rest
/// point, or cfg.max_time elapses. States are in normalized labels.
Trajectory integrate(const DiagonalForm& diag, StrategyProfile init, TemperaturePair temps,
                     const IntegratorConfig& cfg);

/// Quasi-static schedule execution: relax at the initial temperatures, then
/// move each phase in geometric increments of at most 5%, relaxing after each.
/// Throws ScheduleStalled if a relaxation runs out of time.
Trajectory integrate_schedule(const DiagonalForm& diag, StrategyProfile init, const TemperatureSchedule& schedule,
                              const IntegratorConfig& cfg);

/// Shannon entropy of both players' mixed strategies, in nats.
double entropy(StrategyProfile profile);

/// Mean-field Q-learning: each round both Q-values move toward their expected
/// rewards and strategies are recomputed by Boltzmann selection. Row time is
/// round * alpha / T_x. Rows are in the game's own action labels with sw set.
Trajectory simulate_discrete_q(const PayoffMatrices& game, TemperaturePair temps, const DiscreteAgentConfig& cfg);

/// Q-values whose Boltzmann distribution at temperature t is (p, 1-p).
std::array<double, 2> initial_q(double p, double t);

/// Maps a normalized-label trajectory back to the game's labels and fills sw.
Trajectory to_original(Trajectory traj, const PayoffMatrices& game, const Orientation& orientation);

}  // namespace qbif
