#pragma once

// Temperature-schedule mechanisms for 2x2 coordination games.
//
// Hysteresis plans move the system from the worse pure equilibrium to the
// socially optimal one by a transient excursion of T_x above the critical
// temperature. Optimal-control plans park the system at a QRE whose welfare
// beats every Nash equilibrium. Planning is done on the diagonal form;
// targets, initial states and welfare figures are reported in the game's own
// action labels and payoffs.

#include <optional>
#include <string>
#include <vector>

#include "qbif/dynamics.hpp"
#include "qbif/game.hpp"
#include "qbif/qre.hpp"

namespace qbif {

enum class MechanismKind { Hysteresis, OptimalControl };

enum class CaseId { C1, D1, D2, A1, A2, A3, A4, A3prime, B1, B2, B3, B4 };

const char* to_string(MechanismKind k);
const char* to_string(CaseId c);
MechanismKind mechanism_kind_from_string(const std::string& s);
CaseId case_id_from_string(const std::string& s);

struct MechanismPlan {
  MechanismKind kind = MechanismKind::Hysteresis;
  CaseId case_id = CaseId::C1;
  StrategyProfile target_state;   // nominal target
  StrategyProfile offset_target;  // target pulled into the open region
  StrategyProfile initial_state;  // suggested start near the relevant equilibrium
  TemperatureSchedule schedule;
  double expected_sw = 0.0;  // welfare at target_state
  double best_ne_sw = 0.0;
  bool improved_expected = false;
};

struct HysteresisOptions {
  // Temperatures in force when the plan starts. T_y is kept as the hold
  // temperature when it already satisfies the case's condition.
  std::optional<TemperaturePair> initial;
  double margin = 0.1;  // relative overshoot above T_C
};

struct OptimalControlOptions {
  double delta = 0.01;
  // The system starts somewhere on the principal branch rather than next to
  // the best equilibrium; selects the A3' variant in cases A3 and A4.
  bool init_on_principal = false;
  double margin = 0.1;
};

/// Throws UnsupportedCase unless every diagonal value is positive and exactly
/// one pure equilibrium is socially optimal; throws Infeasible when
/// a_y >= b_y and the optimum is the (0, 0) equilibrium in normalized labels.
MechanismPlan plan_hysteresis(const PayoffMatrices& game, const HysteresisOptions& opts = {});

/// Throws UnsupportedCase unless every diagonal value is positive and no pure
/// equilibrium is socially optimal.
MechanismPlan plan_optimal_control(const PayoffMatrices& game, const OptimalControlOptions& opts = {});

struct PhaseEndpoint {
  std::string label;
  StrategyProfile state;
  TemperaturePair temps;
};

struct ExecutionReport {
  StrategyProfile final_state;
  double final_sw = 0.0;
  bool improved = false;
  Trajectory trajectory;  // game labels, sw filled
  std::vector<PhaseEndpoint> phase_endpoints;
};

/// `init` is in the game's labels. `improved` compares final and best-NE
/// welfare with a 1e-9 slack widened by the welfare change the final residual
/// allows. Propagates ScheduleStalled.
ExecutionReport execute(const MechanismPlan& plan, const PayoffMatrices& game, StrategyProfile init,
                        const IntegratorConfig& cfg);

struct TaxRow {
  std::string label;
  double alpha_x = 0.0;
  double alpha_y = 0.0;
};

/// Flat tax rates 1 - T0/T at the start and after every phase.
/// Throws NegativeTax if any temperature falls below base_temp.
std::vector<TaxRow> taxation_view(const TemperatureSchedule& schedule, double base_temp);

}  // namespace qbif
