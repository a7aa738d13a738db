#include "qbif/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qbif/bifurcation.hpp"
#include "qbif/error.hpp"

namespace qbif {

const char* to_string(MechanismKind k) {
  return k == MechanismKind::Hysteresis ? "Hysteresis" : "OptimalControl";
}

namespace {

constexpr std::pair<CaseId, const char*> kCaseNames[] = {
    {CaseId::C1, "C1"}, {CaseId::D1, "D1"}, {CaseId::D2, "D2"},           {CaseId::A1, "A1"},
    {CaseId::A2, "A2"}, {CaseId::A3, "A3"}, {CaseId::A4, "A4"},           {CaseId::A3prime, "A3prime"},
    {CaseId::B1, "B1"}, {CaseId::B2, "B2"}, {CaseId::B3, "B3"},           {CaseId::B4, "B4"},
};

}  // namespace

const char* to_string(CaseId c) {
  for (const auto& [id, name] : kCaseNames)
    if (id == c) return name;
  return "?";
}

MechanismKind mechanism_kind_from_string(const std::string& s) {
  if (s == "Hysteresis") return MechanismKind::Hysteresis;
  if (s == "OptimalControl") return MechanismKind::OptimalControl;
  throw InvalidArgument("unknown mechanism kind '" + s + "'");
}

CaseId case_id_from_string(const std::string& s) {
  for (const auto& [id, name] : kCaseNames)
    if (s == name) return id;
  throw InvalidArgument("unknown case id '" + s + "'");
}

namespace {

bool is_corner(StrategyProfile p, double x, double y) { return p.x == x && p.y == y; }

// Equilibrium and welfare facts shared by both planners, with corners
// expressed in normalized labels.
struct GameFacts {
  DiagonalForm d;
  StrategyProfile so;  // normalized
  double so_sw = 0.0;
  std::vector<std::pair<StrategyProfile, double>> ne;  // normalized, welfare
  double best_ne_sw = 0.0;
};

GameFacts game_facts(const PayoffMatrices& game) {
  game.validate();
  GameFacts f;
  f.d = diagonal_form(game);
  if (!classify(f.d).strict_coordination)
    throw UnsupportedCase("mechanisms require a coordination game with all diagonal values positive");
  const WelfareOptimum so = max_welfare(game);
  f.so = f.d.orientation.to_normalized(so.profile);
  f.so_sw = so.welfare;
  f.best_ne_sw = -std::numeric_limits<double>::infinity();
  for (const StrategyProfile& p : pure_nash(game)) {
    const double w = social_welfare(game, p);
    f.ne.emplace_back(f.d.orientation.to_normalized(p), w);
    f.best_ne_sw = std::max(f.best_ne_sw, w);
  }
  return f;
}

bool welfare_equal(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

std::string move_label(const char* name, double from, double to) {
  return std::string(to >= from ? "raise " : "lower ") + name;
}

// Appends a phase and tracks the running temperatures. No-op moves are skipped.
struct ScheduleBuilder {
  TemperatureSchedule schedule;
  TemperaturePair cur;

  explicit ScheduleBuilder(TemperaturePair initial) : cur(initial) { schedule.initial = initial; }

  void tx(double target, const std::string& what) {
    if (target == cur.t_x) return;
    schedule.phases.push_back({Which::Tx, target, move_label("T_x", cur.t_x, target) + what});
    cur.t_x = target;
  }
  void ty(double target, const std::string& what) {
    if (target == cur.t_y) return;
    schedule.phases.push_back({Which::Ty, target, move_label("T_y", cur.t_y, target) + what});
    cur.t_y = target;
  }
};

TemperaturePair positive_first_form(const DiagonalForm& d, StrategyProfile p) {
  const TemperaturePair t = first_form_temps(d, p.x, p.y);
  if (!(t.t_x > 0.0 && t.t_y > 0.0))
    throw InternalConsistency("offset target is not supported by positive temperatures");
  return {std::max(t.t_x, kMinTemperature), std::max(t.t_y, kMinTemperature)};
}

// Bound on |dSW/dx| + |dSW/dy| over the unit square.
double welfare_lipschitz(const PayoffMatrices& g) {
  const auto sw = [&](double x, double y) { return social_welfare(g, {x, y}); };
  const double gx = std::max(std::abs(sw(1, 0) - sw(0, 0)), std::abs(sw(1, 1) - sw(0, 1)));
  const double gy = std::max(std::abs(sw(0, 1) - sw(0, 0)), std::abs(sw(1, 1) - sw(1, 0)));
  return gx + gy;
}

}  // namespace

MechanismPlan plan_hysteresis(const PayoffMatrices& game, const HysteresisOptions& opts) {
  const GameFacts f = game_facts(game);
  const DiagonalForm& d = f.d;
  int optimal_ne = 0;
  StrategyProfile worse{};
  for (const auto& [p, w] : f.ne) {
    if (welfare_equal(w, f.so_sw))
      ++optimal_ne;
    else
      worse = p;
  }
  if (optimal_ne != 1)
    throw UnsupportedCase("hysteresis requires exactly one pure equilibrium to be socially optimal");
  const ThresholdTemps th = threshold_temps(d);
  if (th.degenerate) throw UnsupportedCase("threshold temperatures are undefined for a_x == b_x");

  const bool so_high = is_corner(f.so, 1.0, 1.0);
  MechanismPlan plan;
  plan.kind = MechanismKind::Hysteresis;
  double hold;
  const bool given = opts.initial.has_value();
  if (d.a_y >= d.b_y) {
    if (!so_high)
      throw Infeasible(
          "hysteresis infeasible: with a_y >= b_y the principal branch lies in x > 1/2 at every T_y, "
          "so the (0,0) equilibrium cannot be approached from any state with x > 1/2");
    plan.case_id = CaseId::C1;
    hold = given ? opts.initial->t_y : 1.0;
  } else if (!so_high) {
    plan.case_id = CaseId::D1;
    hold = given && opts.initial->t_y < th.t_i ? opts.initial->t_y : 0.5 * th.t_i;
  } else {
    plan.case_id = CaseId::D2;
    hold = given && opts.initial->t_y > th.t_i ? opts.initial->t_y : 1.5 * th.t_i;
  }
  hold = std::max(hold, kMinTemperature);
  const double tc = critical_temperature(d, hold);
  const TemperaturePair initial =
      given ? *opts.initial : TemperaturePair{tc > 0.0 ? std::max(kMinTemperature, 0.5 * tc) : hold, hold};
  initial.validate();

  ScheduleBuilder b(initial);
  b.ty(hold, " to the hold temperature");
  if (tc > 0.0) b.tx(std::max(b.cur.t_x, (1.0 + opts.margin) * tc), " above T_C");
  b.tx(kMinTemperature, " to the minimum");
  b.ty(kMinTemperature, " to the minimum");
  plan.schedule = b.schedule;

  const Orientation& o = d.orientation;
  plan.target_state = plan.offset_target = o.to_original(f.so);
  const double nudge = 0.05;
  plan.initial_state = o.to_original({worse.x == 0.0 ? nudge : 1.0 - nudge, worse.y == 0.0 ? nudge : 1.0 - nudge});
  plan.expected_sw = f.so_sw;
  plan.best_ne_sw = f.best_ne_sw;
  plan.improved_expected = plan.expected_sw > plan.best_ne_sw - 1e-9;
  return plan;
}

MechanismPlan plan_optimal_control(const PayoffMatrices& game, const OptimalControlOptions& opts) {
  if (!(opts.delta > 0.0 && opts.delta < 0.25)) throw InvalidArgument("delta must lie in (0, 0.25)");
  const GameFacts f = game_facts(game);
  const DiagonalForm& d = f.d;
  for (const auto& [p, w] : f.ne)
    if (welfare_equal(w, f.so_sw))
      throw UnsupportedCase("optimal control requires that no pure equilibrium is socially optimal");

  // Best equilibrium; ties go to (1,1).
  StrategyProfile best{1.0, 1.0};
  double best_w = -std::numeric_limits<double>::infinity();
  for (const auto& [p, w] : f.ne)
    if (w > best_w || (w == best_w && p.x == 1.0)) {
      best = p;
      best_w = w;
    }
  const bool best_high = is_corner(best, 1.0, 1.0);
  const bool so_01 = is_corner(f.so, 0.0, 1.0);
  const double c_x = d.b_x / (d.a_x + d.b_x);
  const double c_y = d.b_y / (d.a_y + d.b_y);

  MechanismPlan plan;
  plan.kind = MechanismKind::OptimalControl;
  if (d.a_y >= d.b_y) {
    plan.case_id = best_high ? (so_01 ? CaseId::A1 : CaseId::A2) : (so_01 ? CaseId::A3 : CaseId::A4);
    if (opts.init_on_principal && (plan.case_id == CaseId::A3 || plan.case_id == CaseId::A4))
      plan.case_id = CaseId::A3prime;
  } else {
    plan.case_id = best_high ? (so_01 ? CaseId::B1 : CaseId::B2) : (so_01 ? CaseId::B3 : CaseId::B4);
  }

  double delta = opts.delta;
  StrategyProfile nominal, offset;
  switch (plan.case_id) {
    case CaseId::A1:
    case CaseId::A3prime:
      nominal = {0.5, 1.0};
      offset = {0.5 + delta, 1.0 - delta};
      break;
    case CaseId::A2:
    case CaseId::B2:
      nominal = {1.0, 0.5};
      offset = {1.0 - delta, 0.5 + delta};
      break;
    case CaseId::A3:
    case CaseId::B3:
      delta = std::min(delta, 0.5 * c_x);
      nominal = {0.0, c_x};
      offset = {delta, c_x - delta};
      break;
    case CaseId::A4:
      delta = std::min(delta, 0.5 * c_y);
      nominal = {c_y, 0.0};
      offset = {c_y - delta, delta};
      break;
    case CaseId::B1:
      delta = std::min(delta, 0.5 * (1.0 - c_y));
      nominal = {c_y, 1.0};
      offset = {c_y + delta, 1.0 - delta};
      break;
    case CaseId::B4:
      // (0.5 + delta, delta) gives a negative T_x here; the target side is x < 1/2.
      nominal = {0.5, 0.0};
      offset = {0.5 - delta, delta};
      break;
    default:
      throw InternalConsistency("unexpected optimal-control case");
  }

  const StrategyProfile start = best_high ? StrategyProfile{1.0 - delta, 1.0 - delta} : StrategyProfile{delta, delta};
  const TemperaturePair initial = positive_first_form(d, start);
  const TemperaturePair goal = positive_first_form(d, offset);

  ScheduleBuilder b(initial);
  switch (plan.case_id) {
    case CaseId::A1:
    case CaseId::A3:
    case CaseId::A3prime:
    case CaseId::B4:
      b.tx(goal.t_x, " to the target");
      b.ty(goal.t_y, " to the target");
      break;
    case CaseId::B3: {
      const double t_i = threshold_temps(d).t_i;
      const double hold = b.cur.t_y < t_i ? b.cur.t_y : std::max(kMinTemperature, 0.5 * t_i);
      b.ty(hold, " below T_I");
      const double tc = critical_temperature(d, hold);
      if (tc > 0.0) b.tx(std::max(b.cur.t_x, (1.0 + opts.margin) * tc), " above T_C");
      b.tx(goal.t_x, " to the target");
      b.ty(goal.t_y, " to the target");
      break;
    }
    default:  // A2, A4, B1, B2
      b.ty(goal.t_y, " to the target");
      b.tx(goal.t_x, " to the target");
      break;
  }
  plan.schedule = b.schedule;

  const Orientation& o = d.orientation;
  plan.target_state = o.to_original(nominal);
  plan.offset_target = o.to_original(offset);
  plan.initial_state = o.to_original(start);
  plan.expected_sw = social_welfare(game, plan.target_state);
  plan.best_ne_sw = f.best_ne_sw;
  plan.improved_expected = plan.expected_sw > plan.best_ne_sw;
  return plan;
}

ExecutionReport execute(const MechanismPlan& plan, const PayoffMatrices& game, StrategyProfile init,
                        const IntegratorConfig& cfg) {
  game.validate();
  const DiagonalForm d = diagonal_form(game);
  const Orientation& o = d.orientation;
  Trajectory traj = integrate_schedule(d, o.to_normalized(init), plan.schedule, cfg);

  ExecutionReport rep;
  rep.trajectory = to_original(std::move(traj), game, o);
  rep.final_state = rep.trajectory.final_state();
  rep.final_sw = social_welfare(game, rep.final_state);
  // The endpoint is only known to within final_residual of its rest point in
  // each coordinate, so the comparison allows the matching welfare slack.
  const double slack = 1e-9 + welfare_lipschitz(game) * rep.trajectory.final_residual;
  rep.improved = rep.final_sw > plan.best_ne_sw - slack;
  for (const PhaseMark& m : rep.trajectory.phases) {
    const TrajectoryRow& r = rep.trajectory.rows.at(m.row);
    rep.phase_endpoints.push_back({m.label, {r.x, r.y}, {r.t_x, r.t_y}});
  }
  return rep;
}

std::vector<TaxRow> taxation_view(const TemperatureSchedule& schedule, double base_temp) {
  if (!(base_temp > 0.0) || !std::isfinite(base_temp)) throw InvalidArgument("base temperature must be positive");
  const auto row = [&](const std::string& label, TemperaturePair t) {
    if (t.t_x < base_temp || t.t_y < base_temp)
      throw NegativeTax("phase '" + label + "' needs a temperature below the base temperature (a subsidy)");
    return TaxRow{label, 1.0 - base_temp / t.t_x, 1.0 - base_temp / t.t_y};
  };
  std::vector<TaxRow> out;
  out.push_back(row("initial", schedule.initial));
  const auto ends = schedule.phase_ends();
  for (std::size_t i = 0; i < ends.size(); ++i) out.push_back(row(schedule.phases[i].label, ends[i]));
  return out;
}

}  // namespace qbif
