#include "qbif/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "numeric.hpp"
#include "qbif/error.hpp"

namespace qbif {

using detail::clamp_prob;
using detail::logistic;

StrategyProfile Trajectory::final_state() const {
  if (rows.empty()) throw InvalidArgument("empty trajectory");
  return {rows.back().x, rows.back().y};
}

void IntegratorConfig::validate() const {
  if (!(step > 0.0 && step <= 0.1)) throw InvalidArgument("integrator step must lie in (0, 0.1]");
  if (!(max_time > 0.0) || !std::isfinite(max_time)) throw InvalidArgument("max_time must be positive");
  if (!(residual_tol > 0.0)) throw InvalidArgument("residual_tol must be positive");
  if (record_every < 1) throw InvalidArgument("record_every must be >= 1");
}

void DiscreteAgentConfig::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in [0, 1)");
  if (horizon < 0) throw InvalidArgument("horizon must be non-negative");
  for (const auto& q : initial_q)
    for (double v : q)
      if (!std::isfinite(v)) throw InvalidArgument("initial Q-values must be finite");
}

const char* to_string(Which w) {
  switch (w) {
    case Which::Tx: return "Tx";
    case Which::Ty: return "Ty";
    case Which::Both: return "Both";
  }
  return "?";
}

Which which_from_string(const std::string& s) {
  if (s == "Tx") return Which::Tx;
  if (s == "Ty") return Which::Ty;
  if (s == "Both") return Which::Both;
  throw InvalidArgument("unknown schedule target '" + s + "' (expected Tx, Ty or Both)");
}

namespace {

TemperaturePair apply_phase(TemperaturePair cur, const SchedulePhase& p) {
  if (p.which != Which::Ty) cur.t_x = p.target;
  if (p.which != Which::Tx) cur.t_y = p.target;
  return cur;
}

}  // namespace

void TemperatureSchedule::validate() const {
  initial.validate();
  for (const auto& p : phases)
    if (!std::isfinite(p.target) || p.target < kMinTemperature)
      throw InvalidArgument("schedule phase '" + p.label + "' targets a temperature below the minimum");
}

std::vector<TemperaturePair> TemperatureSchedule::phase_ends() const {
  std::vector<TemperaturePair> out;
  TemperaturePair cur = initial;
  for (const auto& p : phases) out.push_back(cur = apply_phase(cur, p));
  return out;
}

std::pair<double, double> vector_field(const DiagonalForm& d, StrategyProfile p, TemperaturePair temps) {
  const double x = clamp_prob(p.x);
  const double y = clamp_prob(p.y);
  return {x * (1.0 - x) * (payoff_gap_x(d, y) - temps.t_x * detail::logit(x)),
          y * (1.0 - y) * (payoff_gap_y(d, x) - temps.t_y * detail::logit(y))};
}

std::pair<double, double> logit_field(const DiagonalForm& d, double u, double v, TemperaturePair temps) {
  return {payoff_gap_x(d, logistic(v)) - temps.t_x * u, payoff_gap_y(d, logistic(u)) - temps.t_y * v};
}

double entropy(StrategyProfile p) {
  const auto h = [](double q) {
    q = clamp_prob(q);
    return -q * std::log(q) - (1.0 - q) * std::log1p(-q);
  };
  return h(p.x) + h(p.y);
}

namespace {

struct State {
  double u = 0.0;
  double v = 0.0;
};

// Simplex-space distance to the linearized rest point: one Newton step on
// the logit field, measured after mapping both ends back to probabilities.
double newton_residual(const DiagonalForm& d, State s, double fu, double fv, TemperaturePair temps) {
  const double x = logistic(s.u), y = logistic(s.v);
  const double j12 = (d.a_x + d.b_x) * y * (1.0 - y);
  const double j21 = (d.a_y + d.b_y) * x * (1.0 - x);
  const double det = temps.t_x * temps.t_y - j12 * j21;
  if (!(std::abs(det) > 0.0)) return std::numeric_limits<double>::infinity();
  // J = [[-T_x, j12], [j21, -T_y]], delta = -J^{-1} F.
  const double du = (temps.t_y * fu + j12 * fv) / det;
  const double dv = (j21 * fu + temps.t_x * fv) / det;
  return std::max(std::abs(logistic(s.u + du) - x), std::abs(logistic(s.v + dv) - y));
}

class Stepper {
 public:
  Stepper(const DiagonalForm& d, const IntegratorConfig& cfg, Trajectory& traj)
      : d_(d), cfg_(cfg), traj_(traj) {}

  TrajectoryRow row(double t, State s, TemperaturePair temps) const {
    TrajectoryRow r;
    r.t = t;
    r.x = clamp_prob(logistic(s.u));
    r.y = clamp_prob(logistic(s.v));
    r.t_x = temps.t_x;
    r.t_y = temps.t_y;
    r.entropy = entropy({r.x, r.y});
    return r;
  }

  // Integrates at fixed temperatures until converged or out of time.
  // Returns whether the state converged.
  bool relax(State& s, double& t, TemperaturePair temps, long min_steps) {
    const double size = temps.t_x + temps.t_y + 0.25 * std::abs(d_.a_x + d_.b_x) + 0.25 * std::abs(d_.a_y + d_.b_y);
    const double h = std::min(cfg_.step, 0.5 / size);
    const long max_steps = static_cast<long>(std::ceil(cfg_.max_time / h));

    const auto f = [&](State q) {
      const auto [fu, fv] = logit_field(d_, q.u, q.v, temps);
      return State{fu, fv};
    };

    bool recorded_last = true;
    for (long k = 0;; ++k) {
      const State k1 = f(s);
      const double res = newton_residual(d_, s, k1.u, k1.v, temps);
      traj_.final_residual = res;
      if (k >= min_steps && res < cfg_.residual_tol) {
        finish(s, t, temps, recorded_last);
        return true;
      }
      if (k >= max_steps) {
        finish(s, t, temps, recorded_last);
        return false;
      }
      const State k2 = f({s.u + 0.5 * h * k1.u, s.v + 0.5 * h * k1.v});
      const State k3 = f({s.u + 0.5 * h * k2.u, s.v + 0.5 * h * k2.v});
      const State k4 = f({s.u + h * k3.u, s.v + h * k3.v});
      s.u += h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
      s.v += h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
      t += h;
      if (!std::isfinite(s.u) || !std::isfinite(s.v)) {
        std::ostringstream msg;
        msg << "integration produced a non-finite state at t = " << t;
        throw IntegrationDiverged(msg.str());
      }
      recorded_last = (k + 1) % cfg_.record_every == 0;
      if (recorded_last) traj_.rows.push_back(row(t, s, temps));
    }
  }

 private:
  void finish(State s, double t, TemperaturePair temps, bool recorded_last) {
    if (!recorded_last) traj_.rows.push_back(row(t, s, temps));
    traj_.final_u = s.u;
    traj_.final_v = s.v;
  }

  const DiagonalForm& d_;
  const IntegratorConfig& cfg_;
  Trajectory& traj_;
};

State initial_state(StrategyProfile init) {
  return {detail::logit(init.x), detail::logit(init.y)};
}

void require_interior(StrategyProfile p) {
  if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0))
    throw InvalidArgument("initial state must lie in the unit square");
}

}  // namespace

Trajectory integrate(const DiagonalForm& d, StrategyProfile init, TemperaturePair temps, const IntegratorConfig& cfg) {
  cfg.validate();
  temps.validate();
  require_interior(init);
  Trajectory traj;
  Stepper stepper(d, cfg, traj);
  State s = initial_state(init);
  double t = 0.0;
  traj.rows.push_back(stepper.row(t, s, temps));
  traj.converged = stepper.relax(s, t, temps, 0);
  return traj;
}

Trajectory integrate_schedule(const DiagonalForm& d, StrategyProfile init, const TemperatureSchedule& schedule,
                              const IntegratorConfig& cfg) {
  cfg.validate();
  schedule.validate();
  require_interior(init);
  Trajectory traj;
  Stepper stepper(d, cfg, traj);
  State s = initial_state(init);
  double t = 0.0;
  TemperaturePair cur = schedule.initial;
  traj.rows.push_back(stepper.row(t, s, cur));

  const auto stalled = [&](const std::string& label) {
    std::ostringstream msg;
    msg << "schedule stalled in phase '" << label << "' at T_x = " << cur.t_x << ", T_y = " << cur.t_y;
    return ScheduleStalled(msg.str());
  };

  if (!stepper.relax(s, t, cur, 0)) throw stalled("initial");
  traj.phases.push_back({"initial", traj.rows.size() - 1});

  const double max_ratio = std::log(1.05);
  for (const auto& phase : schedule.phases) {
    const TemperaturePair from = cur;
    const TemperaturePair to = apply_phase(cur, phase);
    const double lx = std::log(to.t_x / from.t_x);
    const double ly = std::log(to.t_y / from.t_y);
    const int n = static_cast<int>(std::ceil(std::max(std::abs(lx), std::abs(ly)) / max_ratio - 1e-12));
    for (int k = 1; k <= n; ++k) {
      const double f = static_cast<double>(k) / n;
      cur = k == n ? to : TemperaturePair{from.t_x * std::exp(lx * f), from.t_y * std::exp(ly * f)};
      if (!stepper.relax(s, t, cur, 1)) throw stalled(phase.label);
    }
    cur = to;
    traj.phases.push_back({phase.label, traj.rows.size() - 1});
  }
  traj.converged = true;
  return traj;
}

std::array<double, 2> initial_q(double p, double t) {
  p = clamp_prob(p);
  return {t * std::log(p), t * std::log1p(-p)};
}

Trajectory simulate_discrete_q(const PayoffMatrices& game, TemperaturePair temps, const DiscreteAgentConfig& cfg) {
  game.validate();
  temps.validate();
  cfg.validate();
  auto q = cfg.initial_q;
  const auto boltzmann = [](const std::array<double, 2>& qa, double t) {
    return logistic((qa[0] - qa[1]) / t);
  };

  Trajectory traj;
  traj.rows.reserve(static_cast<std::size_t>(cfg.horizon) + 1);
  const auto record = [&](long round, double x, double y) {
    TrajectoryRow r;
    r.t = static_cast<double>(round) * cfg.alpha / temps.t_x;
    r.x = x;
    r.y = y;
    r.t_x = temps.t_x;
    r.t_y = temps.t_y;
    r.sw = social_welfare(game, {x, y});
    r.entropy = entropy({x, y});
    traj.rows.push_back(r);
  };

  double x = boltzmann(q[0], temps.t_x);
  double y = boltzmann(q[1], temps.t_y);
  record(0, x, y);
  for (long round = 1; round <= cfg.horizon; ++round) {
    for (int a = 0; a < 2; ++a) {
      const double r1 = game.A[a][0] * y + game.A[a][1] * (1.0 - y);
      const double r2 = game.B[a][0] * x + game.B[a][1] * (1.0 - x);
      q[0][a] += cfg.alpha * (r1 - q[0][a]);
      q[1][a] += cfg.alpha * (r2 - q[1][a]);
    }
    x = boltzmann(q[0], temps.t_x);
    y = boltzmann(q[1], temps.t_y);
    record(round, x, y);
  }
  traj.converged = false;
  traj.final_u = (q[0][0] - q[0][1]) / temps.t_x;
  traj.final_v = (q[1][0] - q[1][1]) / temps.t_y;
  return traj;
}

Trajectory to_original(Trajectory traj, const PayoffMatrices& game, const Orientation& o) {
  for (auto& r : traj.rows) {
    const StrategyProfile p = o.to_original({r.x, r.y});
    r.x = p.x;
    r.y = p.y;
    r.sw = social_welfare(game, p);
  }
  if (o.swap_x) traj.final_u = -traj.final_u;
  if (o.swap_y) traj.final_v = -traj.final_v;
  return traj;
}

}  // namespace qbif
