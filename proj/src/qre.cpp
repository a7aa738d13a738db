#include "qbif/qre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "numeric.hpp"
#include "qbif/error.hpp"

namespace qbif {

using detail::clamp_prob;
using detail::logistic;

void TemperaturePair::validate() const {
  if (!std::isfinite(t_x) || !std::isfinite(t_y) || t_x < kMinTemperature || t_y < kMinTemperature)
    throw InvalidArgument("temperatures must be finite and >= " + std::to_string(kMinTemperature));
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Indeterminate: return "indeterminate";
  }
  return "?";
}

StrategyProfile qre_response(const DiagonalForm& d, StrategyProfile p, TemperaturePair temps) {
  return {logistic(payoff_gap_x(d, p.y) / temps.t_x), logistic(payoff_gap_y(d, p.x) / temps.t_y)};
}

namespace {

void require_open_unit(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument(std::string(name) + " must lie in (0, 1)");
}

// Core of the second form. `ln` is ln(1/x - 1), `xm` is x(1-x).
SecondFormSample second_form_core(const DiagonalForm& d, double x, double xm, double ln, double t_y) {
  const double sx = d.a_x + d.b_x;
  const double sy = d.a_y + d.b_y;
  SecondFormSample s;
  s.x = x;
  s.u = -ln;
  s.y_ii = logistic(payoff_gap_y(d, x) / t_y);
  const double dy_dx = s.y_ii * (1.0 - s.y_ii) * sy / t_y;
  s.L_val = s.y_ii + xm * ln * dy_dx;
  s.t_x_ii = (d.b_x - sx * s.y_ii) / ln;
  const double num = d.b_x - sx * s.L_val;
  const double den = xm * ln * ln;
  if (den > 0.0)
    s.dT_dx = num / den;
  else
    s.dT_dx = num == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), num);
  return s;
}

}  // namespace

Stability slope_stability(double dT_dx, double u) {
  if (!(std::abs(dT_dx) >= 1e-10)) return Stability::Indeterminate;
  return (u < 0.0) == (dT_dx > 0.0) ? Stability::Stable : Stability::Unstable;
}

TemperaturePair first_form_temps(const DiagonalForm& d, double x, double y) {
  require_open_unit(x, "x");
  require_open_unit(y, "y");
  const double lx = detail::log_odds_inv(x);
  const double ly = detail::log_odds_inv(y);
  if (lx == 0.0 || ly == 0.0) throw SingularityError("first form is singular at x = 1/2 or y = 1/2");
  return {-payoff_gap_x(d, y) / lx, -payoff_gap_y(d, x) / ly};
}

SecondFormSample second_form(const DiagonalForm& d, double x, double t_y) {
  require_open_unit(x, "x");
  const double ln = detail::log_odds_inv(x);
  if (ln == 0.0) throw SingularityError("second form is singular at x = 1/2");
  return second_form_core(d, x, x * (1.0 - x), ln, t_y);
}

SecondFormSample second_form_logit(const DiagonalForm& d, double u, double t_y) {
  if (u == 0.0) throw SingularityError("second form is singular at x = 1/2");
  const double x = logistic(u);
  return second_form_core(d, x, x * logistic(-u), -u, t_y);
}

Stability stability(const DiagonalForm& d, double x, double t_y) {
  const SecondFormSample s = second_form(d, x, t_y);
  return slope_stability(s.dT_dx, s.u);
}

Stability stability_logit(const DiagonalForm& d, double u, double t_y) {
  const SecondFormSample s = second_form_logit(d, u, t_y);
  return slope_stability(s.dT_dx, u);
}

std::pair<double, double> jacobian_eigen_realparts(const DiagonalForm& d, StrategyProfile p,
                                                   TemperaturePair temps) {
  const double x = clamp_prob(p.x);
  const double y = clamp_prob(p.y);
  const double f = payoff_gap_x(d, y) - temps.t_x * detail::logit(x);
  const double g = payoff_gap_y(d, x) - temps.t_y * detail::logit(y);
  const double j11 = (1.0 - 2.0 * x) * f - temps.t_x;
  const double j12 = x * (1.0 - x) * (d.a_x + d.b_x);
  const double j21 = y * (1.0 - y) * (d.a_y + d.b_y);
  const double j22 = (1.0 - 2.0 * y) * g - temps.t_y;
  const double half_tr = 0.5 * (j11 + j22);
  const double disc = 0.25 * (j11 - j22) * (j11 - j22) + j12 * j21;
  if (disc < 0.0) return {half_tr, half_tr};
  const double r = std::sqrt(disc);
  return {half_tr + r, half_tr - r};
}

namespace {

// Fixed-point residual in logit coordinates; continuous in u with no pole.
double qre_gap(const DiagonalForm& d, double u, TemperaturePair temps) {
  const double y = logistic(payoff_gap_y(d, logistic(u)) / temps.t_y);
  return payoff_gap_x(d, y) - temps.t_x * u;
}

std::vector<double> scan_grid(double bound, int n) {
  std::vector<double> grid;
  grid.reserve(2 * static_cast<std::size_t>(n) + 3);
  for (int k = 1; k <= n; ++k) {
    const double x = static_cast<double>(k) / (n + 1);
    if (std::abs(x - 0.5) < 1e-9) continue;
    const double u = detail::logit(x);
    if (std::abs(u) < bound) grid.push_back(u);
  }
  // Geometric spacing reaches the saturated tails that a uniform x grid misses.
  const int half = n / 2;
  const double scale = 1e-3;
  const double c = std::asinh(bound / scale) / half;
  for (int k = -half; k <= half; ++k) grid.push_back(scale * std::sinh(c * k));
  grid.push_back(-bound);
  grid.push_back(bound);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

QrePoint make_point(const DiagonalForm& d, double u, TemperaturePair temps) {
  QrePoint q;
  q.u = u;
  q.t_x = temps.t_x;
  q.t_y = temps.t_y;
  q.v = payoff_gap_y(d, logistic(u)) / temps.t_y;
  q.x = clamp_prob(logistic(u));
  q.y = clamp_prob(logistic(q.v));
  q.stability = u == 0.0 ? Stability::Indeterminate : stability_logit(d, u, temps.t_y);
  return q;
}

std::vector<QrePoint> scan_roots(const DiagonalForm& d, TemperaturePair temps, int n) {
  const double reach = std::max(std::abs(d.a_x), std::abs(d.b_x));
  const double bound = 1.01 * reach / temps.t_x + 1.0;
  const std::vector<double> grid = scan_grid(bound, n);
  const auto h = [&](double u) { return qre_gap(d, u, temps); };

  std::vector<double> roots;
  double u0 = grid.front();
  double h0 = h(u0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double u1 = grid[i];
    const double h1 = h(u1);
    if (h0 == 0.0) {
      if (roots.empty() || roots.back() != u0) roots.push_back(u0);
    } else if (h1 != 0.0 && (h0 < 0.0) != (h1 < 0.0)) {
      const double tol = std::max(1e-12, 4e-16 * bound);
      roots.push_back(detail::bisect(h, u0, u1, h0, tol));
    }
    u0 = u1;
    h0 = h1;
  }
  if (h0 == 0.0 && (roots.empty() || roots.back() != u0)) roots.push_back(u0);

  std::vector<QrePoint> out;
  out.reserve(roots.size());
  for (double u : roots) out.push_back(make_point(d, u, temps));
  return out;
}

}  // namespace

std::vector<QrePoint> enumerate_qre(const DiagonalForm& d, TemperaturePair temps, int grid_n) {
  if (grid_n < 100) throw InvalidArgument("enumerate_qre: grid_n must be at least 100");
  temps.validate();
  for (int n : {grid_n, 8 * grid_n}) {
    std::vector<QrePoint> pts = scan_roots(d, temps, n);
    if (!pts.empty()) return pts;  // roots come out in increasing u, hence increasing x
  }
  throw InternalConsistency("enumerate_qre: no fixed point found");
}

}  // namespace qbif
