#include "qbif/bifurcation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "numeric.hpp"
#include "qbif/error.hpp"

namespace qbif {

using detail::logistic;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::array<double, 6> kProbes{0.01, 0.1, 1.0, 10.0, 100.0, 1000.0};

// b_x - (a_x + b_x) L(x): numerator of dT_X^II/dx. Its zeros are folds.
double fold_numerator(const DiagonalForm& d, double u, double t_y) {
  const double x = logistic(u);
  const double xm = x * logistic(-u);
  const double y = logistic(payoff_gap_y(d, x) / t_y);
  const double L = y - xm * u * y * (1.0 - y) * (d.a_y + d.b_y) / t_y;
  return d.b_x - (d.a_x + d.b_x) * L;
}

double second_form_t(const DiagonalForm& d, double u, double t_y) {
  const double y = logistic(payoff_gap_y(d, logistic(u)) / t_y);
  return payoff_gap_x(d, y) / u;
}

// Strictly positive u values, dense near 0 and reaching `bound`, merged with
// the logit image of a uniform x grid. Points within 1e-9 of x = 1/2 are
// dropped.
std::vector<double> half_grid(double bound, double scale, int n) {
  std::vector<double> g;
  g.reserve(2 * static_cast<std::size_t>(n) + 1);
  const double c = std::asinh(bound / scale) / n;
  for (int k = 1; k <= n; ++k) g.push_back(scale * std::sinh(c * k));
  for (int k = 1; k <= n; ++k) {
    const double x = 0.5 + 0.5 * static_cast<double>(k) / (n + 1);
    g.push_back(detail::logit(x));
  }
  std::sort(g.begin(), g.end());
  g.erase(std::remove_if(g.begin(), g.end(), [&](double u) { return u < 4e-9 || u > bound; }), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

double max_reach(const DiagonalForm& d) { return std::max(std::abs(d.a_x), std::abs(d.b_x)); }

bool brackets(const std::vector<SecondFormSample>& s, double probe) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double a = s[i - 1].t_x_ii - probe;
    const double b = s[i].t_x_ii - probe;
    if (a == 0.0 || b == 0.0 || (a < 0.0) != (b < 0.0)) return true;
  }
  return false;
}

int probe_coverage(const BranchCurve& b) {
  int n = 0;
  for (double p : kProbes) n += brackets(b.samples, p) ? 1 : 0;
  return n;
}

double pole_distance(const BranchCurve& b) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : b.samples) m = std::min(m, std::abs(s.u));
  return m;
}

void fill_stable_segments(BranchCurve& b) {
  bool open = false;
  Interval cur;
  for (const auto& s : b.samples) {
    const bool st = slope_stability(s.dT_dx, s.u) == Stability::Stable;
    if (st && !open) {
      cur = {s.x, s.x};
      open = true;
    } else if (st) {
      cur.hi = s.x;
    } else if (open) {
      b.stable_segments.push_back(cur);
      open = false;
    }
  }
  if (open) b.stable_segments.push_back(cur);
}

}  // namespace

const BranchCurve& BifurcationDiagram::principal() const {
  for (const auto& b : branches)
    if (b.is_principal) return b;
  throw InternalConsistency("diagram has no principal branch");
}

ThresholdTemps threshold_temps(const DiagonalForm& d) {
  ThresholdTemps t;
  if (d.b_x < 0.0 || d.a_x <= 0.0) {
    t.t_i = t.t_b = t.t_a = kNaN;
    t.degenerate = true;
    return t;
  }
  const double ln_r = std::log(d.a_x / d.b_x);  // +inf when b_x == 0
  t.degenerate = !(ln_r > 0.0) || !std::isfinite(ln_r);
  const auto floor0 = [](double v) { return std::isnan(v) ? v : std::max(0.0, v); };
  t.t_i = floor0((d.b_y - d.a_y) / (2.0 * ln_r));
  t.t_b = d.b_y / ln_r;
  t.t_a = floor0(-d.a_y / ln_r);
  return t;
}

BoundaryPoints boundary_points(const DiagonalForm& d, double t_y) {
  if (d.b_x < 0.0) throw UnsupportedCase("boundary points are defined for b_x >= 0 only");
  BoundaryPoints bp;
  const double sy = d.a_y + d.b_y;
  if (sy == 0.0) return bp;
  const double ln_r = std::log(d.a_x / d.b_x);
  const double z = (d.b_y - t_y * ln_r) / sy;
  const auto unit = [](double v) { return std::clamp(v, 0.0, 1.0); };
  if (sy > 0.0) {
    bp.x1 = unit(std::min(0.5, z));
    bp.x2 = unit(std::max(0.5, z));
  } else {
    const double t_i = threshold_temps(d).t_i;
    bp.x3 = t_y < t_i ? std::max(0.0, z) : std::min(1.0, z);
    bp.x3 = unit(*bp.x3);
  }
  return bp;
}

double critical_temperature(const DiagonalForm& d, double t_y) {
  if (d.b_x < 0.0) throw UnsupportedCase("critical temperature is defined for b_x >= 0 only");
  TemperaturePair{kMinTemperature, t_y}.validate();
  if (d.a_y + d.b_y <= 0.0) return 0.0;  // QRE is unique at every temperature

  // Folds with T >= kMinTemperature sit inside |u| <= max|a|/kMinTemperature.
  const double bound = 1.01 * max_reach(d) / kMinTemperature + 1.0;
  const std::vector<double> right = half_grid(bound, 1e-6, 4096);
  double best = 0.0;
  for (double sign : {-1.0, 1.0}) {
    const auto n_of = [&](double u) { return fold_numerator(d, sign * u, t_y); };
    double u0 = right.front();
    double n0 = n_of(u0);
    for (std::size_t i = 1; i < right.size(); ++i) {
      const double u1 = right[i];
      const double n1 = n_of(u1);
      if (n0 != 0.0 && n1 != 0.0 && (n0 < 0.0) != (n1 < 0.0)) {
        const double r = detail::bisect(n_of, u0, u1, n0, 1e-13 * std::max(1.0, u1));
        const double t = second_form_t(d, sign * r, t_y);
        if (std::isfinite(t)) best = std::max(best, t);
      }
      u0 = u1;
      n0 = n1;
    }
  }
  return best;
}

BifurcationDiagram trace_diagram(const DiagonalForm& d, double t_y, int grid_n) {
  if (grid_n < 256) throw InvalidArgument("trace_diagram: grid_n must be at least 256");
  TemperaturePair{kMinTemperature, t_y}.validate();

  BifurcationDiagram diag;
  diag.t_y = t_y;
  diag.thresholds = threshold_temps(d);
  if (d.b_x >= 0.0) diag.critical_temp = critical_temperature(d, t_y);

  // Reach T_x well below the smallest probe on every branch.
  const double bound = std::max(50.0, 1.2 * max_reach(d) / 0.005);
  const std::vector<double> grid = half_grid(bound, 1e-7, grid_n);

  for (Side side : {Side::LeftOfHalf, Side::RightOfHalf}) {
    const double sign = side == Side::LeftOfHalf ? -1.0 : 1.0;
    std::vector<double> us;
    us.reserve(grid.size());
    for (double g : grid) us.push_back(sign * g);
    std::sort(us.begin(), us.end());

    BranchCurve cur;
    cur.side = side;
    double prev_slope = 0.0;
    const auto flush = [&] {
      if (cur.samples.size() >= 2) diag.branches.push_back(std::move(cur));
      cur = BranchCurve{};
      cur.side = side;
    };
    for (double u : us) {
      const SecondFormSample s = second_form_logit(d, u, t_y);
      if (!(s.t_x_ii > 0.0) || !std::isfinite(s.t_x_ii)) {
        flush();
        continue;
      }
      const double slope = std::abs((d.b_x - (d.a_x + d.b_x) * s.L_val) / (u * u));
      if (!cur.samples.empty()) {
        const SecondFormSample& p = cur.samples.back();
        const double jump = std::abs(s.t_x_ii - p.t_x_ii);
        if (!(jump < 10.0 * std::max(slope, prev_slope) * (u - p.u) + 1.0)) flush();
      }
      cur.samples.push_back(s);
      prev_slope = slope;
    }
    flush();
  }

  for (auto& b : diag.branches) fill_stable_segments(b);

  // Principal branch: covers every probe; otherwise the best coverage, with
  // ties going to the branch that reaches closest to the pole at x = 1/2.
  BranchCurve* pick = nullptr;
  int pick_cov = -1;
  for (auto& b : diag.branches) {
    const int cov = probe_coverage(b);
    if (cov > pick_cov || (cov == pick_cov && pole_distance(b) < pole_distance(*pick))) {
      pick = &b;
      pick_cov = cov;
    }
  }
  if (pick != nullptr) pick->is_principal = true;
  return diag;
}

bool AchievableRegion::contains(double x, double y) const {
  // Closed set; the slack absorbs the 1 - (1 - v) round trip of a relabel.
  constexpr double tol = 1e-12;
  for (const Rect& r : pieces)
    if (x >= r.x_lo - tol && x <= r.x_hi + tol && y >= r.y_lo - tol && y <= r.y_hi + tol) return true;
  return false;
}

namespace {

using Rect = AchievableRegion::Rect;

// Closed region where one player's first-form temperature is >= 0, as
// rectangles. `s` is the payoff-gap slope, `b` its offset, and `along_x`
// says whether the pole (1/2) is on the x axis (player 1) or the y axis.
std::vector<Rect> nonnegative_temperature_pieces(double s, double b, bool along_x) {
  // Player 1's condition: (x - 1/2)(s*y - b) >= 0.
  std::vector<std::array<double, 4>> raw;  // {pole_lo, pole_hi, other_lo, other_hi}
  if (s == 0.0) {
    if (b > 0.0) raw.push_back({0.0, 0.5, 0.0, 1.0});
    else if (b < 0.0) raw.push_back({0.5, 1.0, 0.0, 1.0});
    else raw.push_back({0.0, 1.0, 0.0, 1.0});
  } else {
    const double c = b / s;
    if (s > 0.0) {
      raw.push_back({0.5, 1.0, c, 1.0});
      raw.push_back({0.0, 0.5, 0.0, c});
    } else {
      raw.push_back({0.5, 1.0, 0.0, c});
      raw.push_back({0.0, 0.5, c, 1.0});
    }
  }
  std::vector<Rect> out;
  for (auto r : raw) {
    r[2] = std::max(0.0, r[2]);
    r[3] = std::min(1.0, r[3]);
    if (r[2] > r[3]) continue;
    out.push_back(along_x ? Rect{r[0], r[1], r[2], r[3]} : Rect{r[2], r[3], r[0], r[1]});
  }
  return out;
}

}  // namespace

AchievableRegion achievable_region(const DiagonalForm& d) {
  AchievableRegion region;
  const double sx = d.a_x + d.b_x;
  const double sy = d.a_y + d.b_y;
  region.c_x = sx != 0.0 ? d.b_x / sx : kNaN;
  region.c_y = sy != 0.0 ? d.b_y / sy : kNaN;
  for (const Rect& p : nonnegative_temperature_pieces(sx, d.b_x, true)) {
    for (const Rect& q : nonnegative_temperature_pieces(sy, d.b_y, false)) {
      const Rect r{std::max(p.x_lo, q.x_lo), std::min(p.x_hi, q.x_hi), std::max(p.y_lo, q.y_lo),
                   std::min(p.y_hi, q.y_hi)};
      if (r.x_lo <= r.x_hi && r.y_lo <= r.y_hi) region.pieces.push_back(r);
    }
  }
  return region;
}

bool is_qre_achievable(const DiagonalForm& d, double x, double y) {
  return achievable_region(d).contains(x, y);
}

std::vector<QrePoint> branch_crossings(const DiagonalForm& d, const BranchCurve& branch, double t_y,
                                       double t_x) {
  std::vector<QrePoint> out;
  const auto g = [&](double u) { return second_form_t(d, u, t_y) - t_x; };
  const auto& s = branch.samples;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double g0 = s[i - 1].t_x_ii - t_x;
    const double g1 = s[i].t_x_ii - t_x;
    if (g0 == 0.0 || (g0 < 0.0) == (g1 < 0.0)) continue;
    const double u = detail::bisect(g, s[i - 1].u, s[i].u, g0, 1e-13 * std::max(1.0, std::abs(s[i].u)));
    QrePoint q;
    q.u = u;
    q.t_x = t_x;
    q.t_y = t_y;
    q.v = payoff_gap_y(d, logistic(u)) / t_y;
    q.x = detail::clamp_prob(logistic(u));
    q.y = detail::clamp_prob(logistic(q.v));
    q.stability = stability_logit(d, u, t_y);
    out.push_back(q);
  }
  std::sort(out.begin(), out.end(),
            [](const QrePoint& a, const QrePoint& b) { return std::abs(a.u) < std::abs(b.u); });
  return out;
}

}  // namespace qbif
