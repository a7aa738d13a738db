#pragma once

// Quantal response equilibria of the diagonal game: fixed-point conditions,
// the two temperature representations, local stability and enumeration.

#include <utility>
#include <vector>

#include "qbif/game.hpp"

namespace qbif {

/// Floor used wherever a schedule or analysis would otherwise take T -> 0.
inline constexpr double kMinTemperature = 1e-3;

struct TemperaturePair {
  double t_x = 1.0;
  double t_y = 1.0;

  /// Throws InvalidArgument unless both are finite and >= kMinTemperature.
  void validate() const;
};

enum class Stability { Stable, Unstable, Indeterminate };

const char* to_string(Stability s);

struct QrePoint {
  double x = 0.5;
  double y = 0.5;
  double t_x = 1.0;
  double t_y = 1.0;
  Stability stability = Stability::Indeterminate;
  // Logit coordinates of the point; exact even where x or y rounds to 0 or 1.
  double u = 0.0;
  double v = 0.0;
};

/// T_X^II and friends at one x for a fixed T_y.
struct SecondFormSample {
  double x = 0.5;
  double y_ii = 0.5;    // player 2's logit response to x
  double t_x_ii = 0.0;  // the T_x that makes (x, y_ii) a QRE
  double dT_dx = 0.0;
  double L_val = 0.0;
  double u = 0.0;  // logit(x)
};

/// Payoff advantage of action 1 for each player: a*p - b*(1-p).
inline double payoff_gap_x(const DiagonalForm& d, double y) { return (d.a_x + d.b_x) * y - d.b_x; }
inline double payoff_gap_y(const DiagonalForm& d, double x) { return (d.a_y + d.b_y) * x - d.b_y; }

/// Boltzmann response of each player to the other's current mix.
StrategyProfile qre_response(const DiagonalForm& diag, StrategyProfile profile, TemperaturePair temps);

/// Temperatures at which (x, y) is a QRE. Either value may be negative,
/// meaning no positive temperature supports that coordinate.
/// Throws SingularityError at x == 1/2 or y == 1/2.
TemperaturePair first_form_temps(const DiagonalForm& diag, double x, double y);

/// Throws SingularityError at x == 1/2.
SecondFormSample second_form(const DiagonalForm& diag, double x, double t_y);

/// Same quantities parameterized by u = logit(x); usable where x saturates.
/// Throws SingularityError at u == 0.
SecondFormSample second_form_logit(const DiagonalForm& diag, double u, double t_y);

/// Sign rule on dT_dx: stable iff it points away from x = 1/2 (u = logit x).
/// Indeterminate when |dT_dx| < 1e-10.
Stability slope_stability(double dT_dx, double u);

Stability stability(const DiagonalForm& diag, double x, double t_y);
Stability stability_logit(const DiagonalForm& diag, double u, double t_y);

/// Real parts of the eigenvalues of the simplex-coordinate Jacobian,
/// larger first.
std::pair<double, double> jacobian_eigen_realparts(const DiagonalForm& diag, StrategyProfile profile,
                                                   TemperaturePair temps);

/// All QREs at the given temperatures, sorted by x. grid_n >= 100.
std::vector<QrePoint> enumerate_qre(const DiagonalForm& diag, TemperaturePair temps, int grid_n = 4096);

}  // namespace qbif
