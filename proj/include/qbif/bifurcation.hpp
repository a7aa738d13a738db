#pragma once

#include <optional>
#include <vector>

#include "qbif/game.hpp"
#include "qbif/qre.hpp"

namespace qbif {

/// Structural temperatures of a case-1 (b_x >= 0) diagonal form, with
/// ln r = ln(a_x / b_x):
///   t_i = max(0, (b_y - a_y) / (2 ln r))   side of x = 1/2 holding the principal branch flips here
///   t_b = b_y / ln r                      left-side branch vanishes above this T_y
///   t_a = max(0, -a_y / ln r)             right-side branch vanishes below this T_y
/// `degenerate` is set when ln r is zero or undefined (a_x == b_x, b_x <= 0).
/// Values are IEEE limits where those exist and NaN otherwise.
struct ThresholdTemps {
  double t_i = 0.0;
  double t_b = 0.0;
  double t_a = 0.0;
  bool degenerate = false;
};

enum class Side { LeftOfHalf, RightOfHalf };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// A maximal run of second-form samples with positive T_x on one side of 1/2.
/// Samples are ordered by u = logit(x). Deep in the tails x itself rounds to
/// 0 or 1, so u is the faithful coordinate.
struct BranchCurve {
  std::vector<SecondFormSample> samples;
  Side side = Side::RightOfHalf;
  bool is_principal = false;
  std::vector<Interval> stable_segments;  // in x
};

struct BifurcationDiagram {
  double t_y = 1.0;
  std::vector<BranchCurve> branches;
  ThresholdTemps thresholds;
  std::optional<double> critical_temp;  // absent for dominant-strategy games

  const BranchCurve& principal() const;
};

/// Sign-change boundaries of T_X^II for case-1 games. Results are clamped
/// into [0, 1]; fields that do not apply to the game's case are empty.
struct BoundaryPoints {
  std::optional<double> x1;
  std::optional<double> x2;
  std::optional<double> x3;
};

/// The QRE-achievable set: profiles approachable by QREs at positive
/// temperatures. Stored as the union of up to four closed rectangles.
struct AchievableRegion {
  struct Rect {
    double x_lo, x_hi, y_lo, y_hi;
  };
  std::vector<Rect> pieces;
  double c_x = 0.0;  // b_x / (a_x + b_x): player 1 indifference level of y
  double c_y = 0.0;  // b_y / (a_y + b_y): player 2 indifference level of x

  bool contains(double x, double y) const;
};

ThresholdTemps threshold_temps(const DiagonalForm& diag);

/// Lowest T_x above which the QRE at this T_y is unique: the largest fold
/// temperature of the diagram, or 0 without folds. Throws UnsupportedCase
/// for b_x < 0.
double critical_temperature(const DiagonalForm& diag, double t_y);

BoundaryPoints boundary_points(const DiagonalForm& diag, double t_y);

/// Traces T_X^II over both sides of x = 1/2. grid_n >= 256.
BifurcationDiagram trace_diagram(const DiagonalForm& diag, double t_y, int grid_n = 2048);

AchievableRegion achievable_region(const DiagonalForm& diag);

bool is_qre_achievable(const DiagonalForm& diag, double x, double y);

/// Points of `branch` whose T_X^II equals t_x, sorted by distance to 1/2.
std::vector<QrePoint> branch_crossings(const DiagonalForm& diag, const BranchCurve& branch, double t_y,
                                       double t_x);

}  // namespace qbif
