#pragma once

// 2x2 bimatrix games: payoff representation, the diagonal (payoff-difference)
// form, Nash equilibria and welfare metrics.

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace qbif {

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Payoffs of a two-player, two-action game.
///
/// `A[i][j]` is player 1's payoff when player 1 plays action i and player 2
/// plays action j. `B[i][j]` is player 2's payoff when player 2 plays i and
/// player 1 plays j, so the rows of B are indexed by player 2's own action.
struct PayoffMatrices {
  Matrix2 A{};
  Matrix2 B{};

  /// Throws InvalidArgument if any entry is not finite.
  void validate() const;
};

/// x = P(player 1 plays action 1), y = P(player 2 plays action 1).
struct StrategyProfile {
  double x = 0.5;
  double y = 0.5;

  friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;
};

/// Action relabelings applied while normalizing the diagonal form. Each swap
/// is an involution, so the same map converts in both directions.
struct Orientation {
  bool swap_x = false;  // player 1's two actions exchanged
  bool swap_y = false;  // player 2's two actions exchanged

  StrategyProfile to_normalized(StrategyProfile p) const { return flip(p); }
  StrategyProfile to_original(StrategyProfile p) const { return flip(p); }

  /// The same game with the recorded relabelings applied to its matrices.
  PayoffMatrices relabel(const PayoffMatrices& game) const;

  friend bool operator==(const Orientation&, const Orientation&) = default;

 private:
  StrategyProfile flip(StrategyProfile p) const {
    if (swap_x) p.x = 1.0 - p.x;
    if (swap_y) p.y = 1.0 - p.y;
    return p;
  }
};

/// The four payoff differences that drive the learning dynamics:
/// a_x = a11-a21, b_x = a22-a12, a_y = b11-b21, b_y = b22-b12, taken after
/// relabeling actions so that a_x > 0 and |a_x| >= |b_x| (when the game is
/// not constant in player 1's payoffs).
struct DiagonalForm {
  double a_x = 0.0;
  double b_x = 0.0;
  double a_y = 0.0;
  double b_y = 0.0;
  Orientation orientation;

  /// diag(a_x, b_x), diag(a_y, b_y) in normalized action labels.
  PayoffMatrices as_game() const;

  /// a_x == b_x together with a_y == b_y: the bifurcation analysis assumes
  /// this combination does not occur.
  bool doubly_degenerate() const { return a_x == b_x && a_y == b_y; }
};

enum class GameClass {
  Coordination,     // b_x >= 0, a_y + b_y > 0
  MixedPreference,  // b_x >= 0, a_y + b_y < 0
  ZeroSum2,         // b_x >= 0, a_y + b_y = 0
  Dominant,         // b_x < 0: player 1's first action dominates
};

struct Classification {
  GameClass tag = GameClass::Coordination;
  // All four diagonal values strictly positive (two strict pure equilibria).
  bool strict_coordination = false;
};

struct WelfareOptimum {
  StrategyProfile profile;
  double welfare = 0.0;
};

struct Efficiency {
  double poa = 0.0;
  double pos = 0.0;
};

DiagonalForm diagonal_form(const PayoffMatrices& game);

/// Expected total payoff at a mixed profile, always on the given matrices.
double social_welfare(const PayoffMatrices& game, StrategyProfile profile);

/// Corner profiles at which neither player strictly gains by deviating.
/// Sorted ascending by (x, y).
std::vector<StrategyProfile> pure_nash(const PayoffMatrices& game);

/// The interior indifference point (x*, y*) in normalized labels, when it
/// exists and lies strictly inside the unit square.
std::optional<StrategyProfile> mixed_nash(const DiagonalForm& diag);

/// Welfare is bilinear, so the optimum sits on a corner. Ties go to the
/// lexicographically largest (x, y).
WelfareOptimum max_welfare(const PayoffMatrices& game);

/// PoA = max SW / min equilibrium SW, PoS = max SW / max equilibrium SW.
/// Throws UndefinedRatio when any involved welfare is not positive and
/// InvalidArgument on an empty equilibrium set.
Efficiency poa_pos(const PayoffMatrices& game, std::span<const StrategyProfile> equilibria);

Classification classify(const DiagonalForm& diag);

std::string_view to_string(GameClass tag);

}  // namespace qbif
