#include "qbif/game.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "qbif/error.hpp"

namespace qbif {

void PayoffMatrices::validate() const {
  for (const Matrix2* m : {&A, &B})
    for (const auto& row : *m)
      for (double v : row)
        if (!std::isfinite(v)) throw InvalidArgument("payoff entries must be finite");
}

namespace {

Matrix2 swap_rows(Matrix2 m) {
  std::swap(m[0], m[1]);
  return m;
}

Matrix2 swap_cols(Matrix2 m) {
  for (auto& row : m) std::swap(row[0], row[1]);
  return m;
}

}  // namespace

PayoffMatrices Orientation::relabel(const PayoffMatrices& game) const {
  PayoffMatrices out = game;
  // Player 1's action is A's row and B's column; player 2's is the reverse.
  if (swap_x) {
    out.A = swap_rows(out.A);
    out.B = swap_cols(out.B);
  }
  if (swap_y) {
    out.A = swap_cols(out.A);
    out.B = swap_rows(out.B);
  }
  return out;
}

PayoffMatrices DiagonalForm::as_game() const {
  PayoffMatrices g;
  g.A = {{{a_x, 0.0}, {0.0, b_x}}};
  g.B = {{{a_y, 0.0}, {0.0, b_y}}};
  return g;
}

DiagonalForm diagonal_form(const PayoffMatrices& game) {
  const auto& A = game.A;
  const auto& B = game.B;
  DiagonalForm d;
  d.a_x = A[0][0] - A[1][0];
  d.b_x = A[1][1] - A[0][1];
  d.a_y = B[0][0] - B[1][0];
  d.b_y = B[1][1] - B[0][1];

  if (std::abs(d.a_x) < std::abs(d.b_x)) {
    // Exchange player 2's actions.
    d = DiagonalForm{-d.b_x, -d.a_x, -d.a_y, -d.b_y, d.orientation};
    d.orientation.swap_y = true;
  }
  if (d.a_x < 0.0) {
    // Exchange player 1's actions.
    d = DiagonalForm{-d.a_x, -d.b_x, -d.b_y, -d.a_y, d.orientation};
    d.orientation.swap_x = true;
  }
  return d;
}

double social_welfare(const PayoffMatrices& game, StrategyProfile p) {
  const auto& A = game.A;
  const auto& B = game.B;
  const double x = p.x, y = p.y;
  return x * y * (A[0][0] + B[0][0]) + x * (1 - y) * (A[0][1] + B[1][0]) +
         y * (1 - x) * (A[1][0] + B[0][1]) + (1 - x) * (1 - y) * (A[1][1] + B[1][1]);
}

std::vector<StrategyProfile> pure_nash(const PayoffMatrices& game) {
  std::vector<StrategyProfile> out;
  // Action index 0 is "action 1", i.e. probability 1.
  for (int i : {1, 0}) {
    for (int j : {1, 0}) {
      const bool p1_ok = game.A[i][j] >= game.A[1 - i][j];
      const bool p2_ok = game.B[j][i] >= game.B[1 - j][i];
      if (p1_ok && p2_ok)
        out.push_back({i == 0 ? 1.0 : 0.0, j == 0 ? 1.0 : 0.0});
    }
  }
  return out;
}

std::optional<StrategyProfile> mixed_nash(const DiagonalForm& d) {
  const double sx = d.a_x + d.b_x;
  const double sy = d.a_y + d.b_y;
  if (sx == 0.0 || sy == 0.0) return std::nullopt;
  const StrategyProfile p{d.b_y / sy, d.b_x / sx};
  if (p.x <= 0.0 || p.x >= 1.0 || p.y <= 0.0 || p.y >= 1.0) return std::nullopt;
  return p;
}

WelfareOptimum max_welfare(const PayoffMatrices& game) {
  WelfareOptimum best{{1.0, 1.0}, social_welfare(game, {1.0, 1.0})};
  for (StrategyProfile c : {StrategyProfile{1, 0}, StrategyProfile{0, 1}, StrategyProfile{0, 0}}) {
    const double w = social_welfare(game, c);
    if (w > best.welfare) best = {c, w};
  }
  return best;
}

Efficiency poa_pos(const PayoffMatrices& game, std::span<const StrategyProfile> equilibria) {
  if (equilibria.empty()) throw InvalidArgument("poa_pos: equilibrium set is empty");
  const double opt = max_welfare(game).welfare;
  double lo = social_welfare(game, equilibria.front());
  double hi = lo;
  for (const auto& e : equilibria) {
    const double w = social_welfare(game, e);
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  if (opt <= 0.0 || lo <= 0.0)
    throw UndefinedRatio("PoA/PoS undefined: welfare values must be positive");
  return {opt / lo, opt / hi};
}

Classification classify(const DiagonalForm& d) {
  Classification c;
  const double s = d.a_y + d.b_y;
  if (d.b_x < 0.0)
    c.tag = GameClass::Dominant;
  else if (s > 0.0)
    c.tag = GameClass::Coordination;
  else if (s < 0.0)
    c.tag = GameClass::MixedPreference;
  else
    c.tag = GameClass::ZeroSum2;
  c.strict_coordination = d.a_x > 0 && d.b_x > 0 && d.a_y > 0 && d.b_y > 0;
  return c;
}

std::string_view to_string(GameClass tag) {
  switch (tag) {
    case GameClass::Coordination: return "Coordination";
    case GameClass::MixedPreference: return "MixedPreference";
    case GameClass::ZeroSum2: return "ZeroSum2";
    case GameClass::Dominant: return "Dominant";
  }
  return "?";
}

}  // namespace qbif
