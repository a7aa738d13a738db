#pragma once

// Shared fixtures and reference implementations for the test binaries.
// The oracles below are written from the defining formulas directly and do
// not call into the library's numerics.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "qbif/game.hpp"
#include "qbif/qre.hpp"

namespace qbif::test {

inline PayoffMatrices coord_game() { return {{{{10, 0}, {0, 5}}}, {{{2, 0}, {0, 4}}}}; }

// Off-diagonal and diagonal payoffs parameterized by eps (own-coordination
// bonus) and eps2 (the (0,0) bonus).
inline PayoffMatrices near_dominant(double eps = 0.1, double eps2 = 0.05) {
  return {{{{eps, 1.0}, {0.0, 1.0 + eps2}}}, {{{1.0 + eps, 0.0}, {1.0, eps2}}}};
}

inline PayoffMatrices zero_game() { return {}; }

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

  PayoffMatrices any_game(double scale = 5.0) {
    PayoffMatrices g;
    for (auto* m : {&g.A, &g.B})
      for (auto& row : *m)
        for (double& v : row) v = uniform(-scale, scale);
    return g;
  }

  /// Diagonal values all positive, a_x > b_x (strictly, well separated).
  DiagonalForm coordination_diag() {
    DiagonalForm d;
    d.a_x = uniform(1.0, 10.0);
    d.b_x = d.a_x * uniform(0.05, 0.9);
    d.a_y = uniform(0.2, 10.0);
    d.b_y = uniform(0.2, 10.0);
    return d;
  }

  /// b_x > 0 and a_y + b_y < 0.
  DiagonalForm mixed_preference_diag() {
    DiagonalForm d;
    d.a_x = uniform(1.0, 10.0);
    d.b_x = d.a_x * uniform(0.05, 0.95);
    d.a_y = uniform(-10.0, 5.0);
    d.b_y = -d.a_y - uniform(0.2, 5.0);
    return d;
  }

  /// A game whose diagonal form is `d` (no relabeling needed), with random
  /// payoffs added that leave the differences intact.
  PayoffMatrices game_with_diag(const DiagonalForm& d) {
    PayoffMatrices g;
    const double a21 = uniform(-2, 2), a12 = uniform(-2, 2);
    const double b21 = uniform(-2, 2), b12 = uniform(-2, 2);
    g.A = {{{d.a_x + a21, a12}, {a21, d.b_x + a12}}};
    g.B = {{{d.a_y + b21, b12}, {b21, d.b_y + b12}}};
    return g;
  }

 private:
  std::mt19937_64 eng_;
};

// ---- reference formulas --------------------------------------------------

inline double ref_sigma(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Differences straight from the definition, without orientation handling.
inline DiagonalForm ref_raw_diag(const PayoffMatrices& g) {
  DiagonalForm d;
  d.a_x = g.A[0][0] - g.A[1][0];
  d.b_x = g.A[1][1] - g.A[0][1];
  d.a_y = g.B[0][0] - g.B[1][0];
  d.b_y = g.B[1][1] - g.B[0][1];
  return d;
}

/// Player 1 row payoff against y, player 2 row payoff against x.
inline double ref_u1(const PayoffMatrices& g, int i, double y) { return g.A[i][0] * y + g.A[i][1] * (1 - y); }
inline double ref_u2(const PayoffMatrices& g, int j, double x) { return g.B[j][0] * x + g.B[j][1] * (1 - x); }

inline double ref_welfare(const PayoffMatrices& g, double x, double y) {
  const double p1 = x * ref_u1(g, 0, y) + (1 - x) * ref_u1(g, 1, y);
  const double p2 = y * ref_u2(g, 0, x) + (1 - y) * ref_u2(g, 1, x);
  return p1 + p2;
}

/// Best-response check at every corner, ties allowed.
inline std::vector<StrategyProfile> ref_pure_nash(const PayoffMatrices& g) {
  std::vector<StrategyProfile> out;
  for (int xi = 0; xi <= 1; ++xi)
    for (int yi = 0; yi <= 1; ++yi) {
      const double x = xi, y = yi;
      const int i = xi == 1 ? 0 : 1, j = yi == 1 ? 0 : 1;
      const bool br1 = ref_u1(g, i, y) >= ref_u1(g, 1 - i, y);
      const bool br2 = ref_u2(g, j, x) >= ref_u2(g, 1 - j, x);
      if (br1 && br2) out.push_back({x, y});
    }
  return out;
}

/// Fixed points of the Boltzmann response map on a dense x grid, in plain
/// simplex coordinates. Adequate while the QREs stay away from the corners
/// by more than a grid cell.
inline std::vector<StrategyProfile> ref_qre_scan(const DiagonalForm& d, double tx, double ty, int n = 200000) {
  auto resid = [&](double x) {
    const double y = ref_sigma(((d.a_y + d.b_y) * x - d.b_y) / ty);
    const double xr = ref_sigma(((d.a_x + d.b_x) * y - d.b_x) / tx);
    return xr - x;
  };
  std::vector<StrategyProfile> out;
  double x0 = 0.0, r0 = resid(0.0);
  for (int k = 1; k <= n; ++k) {
    const double x1 = static_cast<double>(k) / n;
    const double r1 = resid(x1);
    if ((r0 > 0) != (r1 > 0)) {
      double lo = x0, hi = x1, flo = r0;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = resid(mid);
        if ((fm > 0) == (flo > 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      const double x = 0.5 * (lo + hi);
      out.push_back({x, ref_sigma(((d.a_y + d.b_y) * x - d.b_y) / ty)});
    }
    x0 = x1;
    r0 = r1;
  }
  return out;
}

/// L(x, T_y) in simplex coordinates.
inline double ref_L(const DiagonalForm& d, double x, double ty) {
  const double s = d.a_y + d.b_y;
  const double y = ref_sigma((s * x - d.b_y) / ty);
  const double dy = y * (1 - y) * s / ty;
  return y + x * (1 - x) * std::log(1 / x - 1) * dy;
}

inline double ref_t2(const DiagonalForm& d, double x, double ty) {
  const double y = ref_sigma(((d.a_y + d.b_y) * x - d.b_y) / ty);
  return (-(d.a_x + d.b_x) * y + d.b_x) / std::log(1 / x - 1);
}

/// Critical temperature by the two-interval characterization: bisect
/// L = b_x/(a_x+b_x) inside (0, x_1) when T_y > T_I, or inside (1/2, 1)
/// when T_A < T_y < T_I. Returns nullopt when the bracket carries no sign
/// change (the characterization does not apply there).
inline std::optional<double> ref_critical_temperature(const DiagonalForm& d, double ty) {
  const double lr = std::log(d.a_x / d.b_x);
  const double ti = std::max(0.0, (d.b_y - d.a_y) / (2 * lr));
  const double tb = d.b_y / lr;
  const double ta = std::max(0.0, -d.a_y / lr);
  const double c = d.b_x / (d.a_x + d.b_x);
  double lo, hi;
  if (ty > ti) {
    if (ty >= tb) return 0.0;
    const double x1 = std::min(0.5, (-ty * lr + d.b_y) / (d.a_y + d.b_y));
    lo = 1e-9;
    hi = x1 - 1e-9;
  } else {
    if (ty <= ta) return 0.0;
    lo = 0.5 + 1e-9;
    hi = 1 - 1e-9;
  }
  auto f = [&](double x) { return ref_L(d, x, ty) - c; };
  double flo = f(lo);
  if ((flo > 0) == (f(hi) > 0)) return std::nullopt;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return ref_t2(d, 0.5 * (lo + hi), ty);
}

}  // namespace qbif::test
