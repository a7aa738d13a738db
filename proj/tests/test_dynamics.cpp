#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qbif/dynamics.hpp"
#include "qbif/error.hpp"
#include "support.hpp"

using namespace qbif;
using qbif::test::Rng;

namespace {

const DiagonalForm kCoord{10, 5, 2, 4, {}};
const DiagonalForm kZero{};

IntegratorConfig fast(double step = 0.01) {
  IntegratorConfig c;
  c.step = step;
  c.record_every = 10;
  return c;
}

// Linear interpolation of a trajectory's state at time t.
StrategyProfile at_time(const Trajectory& tr, double t) {
  const auto& r = tr.rows;
  if (t <= r.front().t) return {r.front().x, r.front().y};
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (r[i].t >= t) {
      const double w = (t - r[i - 1].t) / (r[i].t - r[i - 1].t);
      return {r[i - 1].x + w * (r[i].x - r[i - 1].x), r[i - 1].y + w * (r[i].y - r[i - 1].y)};
    }
  }
  return {r.back().x, r.back().y};
}

}  // namespace

TEST_CASE("vector field") {
  const auto [zx, zy] = vector_field(kZero, {0.5, 0.5}, {1, 3});
  CHECK(zx == 0);
  CHECK(zy == 0);

  const auto q = enumerate_qre(kCoord, {1, 2});
  const auto [fx, fy] = vector_field(kCoord, {q[0].x, q[0].y}, {1, 2});
  CHECK(std::hypot(fx, fy) < 1e-9);
  const auto [gx, gy] = vector_field(kCoord, {0.05, 0.136}, {1, 2});
  CHECK(std::hypot(gx, gy) < 1e-3);

  CHECK(vector_field(kCoord, {0.5, 0.9}, {1e-3, 1e-3}).first > 0);
}

TEST_CASE("logit field") {
  const auto [a, b] = logit_field(kZero, 0, 0, {1, 1});
  CHECK(a == 0);
  CHECK(b == 0);
  const auto q = enumerate_qre(kCoord, {1, 2});
  const auto [fu, fv] = logit_field(kCoord, q[0].u, q[0].v, {1, 2});
  CHECK(std::abs(fu) < 1e-9);
  CHECK(std::abs(fv) < 1e-9);
}

TEST_CASE("divergence of the logit field is constant") {
  Rng rng(41);
  for (int k = 0; k < 1000; ++k) {
    const auto d = rng.coordination_diag();
    const TemperaturePair t{rng.log_uniform(1e-3, 10), rng.log_uniform(1e-3, 10)};
    const double u = rng.uniform(-8, 8), v = rng.uniform(-8, 8), h = 1e-5;
    const double du = (logit_field(d, u + h, v, t).first - logit_field(d, u - h, v, t).first) / (2 * h);
    const double dv = (logit_field(d, u, v + h, t).second - logit_field(d, u, v - h, t).second) / (2 * h);
    CHECK(du + dv == doctest::Approx(-(t.t_x + t.t_y)).epsilon(1e-6).scale(1));
  }
}

TEST_CASE("entropy") {
  CHECK(entropy({0.5, 0.5}) == doctest::Approx(2 * std::log(2.0)));
  CHECK(entropy({1, 1}) < 1e-10);
  CHECK(entropy({0.5, 1}) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("zero game relaxes to uniform play with rising entropy") {
  const auto tr = integrate(kZero, {0.9, 0.9}, {1, 1}, fast());
  CHECK(tr.converged);
  CHECK(tr.final_state().x == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(tr.final_state().y == doctest::Approx(0.5).epsilon(1e-8));

  Rng rng(42);
  for (int k = 0; k < 20; ++k) {
    StrategyProfile p{rng.uniform(0.01, 0.99), rng.uniform(0.01, 0.99)};
    IntegratorConfig cfg = fast();
    cfg.record_every = 1;
    const auto t = integrate(kZero, p, {rng.log_uniform(0.1, 3), rng.log_uniform(0.1, 3)}, cfg);
    const double top = 2 * std::log(2.0);
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
      if (top - t.rows[i - 1].entropy < 1e-9) break;
      CHECK(t.rows[i].entropy > t.rows[i - 1].entropy);
    }
  }
}

TEST_CASE("coordination game trajectories") {
  const auto low = integrate(kCoord, {0.05, 0.14}, {1, 2}, fast());
  REQUIRE(low.converged);
  const auto q = enumerate_qre(kCoord, {1, 2});
  CHECK(low.final_state().x == doctest::Approx(q[0].x).epsilon(1e-6));
  CHECK(low.final_state().y == doctest::Approx(q[0].y).epsilon(1e-6));

  const auto hot = integrate(kCoord, {0.05, 0.14}, {5, 2}, fast());
  REQUIRE(hot.converged);
  const auto q5 = enumerate_qre(kCoord, {5, 2});
  REQUIRE(q5.size() == 1);
  CHECK(hot.final_state().x == doctest::Approx(q5[0].x).epsilon(1e-6));

  for (std::size_t i = 1; i < low.rows.size(); ++i) CHECK(low.rows[i].t > low.rows[i - 1].t);
}

TEST_CASE("global convergence to a stable equilibrium") {
  Rng rng(43);
  for (int k = 0; k < 30; ++k) {
    const auto g = rng.any_game();
    const auto d = diagonal_form(g);
    const TemperaturePair t{rng.log_uniform(0.1, 10), rng.log_uniform(0.1, 10)};
    const auto qs = enumerate_qre(d, t);
    for (int j = 0; j < 3; ++j) {
      const auto tr = integrate(d, {rng.uniform(0.01, 0.99), rng.uniform(0.01, 0.99)}, t, fast());
      REQUIRE(tr.converged);
      double best = 1e300;
      const QrePoint* hit = nullptr;
      for (const auto& q : qs) {
        const double dist = std::max(std::abs(q.x - tr.final_state().x), std::abs(q.y - tr.final_state().y));
        if (dist < best) best = dist, hit = &q;
      }
      CHECK(best < 1e-6);
      if (hit) CHECK(hit->stability == Stability::Stable);
    }
  }
}

TEST_CASE("halving the step leaves the endpoint unchanged") {
  Rng rng(44);
  for (int k = 0; k < 10; ++k) {
    const auto d = rng.coordination_diag();
    const TemperaturePair t{rng.log_uniform(0.3, 5), rng.log_uniform(0.3, 5)};
    const StrategyProfile p{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    const auto a = integrate(d, p, t, fast(0.01));
    const auto b = integrate(d, p, t, fast(0.005));
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(std::abs(a.final_state().x - b.final_state().x) < 1e-8);
    CHECK(std::abs(a.final_state().y - b.final_state().y) < 1e-8);
  }
}

TEST_CASE("schedules") {
  TemperatureSchedule flat;
  flat.initial = {1, 2};
  const auto s = integrate_schedule(kCoord, {0.05, 0.14}, flat, fast());
  const auto i = integrate(kCoord, {0.05, 0.14}, {1, 2}, fast());
  CHECK(s.final_state().x == doctest::Approx(i.final_state().x).epsilon(1e-12));
  CHECK(s.final_state().y == doctest::Approx(i.final_state().y).epsilon(1e-12));
  REQUIRE(s.phases.size() == 1);
  CHECK(s.phases[0].label == "initial");

  TemperatureSchedule d2;
  d2.initial = {1, 2};
  d2.phases = {{Which::Tx, 5, "raise"}, {Which::Tx, kMinTemperature, "lower x"}, {Which::Ty, kMinTemperature, "lower y"}};
  const auto fwd = integrate_schedule(kCoord, {0.05, 0.14}, d2, fast(0.01));
  CHECK(fwd.final_state().x >= 0.99);
  CHECK(fwd.rows.back().t_x == kMinTemperature);
  CHECK(fwd.rows.back().t_y == kMinTemperature);
  REQUIRE(fwd.phases.size() == 4);
  CHECK(fwd.phases[1].label == "raise");
  CHECK(fwd.rows[fwd.phases[1].row].t_x == 5);

  // Temperature steps stay within 5% per sub-step.
  for (std::size_t k = 1; k < fwd.rows.size(); ++k) {
    CHECK(fwd.rows[k].t_x / fwd.rows[k - 1].t_x <= 1.05 + 1e-12);
    CHECK(fwd.rows[k - 1].t_x / fwd.rows[k].t_x <= 1.05 + 1e-12);
  }

  TemperatureSchedule swapped = d2;
  swapped.phases = {{Which::Ty, kMinTemperature, "lower y"}, {Which::Tx, 5, "raise"}, {Which::Tx, kMinTemperature, "lower x"}};
  CHECK(integrate_schedule(kCoord, {0.05, 0.14}, swapped, fast(0.01)).final_state().x <= 0.5);

  IntegratorConfig tight = fast();
  tight.max_time = 0.5;
  CHECK_THROWS_AS(integrate_schedule(kCoord, {0.05, 0.14}, d2, tight), ScheduleStalled);

  const auto ends = d2.phase_ends();
  REQUIRE(ends.size() == 3);
  CHECK(ends[0].t_x == 5);
  CHECK(ends[2].t_y == kMinTemperature);

  TemperatureSchedule bad = d2;
  bad.phases[0].target = 1e-4;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("discrete agents") {
  SUBCASE("zero game") {
    DiscreteAgentConfig cfg;
    cfg.alpha = 0.05;
    cfg.horizon = 5000;
    cfg.initial_q = {{{3, -1}, {0.5, 2}}};
    const auto tr = simulate_discrete_q(test::zero_game(), {1, 1}, cfg);
    CHECK(tr.final_state().x == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(tr.final_state().y == doctest::Approx(0.5).epsilon(1e-6));
  }
  SUBCASE("alpha zero keeps strategies fixed") {
    DiscreteAgentConfig cfg;
    cfg.alpha = 0;
    cfg.horizon = 50;
    cfg.initial_q = {initial_q(0.3, 1), initial_q(0.8, 2)};
    const auto tr = simulate_discrete_q(test::coord_game(), {1, 2}, cfg);
    for (const auto& r : tr.rows) {
      CHECK(r.x == doctest::Approx(0.3));
      CHECK(r.y == doctest::Approx(0.8));
    }
  }
  SUBCASE("tracks the ODE") {
    // Equal temperatures keep both players on the same clock, so the match
    // holds from a far start too.
    for (TemperaturePair t : {TemperaturePair{1, 2}, TemperaturePair{1.5, 1.5}}) {
      const StrategyProfile p0 = t.t_x == t.t_y ? StrategyProfile{0.8, 0.3} : StrategyProfile{0.05, 0.14};
      DiscreteAgentConfig cfg;
      cfg.alpha = 0.01;
      cfg.horizon = static_cast<long>(std::ceil(10 * t.t_x / cfg.alpha));
      cfg.initial_q = {initial_q(p0.x, t.t_x), initial_q(p0.y, t.t_y)};
      const auto disc = simulate_discrete_q(test::coord_game(), t, cfg);
      CHECK(disc.rows.front().x == doctest::Approx(p0.x));
      IntegratorConfig ic = fast(1e-3);
      ic.record_every = 1;
      ic.max_time = 10;
      const auto ode = integrate(kCoord, p0, t, ic);
      double sup = 0;
      for (const auto& r : disc.rows) {
        if (r.t > 10) break;
        const auto o = at_time(ode, r.t);
        sup = std::max({sup, std::abs(o.x - r.x), std::abs(o.y - r.y)});
      }
      CHECK(sup < 0.05);
    }
  }
  SUBCASE("sw is filled in game labels") {
    DiscreteAgentConfig cfg;
    cfg.horizon = 3;
    const auto tr = simulate_discrete_q(test::coord_game(), {1, 1}, cfg);
    for (const auto& r : tr.rows) CHECK(r.sw == doctest::Approx(social_welfare(test::coord_game(), {r.x, r.y})));
  }
  CHECK(initial_q(0.25, 2)[0] - initial_q(0.25, 2)[1] == doctest::Approx(2 * std::log(1.0 / 3)));
}

TEST_CASE("trajectories map back to the game's labels") {
  PayoffMatrices g = test::coord_game();
  std::swap(g.A[0], g.A[1]);
  for (auto& r : g.B) std::swap(r[0], r[1]);
  const auto d = diagonal_form(g);
  REQUIRE(d.orientation.swap_x);
  const auto tr = to_original(integrate(d, d.orientation.to_normalized({0.95, 0.14}), {1, 2}, fast()), g, d.orientation);
  CHECK(tr.final_state().x == doctest::Approx(1 - 0.0489).epsilon(1e-3));
  for (const auto& r : tr.rows) CHECK(r.sw == doctest::Approx(social_welfare(g, {r.x, r.y})));
}

TEST_CASE("configuration validation") {
  IntegratorConfig c;
  c.step = 0.2;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.record_every = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  CHECK_THROWS_AS(integrate(kCoord, {1.5, 0.5}, {1, 1}, {}), InvalidArgument);
  DiscreteAgentConfig dc;
  dc.alpha = 1.5;
  CHECK_THROWS_AS(dc.validate(), InvalidArgument);
  CHECK(which_from_string("Ty") == Which::Ty);
  CHECK_THROWS_AS(which_from_string("Tz"), InvalidArgument);
}
