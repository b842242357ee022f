#include "sks/truncation.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace sks;
using std::numbers::pi;

namespace {

const NoiseSpec kSilent = make_noise_spec(2.0, 0, 0.0);
const NoisePair kRng{{21, 1}, {21, 2}};

double max_abs(const Field& f) { return f.values().cwiseAbs().maxCoeff(); }

SchemeConfig config(double dt, double t_end, int record_every = 1) {
  SchemeConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.record_every = record_every;
  return c;
}

State bump(const GridSpec& g, double amp) {
  return State(0.0,
               Field::sample(g, [&](double x) { return 1 + amp * std::cos(pi * x); }),
               Field::sample(g, [&](double x) { return amp * std::cos(pi * x); }));
}

}  // namespace

TEST_CASE("smooth cutoff") {
  CHECK(smooth_cutoff(CutoffSpec{3}, 2.0) == 1.0);
  CHECK(smooth_cutoff(CutoffSpec{3}, 7.0) == 0.0);
  const double mid = smooth_cutoff(CutoffSpec{1}, 1.5);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
  CHECK(mid == doctest::Approx(0.5));
  const double h = 1e-3;
  for (double x : {1.0, 2.0}) {
    const double d = (smooth_bump(x + h) - smooth_bump(x - h)) / (2 * h);
    CHECK(std::abs(d) < 1e-6);
  }
  double prev = 1.0;
  for (double x = 0.0; x <= 3.0; x += 0.01) {
    const double y = smooth_bump(x);
    CHECK(y <= prev);
    CHECK(y >= 0.0);
    CHECK(y <= 1.0);
    CHECK(smooth_bump(-x) == y);
    prev = y;
  }
  CHECK(smooth_cutoff(CutoffSpec{2, 0.5}, 1.0) == 1.0);
  CHECK(smooth_cutoff(CutoffSpec{2, 0.5}, 2.0) == 0.0);
}

TEST_CASE("running functionals") {
  const GridSpec g(128);
  SUBCASE("constant state") {
    const State s(0.0, Field::constant(g, 2.0), Field::sample(g, [](double x) {
                    return std::cos(pi * x);
                  }));
    RunningFunctionals rf = start_functionals(s);
    const RunningFunctionals one = update_functionals(rf, s, 0.1);
    const RunningFunctionals two = update_functionals(one, s, 0.1);
    CHECK(one.h1 == rf.h1);
    CHECK(two.h2 == rf.h2);
    CHECK(two.h3 == doctest::Approx(2 * one.h3).epsilon(1e-14));
  }
  SUBCASE("zero state stays zero") {
    const State s(0.0, Field(g), Field(g));
    RunningFunctionals rf = start_functionals(s);
    for (int i = 0; i < 5; ++i) rf = update_functionals(rf, s, 0.1);
    CHECK(rf.h1 == 0.0);
    CHECK(rf.h2 == 0.0);
    CHECK(rf.h3 == 0.0);
  }
  SUBCASE("h3 increment of cos(pi x)") {
    const State s(0.0, Field(g),
                  Field::sample(g, [](double x) { return std::cos(pi * x); }));
    const double dt = 0.01;
    const RunningFunctionals rf = update_functionals(start_functionals(s), s, dt);
    const double exact = dt * (pi * pi / 2 + std::pow(pi, 4) / 2);
    CHECK(rf.h3 == doctest::Approx(exact).epsilon(1e-3));
  }
}

TEST_CASE("truncated drift") {
  const GridSpec g(32);
  ModelParams m;
  const State s = bump(g, 0.4);
  const CutoffSpec spec{4};
  SUBCASE("below threshold it is the plain drift") {
    const RunningFunctionals rf{1.0, 1.0, 1.0};
    CHECK(truncated_drift_u(s, m, 0.2, rf, spec) == drift_u(s, m, 0.2));
    CHECK(truncation_factor(rf, spec) == 1.0);
  }
  SUBCASE("beyond twice the threshold the chemotaxis is gone") {
    const RunningFunctionals rf{0.0, 9.0, 0.0};
    const Field d = truncated_drift_u(s, m, 0.2, rf, spec);
    const Field lin = neumann_laplacian(s.u, m.r_u) + 0.2 * s.u;
    CHECK(max_abs(d - lin) < 1e-12 * max_abs(lin));
  }
  SUBCASE("factor stays in the unit interval") {
    for (double a = 0.0; a < 12.0; a += 0.5) {
      const double f = truncation_factor(RunningFunctionals{a, a / 2, a / 3}, spec);
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
    }
  }
}

TEST_CASE("stopping rule") {
  const CutoffSpec one{1};
  CHECK_FALSE(check_stopping({0.5, 0.5, 0.5}, one, 0.0));
  const auto t1 = check_stopping({1.2, 0.0, 0.0}, one, 0.3);
  REQUIRE(t1);
  CHECK(t1->kind == TriggerKind::l1_mass);
  CHECK(t1->t == 0.3);
  const auto t2 = check_stopping({0.0, 1.1, 0.0}, one, 0.1);
  REQUIRE(t2);
  CHECK(t2->kind == TriggerKind::gradient_l2);
  const auto t3 = check_stopping({0.0, 0.0, 1.0}, one, 0.1);
  REQUIRE(t3);
  CHECK(t3->kind == TriggerKind::gradient_h1_integral);
  CHECK(to_string(TriggerKind::gradient_h1_integral) == "h3");
}

TEST_CASE("heat continuation") {
  const GridSpec g(64);
  ModelParams m;
  m.alpha = 0.5;
  m.beta = 2.0;
  const EffectiveParams e{0.3, 0.5};
  const State s = bump(g, 0.3);
  const NoiseSampler silent(kSilent, g);
  const auto dW = silent.increment(kRng.w1, 0, 0.01);
  SUBCASE("zero noise follows the linear semigroup") {
    const State next =
        heat_continuation_step(Scheme::exponential_em, s, m, e, dW, dW, 0.01);
    const Field ref = apply_heat_semigroup(s.u, 0.01, m.r_u, e.gamma_u);
    CHECK(max_abs(next.u - ref) < 1e-13);
  }
  SUBCASE("v ignores u") {
    State other = s;
    other.u = 3.0 * s.u;
    for (Scheme sc : {Scheme::exponential_em, Scheme::semi_implicit_em}) {
      const State a = heat_continuation_step(sc, s, m, e, dW, dW, 0.01);
      const State b = heat_continuation_step(sc, other, m, e, dW, dW, 0.01);
      CHECK(a.v == b.v);
    }
  }
  SUBCASE("mass changes only through gamma") {
    const State next =
        heat_continuation_step(Scheme::exponential_em, s, m, e, dW, dW, 0.01);
    CHECK(trapezoid(next.u) ==
          doctest::Approx(trapezoid(s.u) * std::exp(0.003)).epsilon(1e-13));
  }
}

TEST_CASE("concatenated runs") {
  const GridSpec g(32);
  ModelParams m;
  m.alpha = 1.0;
  m.beta = 1.0;
  const NoiseSpec n1 = make_noise_spec(1.5, 4, 0.4);
  const NoiseSpec n2 = make_noise_spec(2.5, 4, 0.4);
  const EffectiveParams e = effective_params(m, n1, n2,
                                             CorrectionConvention::half_gamma);
  const SchemeConfig cfg = config(1e-3, 0.2);

  SUBCASE("unreached thresholds reproduce the plain run bit for bit") {
    ConcatenationOptions co;
    co.threshold_multiplier = 1e6;
    const auto run = run_concatenated(2, bump(g, 0.3), m, e, n1, n2, cfg, kRng, co);
    const auto plain = integrate(bump(g, 0.3), m, e, n1, n2, cfg, kRng);
    REQUIRE(run.levels.size() == 2);
    CHECK(run.levels[0].reached_T);
    CHECK(run.levels[0].tau_star == doctest::Approx(0.2));
    const Trajectory& path = run.levels[0].path;
    REQUIRE(path.states.size() == plain.states.size());
    for (std::size_t i = 0; i < path.states.size(); ++i) {
      CHECK(path.states[i].u == plain.states[i].u);
      CHECK(path.states[i].v == plain.states[i].v);
    }
  }

  SUBCASE("prefix property and monotone stopping times") {
    ConcatenationOptions co;
    co.threshold_multiplier = 0.3;
    const auto run = run_concatenated(5, bump(g, 0.3), m, e, n1, n2, cfg, kRng, co);
    REQUIRE(run.levels.size() == 5);
    for (std::size_t n = 1; n < run.levels.size(); ++n) {
      const auto& lo = run.levels[n - 1];
      const auto& hi = run.levels[n];
      CHECK(hi.tau_bar >= lo.tau_bar);
      for (std::size_t i = 0; i < lo.path.states.size(); ++i) {
        if (lo.path.states[i].t > lo.tau_bar) break;
        CHECK(hi.path.states[i].u == lo.path.states[i].u);
        CHECK(hi.path.states[i].v == lo.path.states[i].v);
        CHECK(hi.path.state_steps[i] == lo.path.state_steps[i]);
      }
    }
    CHECK_FALSE(run.levels[0].reached_T);
  }

  SUBCASE("tiny threshold stops at once") {
    ConcatenationOptions co;
    co.threshold_multiplier = 1e-6;
    const auto run = run_concatenated(1, bump(g, 0.3), m, e, n1, n2, cfg, kRng, co);
    REQUIRE(run.levels[0].trigger);
    CHECK(*run.levels[0].trigger == TriggerKind::l1_mass);
    CHECK(run.levels[0].tau_bar == 0.0);
    // The path continues to T in the heat regime.
    CHECK(run.levels[0].path.states.back().t == doctest::Approx(0.2));
    CHECK(run.levels[0].path.scalars.back().regime == Regime::heat_continuation);
  }

  SUBCASE("event log") {
    ConcatenationOptions co;
    co.threshold_multiplier = 0.05;
    const auto run = run_concatenated(3, bump(g, 0.3), m, e, n1, n2, cfg, kRng, co);
    const std::string csv = level_events_to_csv(run);
    CHECK(csv.rfind("level,tau_star,trigger_kind,tau_bar,reached_T\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  }
}

TEST_CASE("replaying a path re-derives its accumulators") {
  const GridSpec g(32);
  ModelParams m;
  const NoiseSpec n1 = make_noise_spec(1.5, 4, 0.4);
  const EffectiveParams e = effective_params(m, n1, n1,
                                             CorrectionConvention::half_gamma);
  TruncationController ctl(CutoffSpec{1, 100.0});
  IntegrateOptions io;
  io.hooks = &ctl;
  const auto traj =
      integrate(bump(g, 0.3), m, e, n1, n1, config(1e-3, 0.05), kRng, io);
  RunningFunctionals rf = start_functionals(traj.states[0]);
  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    rf = update_functionals(rf, traj.states[i], 1e-3);
  }
  CHECK(rf.h1 == ctl.functionals().h1);
  CHECK(rf.h2 == ctl.functionals().h2);
  CHECK(rf.h3 == ctl.functionals().h3);
  CHECK(rf.h3 == traj.scalars.back().gradv_h1_running_integral);
}
