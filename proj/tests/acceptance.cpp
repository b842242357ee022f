// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: sks_acceptance [criterion ...]   (all criteria when none given)

#include "sks/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace sks;
using std::numbers::pi;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double max_abs(const Field& f) { return f.values().cwiseAbs().maxCoeff(); }

Field cos_field(const GridSpec& g, double mean, double amp, int mode) {
  return Field::sample(g, [&](double x) {
    return mean + amp * std::cos(mode * pi * x);
  });
}

NoisePair fixed_streams(std::uint64_t seed) {
  return NoisePair{{seed, 1}, {seed, 2}};
}

// Criterion 1: operators.

Verdict operators() {
  double gram = 0.0;
  const GridSpec fine(4096);
  for (int j = -8; j <= 8; ++j) {
    for (int k = j; k <= 8; ++k) {
      const Field prod = Field::sample(
          fine, [&](double x) { return basis_psi(j, x) * basis_psi(k, x); });
      gram = std::max(gram, std::abs(trapezoid(prod) - (j == k ? 1.0 : 0.0)));
    }
  }

  double decay = 0.0;
  const GridSpec g(64);
  for (int k = 0; k <= 8; ++k) {
    const Field f = cos_field(g, 0.0, 1.0, k);
    const double t = 0.01;
    const Field expect = std::exp(-k * k * pi * pi * t) * f;
    decay = std::max(decay, max_abs(apply_heat_semigroup(f, t, 1.0, 0.0) - expect));
  }

  auto order = [](auto op, auto exact) {
    auto err = [&](int n) {
      const GridSpec grid(n);
      const Field got = op(grid);
      double e = 0.0;
      for (int j = 0; j <= n; ++j) {
        e = std::max(e, std::abs(got[j] - exact(grid.node(j))));
      }
      return e;
    };
    return std::log2(err(64) / err(128));
  };
  const double lap = order(
      [](const GridSpec& grid) {
        return neumann_laplacian(cos_field(grid, 0.0, 1.0, 1), 1.0);
      },
      [](double x) { return -pi * pi * std::cos(pi * x); });
  const double grad = order(
      [](const GridSpec& grid) {
        return gradient(cos_field(grid, 0.0, 1.0, 2));
      },
      [](double x) { return -2 * pi * std::sin(2 * pi * x); });
  const double div = order(
      [](const GridSpec& grid) {
        return chemotactic_divergence(cos_field(grid, 1.0, 0.5, 1),
                                      cos_field(grid, 0.0, 1.0, 1), 1.0);
      },
      [](double x) {
        // d/dx[(1 + cos/2)(-pi sin)]
        return -pi * pi * std::cos(pi * x) -
               0.5 * pi * pi * std::cos(2 * pi * x);
      });
  auto in_band = [](double o) { return o >= 1.8 && o <= 2.2; };

  Verdict v;
  v.pass = gram < 1e-8 && decay < 1e-10 && in_band(lap) && in_band(grad) &&
           in_band(div);
  v.detail = "gram " + fmt("%.2e", gram) + ", semigroup " + fmt("%.2e", decay) +
             ", orders lap " + fmt("%.3f", lap) + " grad " + fmt("%.3f", grad) +
             " div " + fmt("%.3f", div);
  return v;
}

// Criterion 2: mass conservation without noise.

Verdict conservation() {
  const GridSpec g(256);
  ModelParams m;
  m.alpha = 1.0;
  m.beta = 1.0;
  const NoiseSpec off = make_noise_spec(2.0, 0, 0.0);
  const EffectiveParams e = effective_params(m, off, off, CorrectionConvention::half_gamma);
  const State init(0.0, cos_field(g, 1.0, 0.5, 1), Field::constant(g, 0.0));
  const double mass0 = trapezoid(init.u);
  double worst = 0.0;
  for (Scheme s : {Scheme::semi_implicit_em, Scheme::exponential_em}) {
    SchemeConfig c;
    c.scheme = s;
    c.dt = 1e-4;
    c.t_end = 1.0;
    IntegrateOptions io;
    io.keep_states = false;
    const auto traj = integrate(init, m, e, off, off, c, fixed_streams(1), io);
    for (const auto& r : traj.scalars) {
      worst = std::max(worst, std::abs(r.mass_u - mass0) / mass0);
    }
  }
  return {worst <= 1e-12, "max relative mass drift " + fmt("%.2e", worst) +
                              " over 10^4 steps, both schemes"};
}

// Criterion 3: constant steady state.

Verdict steady_state() {
  const GridSpec g(64);
  ModelParams m;
  m.alpha = 2.0;
  m.beta = 1.5;
  const double mass = 1.3;
  const NoiseSpec off = make_noise_spec(2.0, 0, 0.0);
  const EffectiveParams e = effective_params(m, off, off, CorrectionConvention::half_gamma);
  const Field u = Field::constant(g, mass);
  const Field v = Field::constant(g, m.beta * mass / m.alpha);
  double worst = 0.0;
  for (Scheme s : {Scheme::semi_implicit_em, Scheme::exponential_em}) {
    SchemeConfig c;
    c.scheme = s;
    c.dt = 1e-3;
    c.t_end = 10.0;
    c.record_every = 10000;
    const auto traj = integrate(State(0.0, u, v), m, e, off, off, c, fixed_streams(1));
    for (const auto& st : traj.states) {
      worst = std::max({worst, max_abs(st.u - u), max_abs(st.v - v)});
    }
  }
  return {worst <= 1e-12,
          "max deviation " + fmt("%.2e", worst) + " after 10^4 steps, both schemes"};
}

// Criterion 4: v(t) = 2(1 - e^{-t}).

Verdict exact_solution() {
  const GridSpec g(16);
  ModelParams m;
  m.alpha = 1.0;
  m.beta = 1.0;
  const NoiseSpec off = make_noise_spec(2.0, 0, 0.0);
  const EffectiveParams e = effective_params(m, off, off, CorrectionConvention::half_gamma);
  SchemeConfig c;
  c.scheme = Scheme::exponential_em;
  c.dt = 1e-4;
  c.t_end = 1.0;
  c.record_every = 10000;
  const auto traj = integrate(
      State(0.0, Field::constant(g, 2.0), Field::constant(g, 0.0)), m, e, off,
      off, c, fixed_streams(1));
  const double exact = 2 * (1 - std::exp(-1.0));
  const double err = max_abs(traj.states.back().v - Field::constant(g, exact));
  return {err <= 1e-6, "exponential scheme, |v(1) - 2(1-e^-1)| = " + fmt("%.2e", err)};
}

// Criteria 5 and 6: scalar reduction.

ModelSetup scalar_setup() {
  ModelSetup s;
  s.grid = GridSpec(4);
  s.model.chi = 0.0;
  s.model.alpha = 0.0;
  s.model.beta = 0.0;
  s.noise_u = make_noise_spec(2.0, 0, 1.0);
  s.noise_v = make_noise_spec(2.0, 0, 0.0);
  s.scheme.t_end = 1.0;
  s.u0 = Field::constant(s.grid, 1.0);
  s.v0 = Field::constant(s.grid, 0.0);
  return s;
}

const EnsembleConfig kStrongEnsemble{1000, 2024, 1};

std::string errors_text(const StrongOrderResult& r) {
  std::string out;
  for (double e : r.errors) out += (out.empty() ? "" : " ") + fmt("%.4f", e);
  return out;
}

Verdict strong_order() {
  const auto r = run_strong_order(kStrongEnsemble, scalar_setup(), 0x1p-12, 5);
  const bool ok = !r.fit.degenerate && r.failures.empty() && r.fit.slope >= 0.35 &&
                  r.fit.slope <= 0.65;
  return {ok, "slope " + fmt("%.3f", r.fit.slope) + " +- " +
                  fmt("%.3f", r.fit.slope_se) + ", errors " + errors_text(r)};
}

Verdict arbitration() {
  ModelSetup s = scalar_setup();
  s.convention = CorrectionConvention::half_gamma;
  const auto half = run_strong_order(kStrongEnsemble, s, 0x1p-12, 5);
  s.convention = CorrectionConvention::full_gamma;
  const auto full = run_strong_order(kStrongEnsemble, s, 0x1p-12, 5);
  const double half_ratio = half.errors.back() / half.errors.front();
  const double full_ratio = full.errors.back() / full.errors.front();

  ModelSetup w = scalar_setup();
  w.scheme.t_end = 0.5;
  const auto wz = run_wong_zakai(EnsembleConfig{200, 7, 1}, w, 0x1p-5, {1, 2, 4, 8});
  std::string gaps;
  for (std::size_t i = 0; i < wz.refinements.size(); ++i) {
    gaps += (i ? " " : "") + fmt("%.4f", wz.gap_half[i]) + "/" +
            fmt("%.4f", wz.gap_full[i]);
  }
  const bool ok = half_ratio < 0.25 && full_ratio >= 0.75 && wz.half_decreasing &&
                  wz.full_not_decreasing && wz.failures.empty() &&
                  half.failures.empty() && full.failures.empty();
  return {ok, "half ratio " + fmt("%.3f", half_ratio) + ", full ratio " +
                  fmt("%.3f", full_ratio) + ", wong-zakai gaps half/full " + gaps +
                  " (" + wz.verdict + ")"};
}

// Criteria 7, 8 and 10: full system ensembles.

ModelSetup desk_setup(int n_cells, double dt, int k, double amplitude) {
  ModelSetup s;
  s.grid = GridSpec(n_cells);
  s.model.alpha = 1.0;
  s.model.beta = 1.0;
  s.noise_u = make_noise_spec(1.5, k, amplitude);
  s.noise_v = make_noise_spec(2.5, k, amplitude);
  s.scheme.dt = dt;
  s.scheme.t_end = 0.5;
  s.scheme.record_every = 1000000;
  s.u0 = cos_field(s.grid, 1.0, 0.5, 1);
  s.v0 = Field::constant(s.grid, 0.2);
  s.lyapunov = LyapunovParams{5.0, 3.0, 1.0};
  return s;
}

Verdict positivity() {
  const ModelSetup s = desk_setup(128, 1e-4, 32, 0.5);
  const auto r = run_moments(EnsembleConfig{200, 77, 1}, s, 1.0, 1e-6);
  const std::size_t bad = r.positivity_violations + r.failures.size();
  return {bad <= 2, std::to_string(r.positivity_violations) +
                        " of 200 paths below -1e-6 max(u0), " +
                        std::to_string(r.failures.size()) + " failed, worst min u " +
                        fmt("%.3e", r.worst_min_u)};
}

struct Doubling {
  MomentsResult small;
  MomentsResult large;
};

const Doubling& doubling() {
  static const Doubling d = [] {
    const ModelSetup s = desk_setup(64, 1e-3, 16, 0.5);
    return Doubling{run_moments(EnsembleConfig{500, 88, 1}, s),
                    run_moments(EnsembleConfig{1000, 88, 1}, s)};
  }();
  return d;
}

bool stable(const FunctionalStats& a, const FunctionalStats& b, std::string& out) {
  const double joint = std::hypot(a.std_error(), b.std_error());
  const double z = std::abs(a.mean() - b.mean()) / joint;
  out += fmt("%.4g", a.mean()) + "->" + fmt("%.4g", b.mean()) + " (" +
         fmt("%.2f", z) + " se) ";
  return std::isfinite(a.mean()) && std::isfinite(b.mean()) && z < 2.0;
}

Verdict moments() {
  const auto& d = doubling();
  std::string text;
  bool ok = d.small.failures.empty() && d.large.failures.empty();
  ok &= stable(d.small.report.sup_l1_u, d.large.report.sup_l1_u, text);
  ok &= stable(d.small.report.sup_gradv_l2_sq, d.large.report.sup_gradv_l2_sq, text);
  ok &= stable(d.small.report.int_gradv_h1_sq, d.large.report.int_gradv_h1_sq, text);
  return {ok, "M 500->1000: " + text};
}

// Criterion 9: truncation.

Verdict truncation() {
  const ModelSetup s = desk_setup(32, 1e-3, 8, 0.5);
  const EffectiveParams e = s.effective();
  const NoisePair rng = path_streams(99, 0);
  bool ok = true;

  ConcatenationOptions never;
  never.threshold_multiplier = 1e6;
  const auto run = run_concatenated(2, s.initial_state(), s.model, e, s.noise_u,
                                    s.noise_v, s.scheme, rng, never);
  const auto plain = integrate(s.initial_state(), s.model, e, s.noise_u,
                               s.noise_v, s.scheme, rng);
  bool identical = run.levels[0].reached_T &&
                   run.levels[0].path.states.size() == plain.states.size();
  for (std::size_t i = 0; identical && i < plain.states.size(); ++i) {
    identical = run.levels[0].path.states[i].u == plain.states[i].u &&
                run.levels[0].path.states[i].v == plain.states[i].v;
  }
  ok &= identical;

  ConcatenationOptions tight;
  tight.threshold_multiplier = 0.4;
  SchemeConfig every = s.scheme;
  every.record_every = 1;
  const auto levels = run_concatenated(5, s.initial_state(), s.model, e,
                                       s.noise_u, s.noise_v, every, rng, tight);
  bool prefix = true;
  for (std::size_t n = 1; n < levels.levels.size(); ++n) {
    const auto& lo = levels.levels[n - 1];
    const auto& hi = levels.levels[n];
    prefix &= hi.tau_bar >= lo.tau_bar;
    for (std::size_t i = 0; i < lo.path.states.size(); ++i) {
      if (lo.path.states[i].t > lo.tau_bar) break;
      prefix &= hi.path.states[i].u == lo.path.states[i].u &&
                hi.path.states[i].v == lo.path.states[i].v;
    }
  }
  ok &= prefix;

  ModelSetup ev = s;
  ev.threshold_multiplier = 0.4;
  const auto r = run_truncation_events(EnsembleConfig{400, 5, 1}, ev, 5);
  ok &= r.monotone && r.no_upward_trend && r.failures.empty();
  std::string freq;
  for (double f : r.reached_frequency) freq += (freq.empty() ? "" : " ") + fmt("%.3f", f);
  return {ok, std::string("bit-identical ") + (identical ? "yes" : "no") +
                  ", prefix " + (prefix ? "yes" : "no") + ", P(reach T) " + freq +
                  ", trend slope " + fmt("%.3f", r.trend.slope) + " +- " +
                  fmt("%.3f", r.trend.slope_se)};
}

// Criterion 10: Lyapunov machinery.

Verdict lyapunov() {
  ModelParams m;
  m.beta = 1.0;
  const auto pass = validate_constants(LyapunovParams{5.0, 3.0, 1.0}, m);
  const auto boundary = validate_constants(LyapunovParams{5.0, 2.0, 1.0}, m);
  ModelParams no_chi = m;
  no_chi.chi = 0.0;
  const auto lowered = validate_constants(LyapunovParams{3.5, 3.0, 1.0}, no_chi);
  bool ok = pass.pass() && pass.c1_bound == 2.0 && pass.denominator == 1.0 &&
            pass.rho_bound == 4.0 && !boundary.pass() && lowered.pass() &&
            lowered.rho_bound == 3.0;

  const GridSpec g(32);
  const LyapunovParams unit{1.0, 1.0, 1.0};
  const double tol = 1e-10;
  auto state = [&](double u, double v) {
    return State(0.0, Field::constant(g, u), Field::constant(g, v));
  };
  const double e = std::numbers::e;
  const double closed =
      std::max({std::abs(lyapunov_W(state(0, 0), unit, tol)),
                std::abs(lyapunov_W(state(1, 0), unit, tol)),
                std::abs(lyapunov_W(state(1, 1), unit, tol)),
                std::abs(energy_E(state(e, 0), unit, tol) - e),
                std::abs(lyapunov_W(state(2, 0.5), unit, tol) -
                         (2 * std::log(2.0) - 1 + 0.25))});
  ok &= closed <= 1e-12;

  const auto& d = doubling();
  std::string text;
  ok &= stable(d.small.report.sup_W, d.large.report.sup_W, text);
  return {ok, std::string("constants examples ") + (ok ? "ok" : "checked") +
                  ", closed-form error " + fmt("%.1e", closed) + ", sup W " + text};
}

// Criterion 11: byte-identical outputs.

const char* kReproConfig = R"(
grid.n_cells = 32
model.alpha = 1
model.beta = 1
noise1.delta = 1.5
noise1.K = 8
noise1.amplitude = 0.3
noise2.delta = 2.5
noise2.K = 8
noise2.amplitude = 0.3
scheme.dt = 0.001
scheme.t_end = 0.05
scheme.record_every = 10
truncation.level_max = 3
truncation.threshold_multiplier = 0.6
lyapunov.rho = 5
lyapunov.c1 = 3
lyapunov.c2 = 1
ensemble.n_paths = 32
ensemble.base_seed = 20240611
initial.u_mean = 1
initial.u_amp = 0.5
initial.v_mean = 0.2
)";

std::string outputs(int workers) {
  RunConfig cfg = parse_config(kReproConfig);
  cfg.ensemble.workers = workers;
  const ModelSetup s = cfg.setup();
  std::string out = dump(moments_json(cfg, run_moments(cfg.ensemble, s)));
  out += dump(truncation_events_json(
      cfg, run_truncation_events(cfg.ensemble, s, cfg.level_max)));
  const Trajectory traj = simulate_path(s, cfg.ensemble, 3, true);
  out += scalars_to_csv(traj.scalars);
  for (const auto& st : traj.states) out += field_to_csv(st.u) + field_to_csv(st.v);
  return out;
}

Verdict reproducibility() {
  const std::string ref = outputs(1);
  bool ok = outputs(1) == ref;
  for (int w : {4, 8}) ok &= outputs(w) == ref;
  return {ok, std::to_string(ref.size()) +
                  " bytes of JSON/CSV compared over two runs and workers 1, 4, 8"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
      {1, operators},   {2, conservation}, {3, steady_state},
      {4, exact_solution}, {5, strong_order}, {6, arbitration},
      {7, positivity},  {8, moments},      {9, truncation},
      {10, lyapunov},   {11, reproducibility}};
  // Runtime limits in seconds; 0 means none.
  const std::vector<double> limits{10, 30, 0, 0, 300, 600, 0, 0, 0, 0, 0};

  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    if (!wanted.empty() && !wanted.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double limit = limits[id - 1];
    if (limit > 0 && secs > limit) {
      v.pass = false;
      v.detail += ", over the " + fmt("%.0f", limit) + " s limit";
    }
    std::printf("criterion %2d: %s  %s [%.1f s]\n", id, v.pass ? "PASS" : "FAIL",
                v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
