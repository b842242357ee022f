#include "sks/integrator.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace sks {

Scheme parse_scheme(std::string_view text) {
  if (text == "semi_implicit_em" || text == "semi_implicit") {
    return Scheme::semi_implicit_em;
  }
  if (text == "exponential_em" || text == "exponential") {
    return Scheme::exponential_em;
  }
  if (text == "wong_zakai_reference" || text == "wong_zakai") {
    return Scheme::wong_zakai_reference;
  }
  throw std::invalid_argument("unknown scheme '" + std::string(text) + "'");
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::semi_implicit_em:
      return "semi_implicit_em";
    case Scheme::exponential_em:
      return "exponential_em";
    case Scheme::wong_zakai_reference:
      return "wong_zakai_reference";
  }
  return "?";
}

std::string to_string(Regime regime) {
  return regime == Regime::keller_segel ? "keller_segel" : "heat_continuation";
}

std::uint64_t SchemeConfig::steps_from(double t0) const {
  const double span = t_end - t0;
  if (span <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::llround(span / dt));
}

void SchemeConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("scheme.dt must be > 0");
  if (!(t_end >= 0.0)) throw std::invalid_argument("scheme.t_end must be >= 0");
  if (t_end > 0.0 && dt > t_end) {
    throw std::invalid_argument("scheme.dt must not exceed scheme.t_end");
  }
  if (t_end / dt > 9.0e15) {
    throw std::invalid_argument("scheme.t_end / scheme.dt too large");
  }
  if (record_every < 1) {
    throw std::invalid_argument("scheme.record_every must be >= 1");
  }
  if (noise_substeps < 1) {
    throw std::invalid_argument("scheme.noise_substeps must be >= 1");
  }
}

NumericalFailure::NumericalFailure(const std::string& what,
                                   std::uint64_t step, double time)
    : std::runtime_error(what + " at step " + std::to_string(step) +
                         " (t = " + std::to_string(time) + ")"),
      step_(step),
      time_(time) {}

Eigen::VectorXd solve_neumann_implicit(const Eigen::VectorXd& rhs, double a) {
  // Solves for the increment d = x - rhs, (I - a L) d = a L rhs, so rounding
  // scales with |d| rather than |x| and the discrete mass drifts far less.
  // Thomas algorithm; rows 0 and N carry the reflected 2a off-diagonal.
  const Eigen::Index m = rhs.size();
  const Eigen::Index n = m - 1;
  Eigen::VectorXd b(m);
  b[0] = 2.0 * a * (rhs[1] - rhs[0]);
  b[n] = 2.0 * a * (rhs[n - 1] - rhs[n]);
  for (Eigen::Index j = 1; j < n; ++j) {
    b[j] = a * ((rhs[j - 1] - rhs[j]) + (rhs[j + 1] - rhs[j]));
  }
  const double diag = 1.0 + 2.0 * a;
  Eigen::VectorXd c(m);
  Eigen::VectorXd d(m);
  c[0] = -2.0 * a / diag;
  d[0] = b[0] / diag;
  for (Eigen::Index j = 1; j < m; ++j) {
    const double lower = j == n ? -2.0 * a : -a;
    const double upper = -a;
    const double denom = diag - lower * c[j - 1];
    c[j] = j == n ? 0.0 : upper / denom;
    d[j] = (b[j] - lower * d[j - 1]) / denom;
  }
  Eigen::VectorXd x(m);
  x[n] = d[n];
  for (Eigen::Index j = n - 1; j >= 0; --j) x[j] = d[j] - c[j] * x[j + 1];
  return rhs + x;
}

State step_semi_implicit(const State& state, const ModelParams& params,
                         const EffectiveParams& eff, const NoiseIncrement& dW1,
                         const NoiseIncrement& dW2, double dt,
                         StepTerms terms) {
  const GridSpec& grid = state.u.grid();
  const double h2 = grid.spacing() * grid.spacing();

  Eigen::VectorXd rhs_u = state.u.values() +
                          dt * eff.gamma_u * state.u.values() +
                          diffusion_action(state.u, dW1).values();
  if (terms.chemotaxis_scale != 0.0) {
    rhs_u -= dt * chemotactic_divergence(state.u, state.v,
                                         terms.chemotaxis_scale * params.chi)
                      .values();
  }
  Eigen::VectorXd rhs_v = state.v.values() -
                          dt * eff.alpha_eff * state.v.values() +
                          diffusion_action(state.v, dW2).values();
  if (terms.coupling) rhs_v += dt * params.beta * state.u.values();

  Field u(grid, solve_neumann_implicit(rhs_u, dt * params.r_u / h2));
  Field v(grid, solve_neumann_implicit(rhs_v, dt * params.r_v / h2));
  return State(state.t + dt, std::move(u), std::move(v));
}

namespace {

// e^{dt L} a + dt phi_1(dt L) b on cosine coefficients, L = D A + c I.
Eigen::VectorXd propagate_modes(const Eigen::VectorXd& a,
                                const Eigen::VectorXd* b, double dt,
                                double diffusivity, double zeroth_order) {
  Eigen::VectorXd out(a.size());
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double z =
        dt * heat_mode_rate(static_cast<int>(k), diffusivity, zeroth_order);
    out[k] = std::exp(z) * a[k];
    if (b) out[k] += dt * phi1(z) * (*b)[k];
  }
  return out;
}

}  // namespace

State step_exponential(const State& state, const ModelParams& params,
                       const EffectiveParams& eff, const NoiseIncrement& dW1,
                       const NoiseIncrement& dW2, double dt,
                       StepTerms terms) {
  const GridSpec& grid = state.u.grid();
  const auto& dct = CosineTransform<double>::get(grid.n_cells());

  const Eigen::VectorXd u_modes = dct.forward(
      state.u.values() + diffusion_action(state.u, dW1).values());
  Eigen::VectorXd u_next;
  if (terms.chemotaxis_scale != 0.0) {
    const Eigen::VectorXd taxis = dct.forward(
        -chemotactic_divergence(state.u, state.v,
                                terms.chemotaxis_scale * params.chi)
             .values());
    u_next = propagate_modes(u_modes, &taxis, dt, params.r_u, eff.gamma_u);
  } else {
    u_next = propagate_modes(u_modes, nullptr, dt, params.r_u, eff.gamma_u);
  }

  const Eigen::VectorXd v_modes = dct.forward(
      state.v.values() + diffusion_action(state.v, dW2).values());
  Eigen::VectorXd v_next;
  if (terms.coupling) {
    const Eigen::VectorXd source = dct.forward(params.beta * state.u.values());
    v_next = propagate_modes(v_modes, &source, dt, params.r_v, -eff.alpha_eff);
  } else {
    v_next = propagate_modes(v_modes, nullptr, dt, params.r_v, -eff.alpha_eff);
  }

  return State(state.t + dt, Field(grid, dct.inverse(u_next)),
               Field(grid, dct.inverse(v_next)));
}

State step_with(Scheme scheme, const State& state, const ModelParams& params,
                const EffectiveParams& eff, const NoiseIncrement& dW1,
                const NoiseIncrement& dW2, double dt, StepTerms terms) {
  switch (scheme) {
    case Scheme::semi_implicit_em:
      return step_semi_implicit(state, params, eff, dW1, dW2, dt, terms);
    case Scheme::exponential_em:
      return step_exponential(state, params, eff, dW1, dW2, dt, terms);
    case Scheme::wong_zakai_reference:
      break;
  }
  throw std::invalid_argument(
      "step_with: the Wong-Zakai reference is not an increment-driven scheme");
}

namespace {

struct RandomOdeRhs {
  Field du;
  Field dv;
};

RandomOdeRhs random_ode_rhs(const Field& u, const Field& v,
                            const ModelParams& params, const Field& slope1,
                            const Field& slope2) {
  const Eigen::VectorXd du =
      neumann_laplacian(u, params.r_u).values() -
      chemotactic_divergence(u, v, params.chi).values() +
      u.values().cwiseProduct(slope1.values());
  const Eigen::VectorXd dv = neumann_laplacian(v, params.r_v).values() -
                             params.alpha * v.values() +
                             params.beta * u.values() +
                             v.values().cwiseProduct(slope2.values());
  return {Field(u.grid(), du), Field(v.grid(), dv)};
}

}  // namespace

State wong_zakai_step(const State& state, const ModelParams& params,
                      const PiecewiseLinearPath& path1,
                      const PiecewiseLinearPath& path2, double dt_fine) {
  const double t_mid = state.t + 0.5 * dt_fine;
  const Field s1 = path1.slope(t_mid);
  const Field s2 = path2.slope(t_mid);
  const auto k1 = random_ode_rhs(state.u, state.v, params, s1, s2);
  const Field u_mid(state.u.grid(),
                    state.u.values() + 0.5 * dt_fine * k1.du.values());
  const Field v_mid(state.v.grid(),
                    state.v.values() + 0.5 * dt_fine * k1.dv.values());
  const auto k2 = random_ode_rhs(u_mid, v_mid, params, s1, s2);
  State next(state.t + dt_fine,
             Field(state.u.grid(), state.u.values() + dt_fine * k2.du.values()),
             Field(state.v.grid(),
                   state.v.values() + dt_fine * k2.dv.values()));
  const double size = next.u.values().cwiseAbs().maxCoeff();
  if (!(size <= 1e12)) {
    throw NumericalFailure("Wong-Zakai step: |u| exceeded 1e12",
                           static_cast<std::uint64_t>(
                               std::llround(state.t / dt_fine)),
                           state.t);
  }
  return next;
}

ScalarRecorder::ScalarRecorder(std::optional<LyapunovParams> lyapunov,
                               double tol_pos, double h3_offset)
    : lyapunov_(lyapunov), tol_pos_(tol_pos), h3_(h3_offset) {}

ScalarRecord ScalarRecorder::record(const State& state, double dt_since_last,
                                    Regime regime, int truncation_level) {
  ScalarRecord r;
  r.t = state.t;
  r.mass_u = trapezoid(state.u);
  r.l1_u = l1_norm(state.u);
  r.l2_u = l2_norm(state.u);
  r.gradv_l2 = l2_norm(gradient(state.v));
  const double lap = l2_norm(neumann_laplacian(state.v, 1.0));
  h3_ += dt_since_last * (r.gradv_l2 * r.gradv_l2 + lap * lap);
  r.gradv_h1_running_integral = h3_;
  r.W = r.E = std::numeric_limits<double>::quiet_NaN();
  if (lyapunov_) {
    try {
      r.W = lyapunov_W(state, *lyapunov_, tol_pos_);
      r.E = energy_E(state, *lyapunov_, tol_pos_);
    } catch (const NegativeValueError&) {
    }
  }
  r.min_u = state.u.values().minCoeff();
  r.min_v = state.v.values().minCoeff();
  r.regime = regime;
  r.truncation_level = truncation_level;
  return r;
}

Trajectory integrate(const State& initial, const ModelParams& params,
                     const EffectiveParams& eff, const NoiseSpec& noise_u,
                     const NoiseSpec& noise_v, const SchemeConfig& cfg,
                     const NoisePair& rng, const IntegrateOptions& options) {
  cfg.validate();
  const GridSpec grid = initial.u.grid();
  const NoiseSampler sampler_u(noise_u, grid);
  const NoiseSampler sampler_v(noise_v, grid);
  const double dt = cfg.dt;
  const std::uint64_t first = options.first_step;
  const std::uint64_t steps = cfg.steps_from(initial.t);
  StepHooks default_hooks;
  StepHooks& hooks = options.hooks ? *options.hooks : default_hooks;

  std::optional<PiecewiseLinearPath> path_u;
  std::optional<PiecewiseLinearPath> path_v;
  if (cfg.scheme == Scheme::wong_zakai_reference) {
    path_u.emplace(sampler_u, rng.w1, cfg.t_end, dt, 1, cfg.noise_substeps);
    path_v.emplace(sampler_v, rng.w2, cfg.t_end, dt, 1, cfg.noise_substeps);
  }

  ScalarRecorder recorder(options.lyapunov,
                          options.tol_pos.value_or(default_tol_pos(initial.u)),
                          options.h3_offset);
  Trajectory traj;
  traj.scalars.reserve(steps + 1);
  hooks.start(initial, first);
  traj.scalars.push_back(
      recorder.record(initial, 0.0, hooks.regime(), hooks.truncation_level()));
  if (options.keep_states) {
    traj.states.push_back(initial);
    traj.state_steps.push_back(first);
  }

  State state = initial;
  for (std::uint64_t m = 0; m < steps; ++m) {
    const std::uint64_t global = first + m;
    if (cfg.scheme == Scheme::wong_zakai_reference) {
      state = wong_zakai_step(state, params, *path_u, *path_v, dt);
    } else {
      const StepTerms terms = hooks.regime() == Regime::heat_continuation
                                  ? kHeatTerms
                                  : hooks.terms();
      const auto dW1 =
          sampler_u.increment(rng.w1, global, dt, cfg.noise_substeps);
      const auto dW2 =
          sampler_v.increment(rng.w2, global, dt, cfg.noise_substeps);
      state = step_with(cfg.scheme, state, params, eff, dW1, dW2, dt, terms);
    }
    state.t = static_cast<double>(global + 1) * dt;
    if (!state.all_finite()) {
      throw NumericalFailure("non-finite state", global + 1, state.t);
    }
    hooks.after_step(state, dt, global + 1);
    traj.scalars.push_back(
        recorder.record(state, dt, hooks.regime(), hooks.truncation_level()));
    if (options.keep_states && (global + 1) % cfg.record_every == 0) {
      traj.states.push_back(state);
      traj.state_steps.push_back(global + 1);
    }
  }
  return traj;
}

std::string scalars_to_csv(const std::vector<ScalarRecord>& rows) {
  std::string out =
      "t,mass_u,l1_u,l2_u,gradv_l2,gradv_h1_running_integral,W,E,min_u,"
      "min_v,regime,truncation_level\n";
  char line[512];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%s,%d\n",
                  r.t, r.mass_u, r.l1_u, r.l2_u, r.gradv_l2,
                  r.gradv_h1_running_integral, r.W, r.E, r.min_u, r.min_v,
                  to_string(r.regime).c_str(), r.truncation_level);
    out += line;
  }
  return out;
}

}  // namespace sks
