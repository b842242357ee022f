#include "sks/truncation.hpp"

#include <cmath>
#include <cstdio>

namespace sks {

namespace {

double q(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

}  // namespace

double smooth_bump(double x) {
  const double a = std::abs(x);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double up = q(2.0 - a);
  return up / (up + q(a - 1.0));
}

double smooth_cutoff(const CutoffSpec& spec, double x) {
  return smooth_bump(x / spec.threshold());
}

RunningFunctionals start_functionals(const State& state) {
  return {l1_norm(state.u), l2_norm(gradient(state.v)), 0.0};
}

RunningFunctionals update_functionals(const RunningFunctionals& rf,
                                      const State& state, double dt) {
  const double grad = l2_norm(gradient(state.v));
  const double lap = l2_norm(neumann_laplacian(state.v, 1.0));
  return {std::max(rf.h1, l1_norm(state.u)), std::max(rf.h2, grad),
          rf.h3 + dt * (grad * grad + lap * lap)};
}

double truncation_factor(const RunningFunctionals& rf,
                         const CutoffSpec& spec) {
  return smooth_cutoff(spec, rf.h1) * smooth_cutoff(spec, rf.h2) *
         smooth_cutoff(spec, rf.h3);
}

Field truncated_drift_u(const State& state, const ModelParams& params,
                        double gamma_u, const RunningFunctionals& rf,
                        const CutoffSpec& spec) {
  return drift_u(state, params, gamma_u, truncation_factor(rf, spec));
}

std::string to_string(TriggerKind kind) {
  switch (kind) {
    case TriggerKind::l1_mass:
      return "h1";
    case TriggerKind::gradient_l2:
      return "h2";
    case TriggerKind::gradient_h1_integral:
      return "h3";
  }
  return "?";
}

std::optional<StoppingTrigger> check_stopping(const RunningFunctionals& rf,
                                              const CutoffSpec& spec,
                                              double t) {
  const double n = spec.threshold();
  if (rf.h1 >= n) return StoppingTrigger{TriggerKind::l1_mass, t};
  if (rf.h2 * rf.h2 >= n) return StoppingTrigger{TriggerKind::gradient_l2, t};
  if (rf.h3 >= n) return StoppingTrigger{TriggerKind::gradient_h1_integral, t};
  return std::nullopt;
}

State heat_continuation_step(Scheme scheme, const State& state,
                             const ModelParams& params,
                             const EffectiveParams& eff,
                             const NoiseIncrement& dW1,
                             const NoiseIncrement& dW2, double dt) {
  return step_with(scheme, state, params, eff, dW1, dW2, dt, kHeatTerms);
}

TruncationController::TruncationController(CutoffSpec spec, bool stopping)
    : spec_(spec), stopping_(stopping) {}

void TruncationController::start(const State& initial,
                                 std::uint64_t global_step) {
  rf_ = start_functionals(initial);
  regime_ = Regime::keller_segel;
  trigger_.reset();
  stopped_.reset();
  start_step_ = global_step;
  check(initial, global_step);
}

StepTerms TruncationController::terms() const {
  StepTerms terms;
  terms.chemotaxis_scale = truncation_factor(rf_, spec_);
  return terms;
}

void TruncationController::after_step(const State& state, double dt,
                                      std::uint64_t global_step) {
  if (regime_ == Regime::heat_continuation) return;
  rf_ = update_functionals(rf_, state, dt);
  check(state, global_step);
}

void TruncationController::check(const State& state,
                                 std::uint64_t global_step) {
  if (!stopping_ || trigger_) return;
  trigger_ = check_stopping(rf_, spec_, state.t);
  if (trigger_) {
    regime_ = Regime::heat_continuation;
    stopped_ = state;
    stopped_step_ = global_step;
  }
}

namespace {

// Appends the records of `seg` with global step < `until` to `prefix`.
void append_prefix(Trajectory& prefix, const Trajectory& seg,
                   std::uint64_t seg_first, std::uint64_t until) {
  for (std::size_t i = 0; i < seg.scalars.size(); ++i) {
    if (seg_first + i >= until) break;
    prefix.scalars.push_back(seg.scalars[i]);
  }
  for (std::size_t i = 0; i < seg.states.size(); ++i) {
    if (seg.state_steps[i] >= until) break;
    prefix.states.push_back(seg.states[i]);
    prefix.state_steps.push_back(seg.state_steps[i]);
  }
}

Trajectory joined(const Trajectory& prefix, const Trajectory& seg) {
  Trajectory out = prefix;
  out.scalars.insert(out.scalars.end(), seg.scalars.begin(),
                     seg.scalars.end());
  out.states.insert(out.states.end(), seg.states.begin(), seg.states.end());
  out.state_steps.insert(out.state_steps.end(), seg.state_steps.begin(),
                         seg.state_steps.end());
  return out;
}

}  // namespace

ConcatenatedRun run_concatenated(int level_max, const State& initial,
                                 const ModelParams& params,
                                 const EffectiveParams& eff,
                                 const NoiseSpec& noise_u,
                                 const NoiseSpec& noise_v,
                                 const SchemeConfig& cfg, const NoisePair& rng,
                                 const ConcatenationOptions& options) {
  if (level_max < 1) {
    throw std::invalid_argument("run_concatenated: level_max must be >= 1");
  }
  if (cfg.scheme == Scheme::wong_zakai_reference) {
    throw std::invalid_argument(
        "run_concatenated: requires an increment-driven scheme");
  }
  ConcatenatedRun run;
  run.t_end = cfg.t_end;
  const double tol_pos = options.tol_pos.value_or(default_tol_pos(initial.u));

  Trajectory prefix;  // bar u on [0, tau_bar_{n-1})
  State start = initial;
  std::uint64_t start_step = 0;
  double h3_offset = 0.0;
  double tau_bar = 0.0;

  for (int n = 1; n <= level_max; ++n) {
    LevelResult level;
    level.level = n;
    if (!run.levels.empty() && run.levels.back().reached_T) {
      const LevelResult& prev = run.levels.back();
      level.tau_star = 0.0;
      level.tau_bar = prev.tau_bar;
      level.reached_T = true;
      level.path = prev.path;
      run.levels.push_back(std::move(level));
      continue;
    }

    TruncationController controller(
        CutoffSpec{n, options.threshold_multiplier});
    IntegrateOptions io;
    io.lyapunov = options.lyapunov;
    io.tol_pos = tol_pos;
    io.first_step = start_step;
    io.hooks = &controller;
    io.keep_states = options.keep_paths;
    io.h3_offset = h3_offset;
    Trajectory seg;
    try {
      seg = integrate(start, params, eff, noise_u, noise_v, cfg, rng, io);
    } catch (const NumericalFailure& e) {
      throw NumericalFailure(std::string("level ") + std::to_string(n) +
                                 ": " + e.what(),
                             e.step(), e.time());
    }

    if (controller.trigger()) {
      level.trigger = controller.trigger()->kind;
      level.tau_star = controller.trigger()->t - tau_bar;
      level.tau_bar = controller.trigger()->t;
      level.reached_T = false;
    } else {
      level.tau_star = cfg.t_end - tau_bar;
      level.tau_bar = cfg.t_end;
      level.reached_T = true;
    }
    if (options.keep_paths) level.path = joined(prefix, seg);

    if (controller.trigger()) {
      const std::uint64_t stop = controller.stopped_step();
      const std::size_t idx = static_cast<std::size_t>(stop - start_step);
      h3_offset = seg.scalars[idx].gradv_h1_running_integral;
      append_prefix(prefix, seg, start_step, stop);
      start = *controller.stopped_state();
      start_step = stop;
      tau_bar = level.tau_bar;
    }
    run.levels.push_back(std::move(level));
  }
  return run;
}

std::string level_events_to_csv(const ConcatenatedRun& run) {
  std::string out = "level,tau_star,trigger_kind,tau_bar,reached_T\n";
  char line[256];
  for (const auto& level : run.levels) {
    const std::string kind =
        level.trigger ? to_string(*level.trigger) : std::string("none");
    std::snprintf(line, sizeof line, "%d,%.17g,%s,%.17g,%s\n", level.level,
                  level.tau_star, kind.c_str(), level.tau_bar,
                  level.reached_T ? "true" : "false");
    out += line;
  }
  return out;
}

}  // namespace sks
