#pragma once

// Cut-off and stopping-time machinery.
//
// The truncated system multiplies the chemotaxis term by
// Psi = psi_n(h1) psi_n(h2) psi_n(h3), with
//   h1(t) = sup_{s<=t} |u(s)|_{L1},
//   h2(t) = sup_{s<=t} |grad v(s)|_{L2},
//   h3(t) = int_0^t |grad v(s)|_{H1}^2 ds,
// and level n stops at the first grid time where h1 >= n, h2^2 >= n or
// h3 >= n. After the stop the path follows the linear heat regime to T,
// and level n+1 restarts the truncated system from the stopped state with
// fresh accumulators. All levels share one pair of noise streams, so the
// level-n path is a prefix-extension of the level-(n-1) path.

#include "sks/integrator.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sks {

/// The pinned C-infinity bump: 1 on [-1,1], 0 outside (-2,2), and
/// q(2-|x|) / (q(2-|x|) + q(|x|-1)) in between with q(s) = exp(-1/s).
double smooth_bump(double x);

struct CutoffSpec {
  int level = 1;
  /// Multiplies every threshold; 1 reproduces the integer schedule n.
  double threshold_multiplier = 1.0;

  double threshold() const { return level * threshold_multiplier; }
};

/// psi_n(x) = psi(x / threshold).
double smooth_cutoff(const CutoffSpec& spec, double x);

struct RunningFunctionals {
  double h1 = 0.0;
  double h2 = 0.0;
  double h3 = 0.0;
};

/// Accumulators at the start of a level: sups seeded by the state, h3 = 0.
RunningFunctionals start_functionals(const State& state);

/// h1, h2 take the running max; h3 += dt (|grad v|^2 + |Delta_h v|^2).
RunningFunctionals update_functionals(const RunningFunctionals& rf,
                                      const State& state, double dt);

/// Psi^1 Psi^2 Psi^3.
double truncation_factor(const RunningFunctionals& rf, const CutoffSpec& spec);

Field truncated_drift_u(const State& state, const ModelParams& params,
                        double gamma_u, const RunningFunctionals& rf,
                        const CutoffSpec& spec);

enum class TriggerKind { l1_mass, gradient_l2, gradient_h1_integral };

std::string to_string(TriggerKind kind);

struct StoppingTrigger {
  TriggerKind kind;
  double t;
};

/// The first functional (in h1, h2, h3 order) at or above its threshold.
std::optional<StoppingTrigger> check_stopping(const RunningFunctionals& rf,
                                              const CutoffSpec& spec, double t);

/// One step of the linear regime: chemotaxis and coupling dropped, the
/// gamma_u growth and alpha_eff damping kept.
State heat_continuation_step(Scheme scheme, const State& state,
                             const ModelParams& params,
                             const EffectiveParams& eff,
                             const NoiseIncrement& dW1,
                             const NoiseIncrement& dW2, double dt);

/// Hook driving one level of the truncated system inside integrate().
class TruncationController : public StepHooks {
 public:
  /// With stopping disabled the controller only applies the cut-off.
  explicit TruncationController(CutoffSpec spec, bool stopping = true);

  void start(const State& initial, std::uint64_t global_step) override;
  StepTerms terms() const override;
  Regime regime() const override { return regime_; }
  int truncation_level() const override { return spec_.level; }
  void after_step(const State& state, double dt,
                  std::uint64_t global_step) override;

  const RunningFunctionals& functionals() const { return rf_; }
  const std::optional<StoppingTrigger>& trigger() const { return trigger_; }
  /// State and global step at the stopping time.
  const std::optional<State>& stopped_state() const { return stopped_; }
  std::uint64_t stopped_step() const { return stopped_step_; }

 private:
  void check(const State& state, std::uint64_t global_step);

  CutoffSpec spec_;
  bool stopping_;
  RunningFunctionals rf_;
  Regime regime_ = Regime::keller_segel;
  std::optional<StoppingTrigger> trigger_;
  std::optional<State> stopped_;
  std::uint64_t stopped_step_ = 0;
  std::uint64_t start_step_ = 0;
};

struct LevelResult {
  int level = 0;
  double tau_star = 0.0;  // length of this level's Keller-Segel segment
  std::optional<TriggerKind> trigger;
  double tau_bar = 0.0;  // tau*_1 + ... + tau*_n
  bool reached_T = false;
  /// The concatenated path (bar u_n, bar v_n) on [0, T]; empty unless kept.
  Trajectory path;
};

struct ConcatenatedRun {
  std::vector<LevelResult> levels;
  double t_end = 0.0;
};

struct ConcatenationOptions {
  double threshold_multiplier = 1.0;
  bool keep_paths = true;
  std::optional<LyapunovParams> lyapunov;
  std::optional<double> tol_pos;
};

ConcatenatedRun run_concatenated(int level_max, const State& initial,
                                 const ModelParams& params,
                                 const EffectiveParams& eff,
                                 const NoiseSpec& noise_u,
                                 const NoiseSpec& noise_v,
                                 const SchemeConfig& cfg, const NoisePair& rng,
                                 const ConcatenationOptions& options = {});

/// Per-level event log: level,tau_star,trigger_kind,tau_bar,reached_T.
std::string level_events_to_csv(const ConcatenatedRun& run);

}  // namespace sks
