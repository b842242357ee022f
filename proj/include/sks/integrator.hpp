#pragma once

// Time stepping of the Ito-form system.
//
// Two SDE schemes share one noise treatment (explicit, Euler-Maruyama) and
// differ in how the linear part is handled:
//   semi_implicit_em   backward Euler on the Laplacian, tridiagonal solve
//   exponential_em     exact semigroup on the linear part, phi_1 on the
//                      frozen deterministic sources
// The Wong-Zakai reference integrates the random ODE obtained by replacing
// the noise with the piecewise-linear interpolant of the same Brownian
// coefficients, without any Ito correction.

#include "sks/conversion.hpp"
#include "sks/dynamics.hpp"
#include "sks/functionals.hpp"
#include "sks/wiener.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sks {

enum class Scheme { semi_implicit_em, exponential_em, wong_zakai_reference };

Scheme parse_scheme(std::string_view text);
std::string to_string(Scheme scheme);

struct SchemeConfig {
  Scheme scheme = Scheme::semi_implicit_em;
  double dt = 1e-3;
  double t_end = 1.0;
  int record_every = 1;
  /// Fine noise draws summed into each step's increment. A run at dt with
  /// substeps s sees exactly the Brownian path of a run at dt/s.
  int noise_substeps = 1;

  /// Steps needed to go from t0 to t_end.
  std::uint64_t steps_from(double t0) const;
  void validate() const;
};

/// Which parts of the drift are active in a step.
struct StepTerms {
  double chemotaxis_scale = 1.0;  // Psi product under truncation
  bool coupling = true;           // beta u source in the v equation
};

/// Linear heat regime: chemotaxis and coupling dropped.
inline constexpr StepTerms kHeatTerms{0.0, false};

enum class Regime { keller_segel, heat_continuation };

std::string to_string(Regime regime);

class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, std::uint64_t step, double time);
  std::uint64_t step() const { return step_; }
  double time() const { return time_; }

 private:
  std::uint64_t step_;
  double time_;
};

/// Solves (I - a Delta_h h^2) x = rhs with the reflected Neumann stencil.
Eigen::VectorXd solve_neumann_implicit(const Eigen::VectorXd& rhs, double a);

State step_semi_implicit(const State& state, const ModelParams& params,
                         const EffectiveParams& eff, const NoiseIncrement& dW1,
                         const NoiseIncrement& dW2, double dt,
                         StepTerms terms = {});

State step_exponential(const State& state, const ModelParams& params,
                       const EffectiveParams& eff, const NoiseIncrement& dW1,
                       const NoiseIncrement& dW2, double dt,
                       StepTerms terms = {});

/// Dispatches to one of the two SDE steppers.
State step_with(Scheme scheme, const State& state, const ModelParams& params,
                const EffectiveParams& eff, const NoiseIncrement& dW1,
                const NoiseIncrement& dW2, double dt, StepTerms terms = {});

/// One explicit midpoint step of the random ODE driven by the slopes of the
/// two piecewise-linear paths on the fine interval starting at state.t.
/// Throws NumericalFailure when |u| exceeds 1e12.
State wong_zakai_step(const State& state, const ModelParams& params,
                      const PiecewiseLinearPath& path1,
                      const PiecewiseLinearPath& path2, double dt_fine);

struct ScalarRecord {
  double t = 0.0;
  double mass_u = 0.0;
  double l1_u = 0.0;
  double l2_u = 0.0;
  double gradv_l2 = 0.0;
  double gradv_h1_running_integral = 0.0;
  double W = 0.0;  // NaN when not requested or u is too negative
  double E = 0.0;
  double min_u = 0.0;
  double min_v = 0.0;
  Regime regime = Regime::keller_segel;
  int truncation_level = 0;
};

struct Trajectory {
  std::vector<State> states;
  std::vector<std::uint64_t> state_steps;  // global step of each snapshot
  std::vector<ScalarRecord> scalars;       // one per step, initial included
};

/// Per-step observer/controller. A hook may change the active drift terms
/// and switch the regime; integrate() consults it before every step.
class StepHooks {
 public:
  virtual ~StepHooks() = default;
  virtual void start(const State& /*initial*/,
                     std::uint64_t /*global_step*/) {}
  virtual StepTerms terms() const { return {}; }
  virtual Regime regime() const { return Regime::keller_segel; }
  virtual int truncation_level() const { return 0; }
  virtual void after_step(const State& /*state*/, double /*dt*/,
                          std::uint64_t /*global_step*/) {}
};

struct NoisePair {
  RngStream w1;
  RngStream w2;
};

struct IntegrateOptions {
  std::optional<LyapunovParams> lyapunov;
  std::optional<double> tol_pos;  // default_tol_pos(u0) when unset
  /// Global step index of the initial state; noise for local step m is drawn
  /// at first_step + m, and state.t must equal first_step * dt.
  std::uint64_t first_step = 0;
  StepHooks* hooks = nullptr;
  bool keep_states = true;
  /// Value the running H1 integral column starts from.
  double h3_offset = 0.0;
};

/// Running record builder shared by integrate() and other drivers.
class ScalarRecorder {
 public:
  ScalarRecorder(std::optional<LyapunovParams> lyapunov, double tol_pos,
                 double h3_offset = 0.0);
  ScalarRecord record(const State& state, double dt_since_last, Regime regime,
                      int truncation_level);

 private:
  std::optional<LyapunovParams> lyapunov_;
  double tol_pos_;
  double h3_ = 0.0;
};

Trajectory integrate(const State& initial, const ModelParams& params,
                     const EffectiveParams& eff, const NoiseSpec& noise_u,
                     const NoiseSpec& noise_v, const SchemeConfig& cfg,
                     const NoisePair& rng, const IntegrateOptions& options = {});

/// Scalar records as CSV with the fixed column set.
std::string scalars_to_csv(const std::vector<ScalarRecord>& rows);

}  // namespace sks
