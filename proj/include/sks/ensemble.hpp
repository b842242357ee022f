#pragma once

// Monte Carlo orchestration.
//
// Paths are independent; path i draws from the noise streams of
// path_streams(base_seed, i). Workers pull path indices from a shared
// counter and write results into the slot of that index, and every
// statistic is reduced afterwards in index order, so reports do not depend
// on the worker count or on completion order.

#include "sks/diagnostics.hpp"
#include "sks/truncation.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace sks {

struct EnsembleConfig {
  std::size_t n_paths = 1;
  std::uint64_t base_seed = 0;
  int workers = 1;

  void validate() const;
};

/// Injective in path for a fixed base seed.
std::uint64_t path_seed(std::uint64_t base_seed, std::uint64_t path);
NoisePair path_streams(std::uint64_t base_seed, std::uint64_t path);

template <typename T>
struct PathOutcome {
  std::optional<T> value;
  std::string error;
};

/// Evaluates fn(i) for i in [0, n_paths) on `workers` threads. Exceptions are
/// captured per path; the returned vector is indexed by path.
template <typename Fn>
auto run_paths(const EnsembleConfig& cfg, Fn&& fn)
    -> std::vector<PathOutcome<std::invoke_result_t<Fn&, std::size_t>>> {
  using T = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<PathOutcome<T>> out(cfg.n_paths);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cfg.n_paths; i = next++) {
      try {
        out[i].value = fn(i);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };
  const int threads = std::max(
      1, std::min<int>(cfg.workers, static_cast<int>(cfg.n_paths)));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) pool.emplace_back(work);
  }
  return out;
}

struct PathFailure {
  std::size_t path = 0;
  std::string message;
};

/// Everything needed to simulate one path.
struct ModelSetup {
  GridSpec grid{64};
  ModelParams model;
  NoiseSpec noise_u = make_noise_spec(2.0, 0, 0.0);
  NoiseSpec noise_v = make_noise_spec(3.0, 0, 0.0);
  CorrectionConvention convention = CorrectionConvention::half_gamma;
  SchemeConfig scheme;
  Field u0{GridSpec{64}};
  Field v0{GridSpec{64}};
  LyapunovParams lyapunov;
  double threshold_multiplier = 1.0;

  EffectiveParams effective() const;
  State initial_state() const { return State(0.0, u0, v0); }
};

/// Simulates path i of the ensemble with the setup's scheme.
Trajectory simulate_path(const ModelSetup& setup, const EnsembleConfig& cfg,
                         std::size_t path, bool keep_states = false);

struct MomentsResult {
  MomentReport report;
  std::vector<PathMoments> per_path;  // empty entries for failed paths
  std::vector<PathFailure> failures;
  /// Paths whose u fell below -tol anywhere on the step grid; tol is
  /// tol_pos_factor * max(u0) when positive, else default_tol_pos(u0).
  std::size_t positivity_violations = 0;
  double worst_min_u = 0.0;
};

MomentsResult run_moments(const EnsembleConfig& cfg, const ModelSetup& setup,
                          double p = 1.0, double tol_pos_factor = 0.0);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  bool degenerate = false;
};

/// Least squares of log(y) on log(x); needs at least 3 points. Flags the fit
/// degenerate when any y is at or below `floor`.
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                    double floor = 1e-13);

/// Least squares of y on x with the slope's standard error.
SlopeFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);

struct StrongOrderResult {
  std::vector<double> dts;  // coarse to fine
  std::vector<double> errors;
  std::vector<double> error_se;
  SlopeFit fit;
  bool plateau = false;  // finest error >= 3/4 of coarsest
  std::vector<PathFailure> failures;
};

/// Mean endpoint error |u_dt(T) - u0 exp(W(T))| over a coupled dt ladder
/// dt_finest * 2^l, l = levels-1..0. Requires the spatially constant
/// reduction: single-mode noise, constant u0 and v0, beta = 0.
StrongOrderResult run_strong_order(const EnsembleConfig& cfg,
                                   const ModelSetup& setup, double dt_finest,
                                   int levels);

struct WongZakaiResult {
  std::vector<int> refinements;
  std::vector<double> gap_half;  // mean sup_t |u_wz - u_half|_{L2}
  std::vector<double> gap_full;
  std::vector<double> gap_half_se;
  std::vector<double> gap_full_se;
  bool half_decreasing = false;     // strictly decreasing along the ladder
  bool full_not_decreasing = false;  // last >= 3/4 of first
  std::string verdict;
  std::vector<PathFailure> failures;
};

/// For each refinement r the smoothed-noise solution at dt_coarse / r is
/// compared with the half- and full-gamma Ito schemes at the same dt and on
/// the same Brownian path; all levels share the draws of the finest one.
WongZakaiResult run_wong_zakai(const EnsembleConfig& cfg,
                               const ModelSetup& setup, double dt_coarse,
                               const std::vector<int>& refinements);

struct TruncationEventsResult {
  int level_max = 0;
  std::vector<double> reached_frequency;  // P(tau_bar_m >= T), m = 1..
  std::vector<double> m_times_early;      // m * (1 - reached_frequency)
  bool monotone = false;
  SlopeFit trend;  // linear fit of m_times_early on m
  bool no_upward_trend = false;
  std::vector<std::vector<double>> tau_bars;  // per path
  std::vector<PathFailure> failures;
};

TruncationEventsResult run_truncation_events(const EnsembleConfig& cfg,
                                             const ModelSetup& setup,
                                             int level_max);

}  // namespace sks
