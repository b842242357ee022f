#pragma once

// Trajectory-level diagnostics: the moment functionals whose expectations
// the a priori estimates bound, their ensemble statistics, and an empirical
// Hölder seminorm of the stochastic convolution part of u.
//
// Sup-over-time quantities are taken on the recorded step grid and are
// therefore lower bounds of the continuous-time suprema.

#include "sks/conversion.hpp"
#include "sks/integrator.hpp"

#include <cstddef>

namespace sks {

struct PathMoments {
  double sup_l1_u = 0.0;         // sup_t |u|_{L1}
  double sup_gradv_l2_sq = 0.0;  // sup_t |grad v|_{L2}^2
  double int_gradv_h1_sq = 0.0;  // int_0^T |grad v|_{H1}^2 dt
  double sup_W = 0.0;            // sup_t W (NaN if W was not recorded)
};

/// Per-path functionals; p raises each to the p-th power (p = 1 leaves them).
PathMoments moment_functionals(const Trajectory& traj, double p = 1.0);

/// Running sums for one functional across paths. merge() adds sums, so the
/// result depends only on which paths were merged (up to floating-point
/// association; ensembles merge in path-index order).
struct FunctionalStats {
  std::size_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  double sum_p = 0.0;  // sum of x^p

  void add(double x, double p);
  void merge(const FunctionalStats& other);

  double mean() const;
  double variance() const;  // unbiased, 0 for count < 2
  double std_error() const;
  double half_width_95() const;
  double p_moment() const;
};

struct MomentReport {
  double p = 1.0;
  FunctionalStats sup_l1_u;
  FunctionalStats sup_gradv_l2_sq;
  FunctionalStats int_gradv_h1_sq;
  FunctionalStats sup_W;
  std::size_t failures = 0;

  void add(const PathMoments& path);
  void merge(const MomentReport& other);
};

/// max over snapshot pairs of |z(t2) - z(t1)|_{H^{2 delta}} / (t2 - t1)^beta
/// with z(t) = u(t) - e^{t(r_u A + gamma_u I)} u(0).
/// Throws std::invalid_argument with fewer than two snapshots.
double holder_seminorm(const Trajectory& traj, const ModelParams& params,
                       const EffectiveParams& eff, double beta, double delta);

/// Positivity over a whole trajectory; first_offending_time is the first
/// recorded time with a node below -tol_pos.
PositivityReport positivity_report(const Trajectory& traj, double tol_pos);

}  // namespace sks
