#pragma once

// Pointwise-in-time functionals of a state: the Lyapunov functional W, the
// energy E, the admissibility of their constants, and positivity checks.

#include "sks/dynamics.hpp"

#include <optional>

namespace sks {

struct LyapunovParams {
  double rho = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
};

/// 1e-10 * max(1, max u0).
double default_tol_pos(const Field& u0);

/// int u log u dx with 0 log 0 = 0; values in [-tol_pos, 0) count as 0 and
/// anything lower throws NegativeValueError.
double entropy_integral(const Field& u, double tol_pos);

/// W(u, v) = int (u log u - rho u v) dx + C1 |grad v|^2 + C2 |v|^2.
double lyapunov_W(const State& state, const LyapunovParams& lp,
                  double tol_pos);

/// E(u, v) = int u log u dx + C1 |grad v|^2 + C2 |v|^2.
double energy_E(const State& state, const LyapunovParams& lp, double tol_pos);

struct ConstantsReport {
  bool applicable = false;  // false when beta == 0 or r_v == 0
  double c1_bound = 0.0;    // C1 > (r_u + r_v) / (beta r_v)
  bool c1_ok = false;
  double denominator = 0.0;  // C1 beta r_v - r_v - r_u
  bool denominator_ok = false;
  double rho_bound = 0.0;  // rho > (chi + C1 beta) / denominator
  bool rho_ok = false;
  double c1_margin = 0.0;
  double rho_margin = 0.0;

  bool pass() const { return applicable && c1_ok && denominator_ok && rho_ok; }
};

ConstantsReport validate_constants(const LyapunovParams& lp,
                                   const ModelParams& mp);

struct PositivityReport {
  double min_u = 0.0;
  double min_v = 0.0;
  int argmin_u = 0;
  int violations = 0;  // nodes with u < -tol_pos
  double violation_fraction = 0.0;
  std::optional<double> first_offending_time;
};

PositivityReport positivity_report(const State& state, double tol_pos);

}  // namespace sks
