#include "sks/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace sks {

double default_tol_pos(const Field& u0) {
  return 1e-10 * std::max(1.0, u0.values().maxCoeff());
}

double entropy_integral(const Field& u, double tol_pos) {
  Eigen::VectorXd g(u.size());
  for (int j = 0; j < u.size(); ++j) {
    const double x = u[j];
    if (x < -tol_pos) throw NegativeValueError(j, x);
    g[j] = x > 0.0 ? x * std::log(x) : 0.0;
  }
  return trapezoid(Field(u.grid(), std::move(g)));
}

namespace {

double quadratic_terms(const State& state, const LyapunovParams& lp) {
  const double grad = l2_norm(gradient(state.v));
  const double v = l2_norm(state.v);
  return lp.c1 * grad * grad + lp.c2 * v * v;
}

}  // namespace

double lyapunov_W(const State& state, const LyapunovParams& lp,
                  double tol_pos) {
  const double cross = trapezoid(pointwise(state.u, state.v));
  return entropy_integral(state.u, tol_pos) - lp.rho * cross +
         quadratic_terms(state, lp);
}

double energy_E(const State& state, const LyapunovParams& lp,
                double tol_pos) {
  return entropy_integral(state.u, tol_pos) + quadratic_terms(state, lp);
}

ConstantsReport validate_constants(const LyapunovParams& lp,
                                   const ModelParams& mp) {
  ConstantsReport r;
  if (mp.beta == 0.0 || mp.r_v == 0.0) return r;
  r.applicable = true;
  r.c1_bound = (mp.r_u + mp.r_v) / (mp.beta * mp.r_v);
  r.c1_ok = lp.c1 > r.c1_bound;
  r.c1_margin = lp.c1 - r.c1_bound;
  r.denominator = lp.c1 * mp.beta * mp.r_v - mp.r_v - mp.r_u;
  r.denominator_ok = r.denominator > 0.0;
  if (r.denominator_ok) {
    r.rho_bound = (mp.chi + lp.c1 * mp.beta) / r.denominator;
    r.rho_ok = lp.rho > r.rho_bound;
    r.rho_margin = lp.rho - r.rho_bound;
  }
  return r;
}

PositivityReport positivity_report(const State& state, double tol_pos) {
  PositivityReport r;
  Eigen::Index arg = 0;
  r.min_u = state.u.values().minCoeff(&arg);
  r.argmin_u = static_cast<int>(arg);
  r.min_v = state.v.values().minCoeff();
  r.violations = static_cast<int>((state.u.values().array() < -tol_pos).count());
  r.violation_fraction = static_cast<double>(r.violations) / state.u.size();
  if (r.violations > 0) r.first_offending_time = state.t;
  return r;
}

}  // namespace sks
