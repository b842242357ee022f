#include "sks/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sks {

PathMoments moment_functionals(const Trajectory& traj, double p) {
  if (traj.scalars.empty()) {
    throw std::invalid_argument("moment_functionals: empty trajectory");
  }
  PathMoments m;
  m.sup_W = -std::numeric_limits<double>::infinity();
  for (const auto& r : traj.scalars) {
    m.sup_l1_u = std::max(m.sup_l1_u, r.l1_u);
    m.sup_gradv_l2_sq = std::max(m.sup_gradv_l2_sq, r.gradv_l2 * r.gradv_l2);
    if (std::isnan(r.W) || std::isnan(m.sup_W)) {
      m.sup_W = std::numeric_limits<double>::quiet_NaN();
    } else {
      m.sup_W = std::max(m.sup_W, r.W);
    }
  }
  m.int_gradv_h1_sq = traj.scalars.back().gradv_h1_running_integral -
                      traj.scalars.front().gradv_h1_running_integral;
  if (p != 1.0) {
    m.sup_l1_u = std::pow(m.sup_l1_u, p);
    m.sup_gradv_l2_sq = std::pow(m.sup_gradv_l2_sq, p);
    m.int_gradv_h1_sq = std::pow(m.int_gradv_h1_sq, p);
  }
  return m;
}

void FunctionalStats::add(double x, double p) {
  ++count;
  sum += x;
  sum_sq += x * x;
  sum_p += p == 1.0 ? x : std::pow(x, p);
}

void FunctionalStats::merge(const FunctionalStats& other) {
  count += other.count;
  sum += other.sum;
  sum_sq += other.sum_sq;
  sum_p += other.sum_p;
}

double FunctionalStats::mean() const {
  return count ? sum / static_cast<double>(count) : 0.0;
}

double FunctionalStats::variance() const {
  if (count < 2) return 0.0;
  const double n = static_cast<double>(count);
  const double v = (sum_sq - sum * sum / n) / (n - 1.0);
  return std::max(v, 0.0);
}

double FunctionalStats::std_error() const {
  return count ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

double FunctionalStats::half_width_95() const { return 1.96 * std_error(); }

double FunctionalStats::p_moment() const {
  return count ? sum_p / static_cast<double>(count) : 0.0;
}

void MomentReport::add(const PathMoments& path) {
  sup_l1_u.add(path.sup_l1_u, p);
  sup_gradv_l2_sq.add(path.sup_gradv_l2_sq, p);
  int_gradv_h1_sq.add(path.int_gradv_h1_sq, p);
  sup_W.add(path.sup_W, 1.0);
}

void MomentReport::merge(const MomentReport& other) {
  sup_l1_u.merge(other.sup_l1_u);
  sup_gradv_l2_sq.merge(other.sup_gradv_l2_sq);
  int_gradv_h1_sq.merge(other.int_gradv_h1_sq);
  sup_W.merge(other.sup_W);
  failures += other.failures;
}

double holder_seminorm(const Trajectory& traj, const ModelParams& params,
                       const EffectiveParams& eff, double beta,
                       double delta) {
  if (traj.states.size() < 2) {
    throw std::invalid_argument("holder_seminorm: need at least 2 snapshots");
  }
  const State& s0 = traj.states.front();
  std::vector<SpectralField> z;
  z.reserve(traj.states.size());
  for (const auto& s : traj.states) {
    const Field free = apply_heat_semigroup(s0.u, s.t - s0.t, params.r_u,
                                            eff.gamma_u);
    z.push_back(to_spectral(s.u - free));
  }
  double best = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t j = i + 1; j < z.size(); ++j) {
      const double gap = traj.states[j].t - traj.states[i].t;
      if (!(gap > 0.0)) continue;
      const SpectralField diff{z[i].grid, z[j].cos_coeffs - z[i].cos_coeffs};
      const double d = bessel_norm_of_coeffs(diff, 2.0 * delta);
      best = std::max(best, d / std::pow(gap, beta));
    }
  }
  return best;
}

PositivityReport positivity_report(const Trajectory& traj, double tol_pos) {
  if (traj.states.empty()) {
    throw std::invalid_argument("positivity_report: no snapshots");
  }
  PositivityReport total = positivity_report(traj.states.front(), tol_pos);
  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    const auto r = positivity_report(traj.states[i], tol_pos);
    if (r.min_u < total.min_u) {
      total.min_u = r.min_u;
      total.argmin_u = r.argmin_u;
    }
    total.min_v = std::min(total.min_v, r.min_v);
    if (r.violations > total.violations) {
      total.violations = r.violations;
      total.violation_fraction = r.violation_fraction;
    }
    if (!total.first_offending_time && r.first_offending_time) {
      total.first_offending_time = r.first_offending_time;
    }
  }
  return total;
}

}  // namespace sks
