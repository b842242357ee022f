#include "sks/report.hpp"

#include <fstream>
#include <stdexcept>

namespace sks {

using nlohmann::ordered_json;

namespace {

ordered_json stats_json(const FunctionalStats& s) {
  return ordered_json{{"count", s.count},
                      {"mean", s.mean()},
                      {"variance", s.variance()},
                      {"std_error", s.std_error()},
                      {"p_moment", s.p_moment()},
                      {"half_width_95", s.half_width_95()}};
}

ordered_json failures_json(const std::vector<PathFailure>& failures) {
  ordered_json out = ordered_json::array();
  for (const auto& f : failures) {
    out.push_back({{"path", f.path}, {"message", f.message}});
  }
  return out;
}

ordered_json fit_json(const SlopeFit& fit) {
  return ordered_json{{"slope", fit.slope},
                      {"intercept", fit.intercept},
                      {"slope_se", fit.slope_se},
                      {"degenerate", fit.degenerate}};
}

ordered_json hs_json(const HsReport& r) {
  return ordered_json{{"admissible", r.admissible},
                      {"delta_threshold", r.delta_threshold},
                      {"tail_bound", r.tail_bound}};
}

}  // namespace

ordered_json config_echo(const RunConfig& c) {
  std::string refinements;
  for (std::size_t i = 0; i < c.study.refinements.size(); ++i) {
    if (i) refinements += ",";
    refinements += std::to_string(c.study.refinements[i]);
  }
  return ordered_json{
      {"grid.n_cells", c.n_cells},
      {"model.r_u", c.model.r_u},
      {"model.r_v", c.model.r_v},
      {"model.chi", c.model.chi},
      {"model.alpha", c.model.alpha},
      {"model.beta", c.model.beta},
      {"noise1.delta", c.delta1},
      {"noise1.K", c.k1},
      {"noise1.amplitude", c.amplitude1},
      {"noise2.delta", c.delta2},
      {"noise2.K", c.k2},
      {"noise2.amplitude", c.amplitude2},
      {"scheme.kind", to_string(c.scheme.scheme)},
      {"scheme.dt", c.scheme.dt},
      {"scheme.t_end", c.scheme.t_end},
      {"scheme.record_every", c.scheme.record_every},
      {"scheme.noise_substeps", c.scheme.noise_substeps},
      {"correction_convention", to_string(c.convention)},
      {"truncation.level_max", c.level_max},
      {"truncation.threshold_multiplier", c.threshold_multiplier},
      {"lyapunov.rho", c.lyapunov.rho},
      {"lyapunov.c1", c.lyapunov.c1},
      {"lyapunov.c2", c.lyapunov.c2},
      {"ensemble.n_paths", c.ensemble.n_paths},
      {"ensemble.base_seed", c.ensemble.base_seed},
      {"initial.u_mean", c.initial.u_mean},
      {"initial.u_amp", c.initial.u_amp},
      {"initial.u_mode", c.initial.u_mode},
      {"initial.v_mean", c.initial.v_mean},
      {"initial.v_amp", c.initial.v_amp},
      {"initial.v_mode", c.initial.v_mode},
      {"study.dt_finest", c.study.dt_finest},
      {"study.levels", c.study.levels},
      {"study.dt_coarse", c.study.dt_coarse},
      {"study.refinements", refinements},
      {"moments.p", c.moments_p},
  };
}

ordered_json validation_json(const RunConfig& cfg) {
  const ConstantsReport cr = validate_constants(cfg.lyapunov, cfg.model);
  const ModelSetup s = cfg.setup();
  return ordered_json{
      {"constants",
       {{"applicable", cr.applicable},
        {"c1_bound", cr.c1_bound},
        {"c1_ok", cr.c1_ok},
        {"denominator", cr.denominator},
        {"denominator_ok", cr.denominator_ok},
        {"rho_bound", cr.rho_bound},
        {"rho_ok", cr.rho_ok},
        {"c1_margin", cr.c1_margin},
        {"rho_margin", cr.rho_margin},
        {"pass", cr.pass()}}},
      {"noise1_l2", hs_json(hs_admissibility(s.noise_u, HsTarget::L2))},
      {"noise2_h1", hs_json(hs_admissibility(s.noise_v, HsTarget::H1))},
      {"gamma1", gamma_constant(s.noise_u)},
      {"gamma2", gamma_constant(s.noise_v)},
      {"pass", validation_passes(cfg)}};
}

bool validation_passes(const RunConfig& cfg) {
  const ModelSetup s = cfg.setup();
  return validate_constants(cfg.lyapunov, cfg.model).pass() &&
         hs_admissibility(s.noise_u, HsTarget::L2).admissible &&
         hs_admissibility(s.noise_v, HsTarget::H1).admissible;
}

ordered_json moments_json(const RunConfig& cfg, const MomentsResult& r) {
  return ordered_json{
      {"config", config_echo(cfg)},
      {"experiment", "moments"},
      {"p", r.report.p},
      {"note", "sup functionals are taken over the recorded time grid"},
      {"sup_l1_u", stats_json(r.report.sup_l1_u)},
      {"sup_gradv_l2_sq", stats_json(r.report.sup_gradv_l2_sq)},
      {"int_gradv_h1_sq", stats_json(r.report.int_gradv_h1_sq)},
      {"sup_W", stats_json(r.report.sup_W)},
      {"positivity",
       {{"violating_paths", r.positivity_violations},
        {"worst_min_u", r.worst_min_u}}},
      {"validation", validation_json(cfg)},
      {"failure_count", r.failures.size()},
      {"failures", failures_json(r.failures)}};
}

ordered_json strong_order_json(const RunConfig& cfg,
                               const StrongOrderResult& r) {
  return ordered_json{{"config", config_echo(cfg)},
                      {"experiment", "strong_order"},
                      {"dt", r.dts},
                      {"error", r.errors},
                      {"error_se", r.error_se},
                      {"fit", fit_json(r.fit)},
                      {"plateau", r.plateau},
                      {"failure_count", r.failures.size()},
                      {"failures", failures_json(r.failures)}};
}

ordered_json wong_zakai_json(const RunConfig& cfg, const WongZakaiResult& r) {
  return ordered_json{{"config", config_echo(cfg)},
                      {"experiment", "wong_zakai"},
                      {"refinements", r.refinements},
                      {"gap_half", r.gap_half},
                      {"gap_half_se", r.gap_half_se},
                      {"gap_full", r.gap_full},
                      {"gap_full_se", r.gap_full_se},
                      {"half_decreasing", r.half_decreasing},
                      {"full_not_decreasing", r.full_not_decreasing},
                      {"verdict", r.verdict},
                      {"failure_count", r.failures.size()},
                      {"failures", failures_json(r.failures)}};
}

ordered_json truncation_events_json(const RunConfig& cfg,
                                    const TruncationEventsResult& r) {
  return ordered_json{{"config", config_echo(cfg)},
                      {"experiment", "truncation_events"},
                      {"level_max", r.level_max},
                      {"reached_frequency", r.reached_frequency},
                      {"m_times_early_stop", r.m_times_early},
                      {"monotone", r.monotone},
                      {"trend", fit_json(r.trend)},
                      {"no_upward_trend", r.no_upward_trend},
                      {"failure_count", r.failures.size()},
                      {"failures", failures_json(r.failures)}};
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace sks
