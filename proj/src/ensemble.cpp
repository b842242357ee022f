#include "sks/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sks {

void EnsembleConfig::validate() const {
  if (n_paths < 1) throw std::invalid_argument("ensemble.n_paths must be >= 1");
  if (workers < 1) throw std::invalid_argument("ensemble.workers must be >= 1");
}

std::uint64_t path_seed(std::uint64_t base_seed, std::uint64_t path) {
  // splitmix64 finalizer of base + path: a bijection of the sum, hence
  // injective in path.
  std::uint64_t z = base_seed + path + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

NoisePair path_streams(std::uint64_t base_seed, std::uint64_t path) {
  const std::uint64_t seed = path_seed(base_seed, path);
  return {RngStream{seed, 1}, RngStream{seed, 2}};
}

EffectiveParams ModelSetup::effective() const {
  return effective_params(model, noise_u, noise_v, convention);
}

Trajectory simulate_path(const ModelSetup& setup, const EnsembleConfig& cfg,
                         std::size_t path, bool keep_states) {
  IntegrateOptions io;
  io.lyapunov = setup.lyapunov;
  io.keep_states = keep_states;
  return integrate(setup.initial_state(), setup.model, setup.effective(),
                   setup.noise_u, setup.noise_v, setup.scheme,
                   path_streams(cfg.base_seed, path), io);
}

namespace {

template <typename T>
std::vector<PathFailure> collect_failures(
    const std::vector<PathOutcome<T>>& outcomes) {
  std::vector<PathFailure> failures;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].value) failures.push_back({i, outcomes[i].error});
  }
  return failures;
}

double mean_of(const std::vector<double>& xs) {
  return xs.empty() ? 0.0
                    : std::accumulate(xs.begin(), xs.end(), 0.0) /
                          static_cast<double>(xs.size());
}

double std_error_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1) /
                   static_cast<double>(xs.size()));
}

bool is_constant(const Field& f) {
  return (f.values().array() == f[0]).all();
}

}  // namespace

MomentsResult run_moments(const EnsembleConfig& cfg, const ModelSetup& setup,
                          double p, double tol_pos_factor) {
  cfg.validate();
  if (!(p >= 1.0)) throw std::invalid_argument("run_moments: p must be >= 1");
  const double tol = tol_pos_factor > 0.0
                         ? tol_pos_factor * setup.u0.values().maxCoeff()
                         : default_tol_pos(setup.u0);
  struct PathResult {
    PathMoments moments;
    double min_u;
  };
  const auto outcomes = run_paths(cfg, [&](std::size_t i) {
    const Trajectory traj = simulate_path(setup, cfg, i);
    double min_u = traj.scalars.front().min_u;
    for (const auto& r : traj.scalars) min_u = std::min(min_u, r.min_u);
    return PathResult{moment_functionals(traj, 1.0), min_u};
  });

  MomentsResult result;
  result.report.p = p;
  result.per_path.resize(outcomes.size());
  result.failures = collect_failures(outcomes);
  result.report.failures = result.failures.size();
  result.worst_min_u = setup.u0.values().minCoeff();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].value) continue;
    const auto& r = *outcomes[i].value;
    result.per_path[i] = r.moments;
    result.report.add(r.moments);
    result.worst_min_u = std::min(result.worst_min_u, r.min_u);
    if (r.min_u < -tol) ++result.positivity_violations;
  }
  return result;
}

SlopeFit fit_linear(const std::vector<double>& x,
                    const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw std::invalid_argument("fit: need >= 3 paired points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    rss += r * r;
  }
  fit.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
  return fit;
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                    double floor) {
  std::vector<double> lx(x.size());
  std::vector<double> ly(y.size());
  bool degenerate = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log(x[i]);
    const double yi = std::max(y[i], floor);
    degenerate = degenerate || y[i] <= floor;
    ly[i] = std::log(yi);
  }
  SlopeFit fit = fit_linear(lx, ly);
  fit.degenerate = degenerate;
  return fit;
}

StrongOrderResult run_strong_order(const EnsembleConfig& cfg,
                                   const ModelSetup& setup, double dt_finest,
                                   int levels) {
  cfg.validate();
  if (levels < 3) {
    throw std::invalid_argument("run_strong_order: need >= 3 dt levels");
  }
  if (setup.noise_u.mode_cutoff != 0 || setup.noise_v.mode_cutoff != 0 ||
      setup.model.beta != 0.0 || !is_constant(setup.u0) ||
      !is_constant(setup.v0)) {
    throw std::invalid_argument(
        "run_strong_order: requires single-mode noise, constant data and "
        "beta = 0");
  }
  if (setup.scheme.scheme == Scheme::wong_zakai_reference) {
    throw std::invalid_argument("run_strong_order: needs an Ito scheme");
  }
  const EffectiveParams eff = setup.effective();
  const double t_end = setup.scheme.t_end;
  const auto fine_steps =
      static_cast<std::uint64_t>(std::llround(t_end / dt_finest));
  const NoiseSampler sampler(setup.noise_u, setup.grid);

  StrongOrderResult result;
  for (int l = levels - 1; l >= 0; --l) {
    result.dts.push_back(dt_finest * std::ldexp(1.0, l));
  }

  const auto outcomes = run_paths(cfg, [&](std::size_t i) {
    const NoisePair rng = path_streams(cfg.base_seed, i);
    const Eigen::VectorXd total =
        sampler.coefficient_increment(rng.w1, 0, static_cast<int>(fine_steps),
                                      dt_finest);
    const double exact =
        setup.u0[0] * std::exp(setup.noise_u.lambda(0) * total[0]);
    std::vector<double> errors;
    for (int l = levels - 1; l >= 0; --l) {
      SchemeConfig sc = setup.scheme;
      sc.dt = dt_finest * std::ldexp(1.0, l);
      sc.noise_substeps = 1 << l;
      IntegrateOptions io;
      io.keep_states = true;
      sc.record_every = static_cast<int>(fine_steps >> l);
      const Trajectory traj =
          integrate(setup.initial_state(), setup.model, eff, setup.noise_u,
                    setup.noise_v, sc, rng, io);
      const Field& u = traj.states.back().u;
      errors.push_back(l2_norm(Field(u.grid(), u.values().array() - exact)));
    }
    return errors;
  });

  result.failures = collect_failures(outcomes);
  for (std::size_t l = 0; l < result.dts.size(); ++l) {
    std::vector<double> xs;
    for (const auto& o : outcomes) {
      if (o.value) xs.push_back((*o.value)[l]);
    }
    result.errors.push_back(mean_of(xs));
    result.error_se.push_back(std_error_of(xs));
  }
  result.fit = fit_loglog(result.dts, result.errors);
  result.plateau = result.errors.back() >= 0.75 * result.errors.front();
  return result;
}

WongZakaiResult run_wong_zakai(const EnsembleConfig& cfg,
                               const ModelSetup& setup, double dt_coarse,
                               const std::vector<int>& refinements) {
  cfg.validate();
  if (refinements.size() < 3) {
    throw std::invalid_argument("run_wong_zakai: need >= 3 refinements");
  }
  const int finest = *std::max_element(refinements.begin(), refinements.end());
  for (int r : refinements) {
    if (r < 1 || finest % r != 0) {
      throw std::invalid_argument(
          "run_wong_zakai: refinements must divide the finest one");
    }
  }
  const Scheme ito = setup.scheme.scheme == Scheme::wong_zakai_reference
                         ? Scheme::semi_implicit_em
                         : setup.scheme.scheme;
  const EffectiveParams eff_half = effective_params(
      setup.model, setup.noise_u, setup.noise_v,
      CorrectionConvention::half_gamma);
  const EffectiveParams eff_full = effective_params(
      setup.model, setup.noise_u, setup.noise_v,
      CorrectionConvention::full_gamma);

  struct Gaps {
    std::vector<double> half;
    std::vector<double> full;
  };
  const auto outcomes = run_paths(cfg, [&](std::size_t i) {
    const NoisePair rng = path_streams(cfg.base_seed, i);
    Gaps gaps;
    for (int r : refinements) {
      SchemeConfig sc = setup.scheme;
      sc.dt = dt_coarse / r;
      sc.noise_substeps = finest / r;
      sc.record_every = r;
      IntegrateOptions io;
      sc.scheme = Scheme::wong_zakai_reference;
      const Trajectory wz = integrate(setup.initial_state(), setup.model,
                                      eff_half, setup.noise_u, setup.noise_v,
                                      sc, rng, io);
      sc.scheme = ito;
      const Trajectory half = integrate(setup.initial_state(), setup.model,
                                        eff_half, setup.noise_u, setup.noise_v,
                                        sc, rng, io);
      const Trajectory full = integrate(setup.initial_state(), setup.model,
                                        eff_full, setup.noise_u, setup.noise_v,
                                        sc, rng, io);
      double gh = 0.0;
      double gf = 0.0;
      for (std::size_t k = 0; k < wz.states.size(); ++k) {
        gh = std::max(gh, l2_norm(wz.states[k].u - half.states[k].u));
        gf = std::max(gf, l2_norm(wz.states[k].u - full.states[k].u));
      }
      gaps.half.push_back(gh);
      gaps.full.push_back(gf);
    }
    return gaps;
  });

  WongZakaiResult result;
  result.refinements = refinements;
  result.failures = collect_failures(outcomes);
  for (std::size_t l = 0; l < refinements.size(); ++l) {
    std::vector<double> h;
    std::vector<double> f;
    for (const auto& o : outcomes) {
      if (!o.value) continue;
      h.push_back(o.value->half[l]);
      f.push_back(o.value->full[l]);
    }
    result.gap_half.push_back(mean_of(h));
    result.gap_full.push_back(mean_of(f));
    result.gap_half_se.push_back(std_error_of(h));
    result.gap_full_se.push_back(std_error_of(f));
  }
  result.half_decreasing = true;
  for (std::size_t l = 1; l < result.gap_half.size(); ++l) {
    result.half_decreasing =
        result.half_decreasing && result.gap_half[l] < result.gap_half[l - 1];
  }
  result.full_not_decreasing =
      result.gap_full.back() >= 0.75 * result.gap_full.front();
  if (result.half_decreasing && result.full_not_decreasing) {
    result.verdict = "half_gamma";
  } else if (!result.half_decreasing && !result.full_not_decreasing) {
    result.verdict = "full_gamma";
  } else {
    result.verdict = "inconclusive";
  }
  return result;
}

TruncationEventsResult run_truncation_events(const EnsembleConfig& cfg,
                                             const ModelSetup& setup,
                                             int level_max) {
  cfg.validate();
  if (level_max < 2) {
    throw std::invalid_argument("run_truncation_events: level_max must be >= 2");
  }
  const EffectiveParams eff = setup.effective();
  ConcatenationOptions co;
  co.threshold_multiplier = setup.threshold_multiplier;
  co.keep_paths = false;
  const auto outcomes = run_paths(cfg, [&](std::size_t i) {
    const ConcatenatedRun run = run_concatenated(
        level_max, setup.initial_state(), setup.model, eff, setup.noise_u,
        setup.noise_v, setup.scheme, path_streams(cfg.base_seed, i), co);
    std::vector<double> tau_bars;
    for (const auto& level : run.levels) {
      tau_bars.push_back(level.reached_T ? setup.scheme.t_end : level.tau_bar);
    }
    std::vector<char> reached;
    for (const auto& level : run.levels) reached.push_back(level.reached_T);
    return std::make_pair(tau_bars, reached);
  });

  TruncationEventsResult result;
  result.level_max = level_max;
  result.failures = collect_failures(outcomes);
  std::vector<double> counts(level_max, 0.0);
  std::size_t ok = 0;
  result.tau_bars.resize(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].value) continue;
    ++ok;
    result.tau_bars[i] = outcomes[i].value->first;
    for (int m = 0; m < level_max; ++m) {
      if (outcomes[i].value->second[m]) counts[m] += 1.0;
    }
  }
  std::vector<double> ms;
  for (int m = 0; m < level_max; ++m) {
    const double freq = ok ? counts[m] / static_cast<double>(ok) : 0.0;
    result.reached_frequency.push_back(freq);
    result.m_times_early.push_back((m + 1) * (1.0 - freq));
    ms.push_back(m + 1);
  }
  result.monotone = true;
  for (int m = 1; m < level_max; ++m) {
    result.monotone = result.monotone && result.reached_frequency[m] >=
                                             result.reached_frequency[m - 1];
  }
  if (level_max >= 3) {
    result.trend = fit_linear(ms, result.m_times_early);
    result.no_upward_trend = result.trend.slope <= 0.0 ||
                             result.trend.slope <= 2.0 * result.trend.slope_se;
  } else {
    result.no_upward_trend =
        result.m_times_early[1] <= result.m_times_early[0];
  }
  return result;
}

}  // namespace sks
