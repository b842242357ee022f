// Command-line driver.
//
// Exit codes: 0 success, 2 config error, 3 numerical failure,
// 4 validation failure.

#include "sks/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;
constexpr int kValidationFailure = 4;

struct Options {
  std::string config;
  std::string out;
  int workers = 0;
  std::size_t path = 0;
};

sks::RunConfig load(const Options& o) {
  sks::RunConfig cfg = sks::load_config(o.config);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.workers > 0) cfg.ensemble.workers = o.workers;
  fs::create_directories(cfg.output_dir);
  return cfg;
}

std::string out_path(const sks::RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.output_dir) / name).string();
}

int all_failed(std::size_t failures, std::size_t n) {
  return failures == n ? kNumericalFailure : kOk;
}

void write_snapshots(const sks::RunConfig& cfg, const sks::Trajectory& traj) {
  const fs::path dir = fs::path(cfg.output_dir) / "snapshots";
  fs::create_directories(dir);
  char name[64];
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const auto step = static_cast<unsigned long long>(traj.state_steps[i]);
    std::snprintf(name, sizeof name, "u_%08llu.csv", step);
    sks::write_field_csv(traj.states[i].u, (dir / name).string());
    std::snprintf(name, sizeof name, "v_%08llu.csv", step);
    sks::write_field_csv(traj.states[i].v, (dir / name).string());
  }
}

int cmd_simulate(const Options& o) {
  const sks::RunConfig cfg = load(o);
  const sks::ModelSetup setup = cfg.setup();
  sks::Trajectory traj;
  ordered_json levels = ordered_json::array();
  if (cfg.level_max > 0) {
    sks::ConcatenationOptions co;
    co.threshold_multiplier = cfg.threshold_multiplier;
    co.lyapunov = cfg.lyapunov;
    const sks::ConcatenatedRun run = sks::run_concatenated(
        cfg.level_max, setup.initial_state(), setup.model, setup.effective(),
        setup.noise_u, setup.noise_v, setup.scheme,
        sks::path_streams(cfg.ensemble.base_seed, o.path), co);
    sks::write_text(out_path(cfg, "events.csv"),
                    sks::level_events_to_csv(run));
    traj = run.levels.back().path;
  } else {
    traj = sks::simulate_path(setup, cfg.ensemble, o.path, true);
  }
  sks::write_text(out_path(cfg, "trajectory.csv"),
                  sks::scalars_to_csv(traj.scalars));
  write_snapshots(cfg, traj);

  const sks::PathMoments pm = sks::moment_functionals(traj, cfg.moments_p);
  const sks::PositivityReport pr =
      sks::positivity_report(traj, sks::default_tol_pos(setup.u0));
  ordered_json positivity{{"min_u", pr.min_u},
                          {"min_v", pr.min_v},
                          {"violations", pr.violations},
                          {"violation_fraction", pr.violation_fraction}};
  positivity["first_offending_time"] =
      pr.first_offending_time ? ordered_json(*pr.first_offending_time)
                              : ordered_json(nullptr);
  const ordered_json summary{
      {"config", sks::config_echo(cfg)},
      {"experiment", "simulate"},
      {"path", o.path},
      {"steps", traj.scalars.size() - 1},
      {"snapshots", traj.states.size()},
      {"mass_u_initial", traj.scalars.front().mass_u},
      {"mass_u_final", traj.scalars.back().mass_u},
      {"moments",
       {{"sup_l1_u", pm.sup_l1_u},
        {"sup_gradv_l2_sq", pm.sup_gradv_l2_sq},
        {"int_gradv_h1_sq", pm.int_gradv_h1_sq},
        {"sup_W", pm.sup_W}}},
      {"positivity", positivity},
      {"validation", sks::validation_json(cfg)}};
  sks::write_text(out_path(cfg, "summary.json"), sks::dump(summary));
  return kOk;
}

int cmd_ensemble(const Options& o) {
  const sks::RunConfig cfg = load(o);
  const auto r = sks::run_moments(cfg.ensemble, cfg.setup(), cfg.moments_p);
  sks::write_text(out_path(cfg, "report.json"),
                  sks::dump(sks::moments_json(cfg, r)));
  return all_failed(r.failures.size(), cfg.ensemble.n_paths);
}

int cmd_strong_order(const Options& o) {
  const sks::RunConfig cfg = load(o);
  const auto r = sks::run_strong_order(cfg.ensemble, cfg.setup(),
                                       cfg.study.dt_finest, cfg.study.levels);
  sks::write_text(out_path(cfg, "strong_order.json"),
                  sks::dump(sks::strong_order_json(cfg, r)));
  return all_failed(r.failures.size(), cfg.ensemble.n_paths);
}

int cmd_wong_zakai(const Options& o) {
  const sks::RunConfig cfg = load(o);
  const auto r = sks::run_wong_zakai(cfg.ensemble, cfg.setup(),
                                     cfg.study.dt_coarse,
                                     cfg.study.refinements);
  sks::write_text(out_path(cfg, "wong_zakai.json"),
                  sks::dump(sks::wong_zakai_json(cfg, r)));
  return all_failed(r.failures.size(), cfg.ensemble.n_paths);
}

int cmd_truncation_events(const Options& o) {
  const sks::RunConfig cfg = load(o);
  if (cfg.level_max < 2) {
    throw sks::ConfigError("truncation-events needs truncation.level_max >= 2");
  }
  const auto r =
      sks::run_truncation_events(cfg.ensemble, cfg.setup(), cfg.level_max);
  sks::write_text(out_path(cfg, "truncation_events.json"),
                  sks::dump(sks::truncation_events_json(cfg, r)));
  return all_failed(r.failures.size(), cfg.ensemble.n_paths);
}

int cmd_validate(const Options& o) {
  const sks::RunConfig cfg = sks::load_config(o.config);
  std::cout << sks::dump(sks::validation_json(cfg));
  return sks::validation_passes(cfg) ? kOk : kValidationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic Keller-Segel simulator"};
  app.require_subcommand(1);
  Options o;
  int (*handler)(const Options&) = nullptr;

  auto add = [&](const char* name, const char* help,
                 int (*fn)(const Options&), bool runs) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", o.config, "Config file")
        ->required()
        ->check(CLI::ExistingFile);
    if (runs) {
      sub->add_option("-o,--out", o.out, "Output directory (overrides output.dir)");
      sub->add_option("-w,--workers", o.workers,
                      "Worker threads (overrides ensemble.workers)")
          ->check(CLI::PositiveNumber);
    }
    sub->callback([&handler, fn] { handler = fn; });
    return sub;
  };
  add("simulate", "Single path: trajectory CSV and field snapshots",
      cmd_simulate, true)
      ->add_option("-p,--path", o.path, "Path index within the ensemble");
  add("ensemble", "Moment statistics over the ensemble", cmd_ensemble, true);
  add("strong-order", "Strong error over a coupled dt ladder",
      cmd_strong_order, true);
  add("wong-zakai", "Smoothed-noise gaps to both Ito conventions",
      cmd_wong_zakai, true);
  add("truncation-events", "Stopping statistics across truncation levels",
      cmd_truncation_events, true);
  add("validate", "Lyapunov constants and noise admissibility", cmd_validate,
      false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    return handler(o);
  } catch (const sks::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const sks::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
