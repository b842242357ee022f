#include "sks/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

namespace sks {

Field InitialData::u0(const GridSpec& grid) const {
  return Field::sample(grid, [&](double x) {
    return u_mean + u_amp * std::cos(u_mode * std::numbers::pi * x);
  });
}

Field InitialData::v0(const GridSpec& grid) const {
  return Field::sample(grid, [&](double x) {
    return v_mean + v_amp * std::cos(v_mode * std::numbers::pi * x);
  });
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* what) {
  throw ConfigError(key + ": expected " + what + ", got '" + value + "'");
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    bad_value(key, v, "a finite number");
  }
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    bad_value(key, v, "an integer");
  }
  return out;
}

int to_int32(const std::string& key, const std::string& v) {
  const long long x = to_int(key, v);
  if (x < -2147483647LL || x > 2147483647LL) bad_value(key, v, "an int");
  return static_cast<int>(x);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    bad_value(key, v, "a non-negative 64-bit integer");
  }
  return out;
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_int32(key, trim(item)));
  if (out.empty()) bad_value(key, v, "a comma-separated integer list");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&,
                                  const std::string&)>;

const std::map<std::string, Setter>& setters() {
  auto num = [](double RunConfig::*m) -> Setter {
    return [m](RunConfig& c, const std::string& k, const std::string& v) {
      c.*m = to_double(k, v);
    };
  };
  auto i32 = [](int RunConfig::*m) -> Setter {
    return [m](RunConfig& c, const std::string& k, const std::string& v) {
      c.*m = to_int32(k, v);
    };
  };
  auto model = [](double ModelParams::*m) -> Setter {
    return [m](RunConfig& c, const std::string& k, const std::string& v) {
      c.model.*m = to_double(k, v);
    };
  };
  auto lyap = [](double LyapunovParams::*m) -> Setter {
    return [m](RunConfig& c, const std::string& k, const std::string& v) {
      c.lyapunov.*m = to_double(k, v);
    };
  };
  auto init_num = [](double InitialData::*m) -> Setter {
    return [m](RunConfig& c, const std::string& k, const std::string& v) {
      c.initial.*m = to_double(k, v);
    };
  };
  auto init_int = [](int InitialData::*m) -> Setter {
    return [m](RunConfig& c, const std::string& k, const std::string& v) {
      c.initial.*m = to_int32(k, v);
    };
  };
  static const std::map<std::string, Setter> table{
      {"grid.n_cells", i32(&RunConfig::n_cells)},
      {"model.r_u", model(&ModelParams::r_u)},
      {"model.r_v", model(&ModelParams::r_v)},
      {"model.chi", model(&ModelParams::chi)},
      {"model.alpha", model(&ModelParams::alpha)},
      {"model.beta", model(&ModelParams::beta)},
      {"noise1.delta", num(&RunConfig::delta1)},
      {"noise1.K", i32(&RunConfig::k1)},
      {"noise1.amplitude", num(&RunConfig::amplitude1)},
      {"noise2.delta", num(&RunConfig::delta2)},
      {"noise2.K", i32(&RunConfig::k2)},
      {"noise2.amplitude", num(&RunConfig::amplitude2)},
      {"scheme.kind",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         try {
           c.scheme.scheme = parse_scheme(v);
         } catch (const std::invalid_argument&) {
           bad_value(k, v,
                     "semi_implicit_em, exponential_em or "
                     "wong_zakai_reference");
         }
       }},
      {"scheme.dt",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.scheme.dt = to_double(k, v);
       }},
      {"scheme.t_end",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.scheme.t_end = to_double(k, v);
       }},
      {"scheme.record_every",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.scheme.record_every = to_int32(k, v);
       }},
      {"scheme.noise_substeps",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.scheme.noise_substeps = to_int32(k, v);
       }},
      {"correction_convention",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         try {
           c.convention = parse_convention(v);
         } catch (const std::invalid_argument&) {
           bad_value(k, v, "half or full");
         }
       }},
      {"truncation.level_max", i32(&RunConfig::level_max)},
      {"truncation.threshold_multiplier",
       num(&RunConfig::threshold_multiplier)},
      {"lyapunov.rho", lyap(&LyapunovParams::rho)},
      {"lyapunov.c1", lyap(&LyapunovParams::c1)},
      {"lyapunov.c2", lyap(&LyapunovParams::c2)},
      {"ensemble.n_paths",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const long long n = to_int(k, v);
         if (n < 1) bad_value(k, v, "a positive integer");
         c.ensemble.n_paths = static_cast<std::size_t>(n);
       }},
      {"ensemble.base_seed",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.ensemble.base_seed = to_u64(k, v);
       }},
      {"ensemble.workers",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.ensemble.workers = to_int32(k, v);
       }},
      {"output.dir",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.output_dir = v;
       }},
      {"initial.u_mean", init_num(&InitialData::u_mean)},
      {"initial.u_amp", init_num(&InitialData::u_amp)},
      {"initial.u_mode", init_int(&InitialData::u_mode)},
      {"initial.v_mean", init_num(&InitialData::v_mean)},
      {"initial.v_amp", init_num(&InitialData::v_amp)},
      {"initial.v_mode", init_int(&InitialData::v_mode)},
      {"study.dt_finest",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.study.dt_finest = to_double(k, v);
       }},
      {"study.levels",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.study.levels = to_int32(k, v);
       }},
      {"study.dt_coarse",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.study.dt_coarse = to_double(k, v);
       }},
      {"study.refinements",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.study.refinements = to_int_list(k, v);
       }},
      {"moments.p", num(&RunConfig::moments_p)},
  };
  return table;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_key_values(
    const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(where + "malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "empty key");
    if (value.empty()) throw ConfigError(where + "empty value for " + key);
    if (!section.empty()) key = section + "." + key;
    if (!seen.insert(key).second) {
      throw ConfigError(where + "duplicate key " + key);
    }
    out.emplace_back(key, value);
  }
  return out;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  for (const auto& [key, value] : parse_key_values(text)) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key " + key);
    it->second(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void RunConfig::validate() const {
  try {
    (void)GridSpec(n_cells);
    model.validate();
    (void)make_noise_spec(delta1, k1, amplitude1);
    (void)make_noise_spec(delta2, k2, amplitude2);
    scheme.validate();
    ensemble.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (level_max < 0) throw ConfigError("truncation.level_max must be >= 0");
  if (!(threshold_multiplier > 0.0)) {
    throw ConfigError("truncation.threshold_multiplier must be > 0");
  }
  if (!(moments_p >= 1.0)) throw ConfigError("moments.p must be >= 1");
  if (!(study.dt_finest > 0.0) || !(study.dt_coarse > 0.0)) {
    throw ConfigError("study time steps must be > 0");
  }
  if (study.levels < 3) throw ConfigError("study.levels must be >= 3");
  for (int r : study.refinements) {
    if (r < 1) throw ConfigError("study.refinements must be positive");
  }
  if (initial.u_mean - std::abs(initial.u_amp) < 0.0 ||
      initial.v_mean - std::abs(initial.v_amp) < 0.0) {
    throw ConfigError("initial data must be non-negative");
  }
}

ModelSetup RunConfig::setup() const {
  ModelSetup s;
  s.grid = GridSpec(n_cells);
  s.model = model;
  s.noise_u = make_noise_spec(delta1, k1, amplitude1);
  s.noise_v = make_noise_spec(delta2, k2, amplitude2);
  s.convention = convention;
  s.scheme = scheme;
  s.u0 = initial.u0(s.grid);
  s.v0 = initial.v0(s.grid);
  s.lyapunov = lyapunov;
  s.threshold_multiplier = threshold_multiplier;
  return s;
}

}  // namespace sks
