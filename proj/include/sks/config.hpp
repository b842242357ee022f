#pragma once

// Run configuration: a line-oriented key = value file.
//
//   # comment
//   grid.n_cells = 64
//   [model]
//   chi = 1.0
//
// A [section] header prefixes the keys that follow it until the next
// header; dotted keys are accepted either way. Unknown keys, malformed
// values and repeated keys are errors.

#include "sks/ensemble.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sks {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// u0 = u_mean + u_amp cos(u_mode pi x), likewise v0.
struct InitialData {
  double u_mean = 1.0;
  double u_amp = 0.0;
  int u_mode = 1;
  double v_mean = 0.0;
  double v_amp = 0.0;
  int v_mode = 1;

  Field u0(const GridSpec& grid) const;
  Field v0(const GridSpec& grid) const;
};

struct StudyConfig {
  double dt_finest = 0x1p-12;
  int levels = 5;
  double dt_coarse = 0x1p-6;
  std::vector<int> refinements{1, 2, 4, 8};
};

struct RunConfig {
  int n_cells = 64;
  ModelParams model;
  double delta1 = 2.0;
  int k1 = 64;
  double amplitude1 = 1.0;
  double delta2 = 3.0;
  int k2 = 64;
  double amplitude2 = 1.0;
  SchemeConfig scheme;
  CorrectionConvention convention = CorrectionConvention::half_gamma;
  int level_max = 0;  // 0 disables truncation
  double threshold_multiplier = 1.0;
  LyapunovParams lyapunov;
  EnsembleConfig ensemble;
  std::string output_dir = "out";
  InitialData initial;
  StudyConfig study;
  double moments_p = 1.0;

  /// Throws ConfigError on any invalid combination.
  void validate() const;
  ModelSetup setup() const;
};

/// Key/value pairs after section expansion, in file order of first
/// appearance.
std::vector<std::pair<std::string, std::string>> parse_key_values(
    const std::string& text);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace sks
