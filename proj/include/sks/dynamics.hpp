#pragma once

// Right-hand sides of the Ito-form chemotaxis system
//
//   du = (r_u A u - chi div(u grad v) + gamma_u u) dt + u dW_1
//   dv = (r_v A v - alpha_eff v + beta u) dt + v dW_2

#include "sks/field_space.hpp"
#include "sks/wiener.hpp"

namespace sks {

struct ModelParams {
  double r_u = 1.0;
  double r_v = 1.0;
  double chi = 1.0;
  double alpha = 0.0;
  double beta = 0.0;

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

struct State {
  double t = 0.0;
  Field u;
  Field v;

  State(double time, Field u0, Field v0);
  bool all_finite() const { return u.all_finite() && v.all_finite(); }
};

/// r_u Delta_h u - chemotaxis_scale * chi * div_h(u grad_h v) + gamma_u u.
Field drift_u(const State& state, const ModelParams& params, double gamma_u,
              double chemotaxis_scale = 1.0);

/// r_v Delta_h v - alpha_eff v + beta u.
Field drift_v(const State& state, const ModelParams& params,
              double alpha_eff);

/// Pointwise f * dW.
Field diffusion_action(const Field& f, const NoiseIncrement& dW);

}  // namespace sks
