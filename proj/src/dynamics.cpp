#include "sks/dynamics.hpp"

#include <stdexcept>

namespace sks {

void ModelParams::validate() const {
  if (!(r_u > 0.0)) throw std::invalid_argument("model.r_u must be > 0");
  if (!(r_v > 0.0)) throw std::invalid_argument("model.r_v must be > 0");
  if (!(chi >= 0.0)) throw std::invalid_argument("model.chi must be >= 0");
  if (!(alpha >= 0.0)) throw std::invalid_argument("model.alpha must be >= 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("model.beta must be >= 0");
}

State::State(double time, Field u0, Field v0)
    : t(time), u(std::move(u0)), v(std::move(v0)) {
  if (!(u.grid() == v.grid())) {
    throw std::invalid_argument("State: u and v on different grids");
  }
}

Field drift_u(const State& state, const ModelParams& params, double gamma_u,
              double chemotaxis_scale) {
  const Field diffusion = neumann_laplacian(state.u, params.r_u);
  const Field taxis = chemotactic_divergence(state.u, state.v,
                                             chemotaxis_scale * params.chi);
  return Field(state.u.grid(), diffusion.values() - taxis.values() +
                                   gamma_u * state.u.values());
}

Field drift_v(const State& state, const ModelParams& params,
              double alpha_eff) {
  const Field diffusion = neumann_laplacian(state.v, params.r_v);
  return Field(state.v.grid(), diffusion.values() -
                                   alpha_eff * state.v.values() +
                                   params.beta * state.u.values());
}

Field diffusion_action(const Field& f, const NoiseIncrement& dW) {
  return pointwise(f, dW.field);
}

}  // namespace sks
