#pragma once

// Ito form of the Stratonovich system with linear multiplicative noise.
//
// For sigma(xi) = xi driven by W = sum_k lambda_k psi_k beta_k, the
// pairing psi_k^2 + psi_{-k}^2 = 2 collapses sum_k D sigma_k sigma_k to
// gamma * xi. Ito calculus multiplies that by 1/2; the literal system the
// model is usually written in carries the full gamma. Both are offered.

#include "sks/dynamics.hpp"
#include "sks/wiener.hpp"

#include <string>
#include <string_view>

namespace sks {

enum class CorrectionConvention { half_gamma, full_gamma };

CorrectionConvention parse_convention(std::string_view text);
std::string to_string(CorrectionConvention convention);

/// Coefficient c of the extra Ito drift +c * xi.
double stratonovich_correction(const NoiseSpec& spec,
                               CorrectionConvention convention);

struct EffectiveParams {
  double gamma_u = 0.0;    // enters the u drift as +gamma_u * u
  double alpha_eff = 0.0;  // damping of v after the correction shift
};

EffectiveParams effective_params(const ModelParams& model,
                                 const NoiseSpec& noise_u,
                                 const NoiseSpec& noise_v,
                                 CorrectionConvention convention);

}  // namespace sks
