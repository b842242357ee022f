#include "sks/conversion.hpp"

#include <stdexcept>

namespace sks {

CorrectionConvention parse_convention(std::string_view text) {
  if (text == "half" || text == "half_gamma") {
    return CorrectionConvention::half_gamma;
  }
  if (text == "full" || text == "full_gamma") {
    return CorrectionConvention::full_gamma;
  }
  throw std::invalid_argument("unknown correction convention '" +
                              std::string(text) + "' (expected half|full)");
}

std::string to_string(CorrectionConvention convention) {
  return convention == CorrectionConvention::half_gamma ? "half" : "full";
}

double stratonovich_correction(const NoiseSpec& spec,
                               CorrectionConvention convention) {
  const double gamma = gamma_constant(spec);
  return convention == CorrectionConvention::half_gamma ? 0.5 * gamma : gamma;
}

EffectiveParams effective_params(const ModelParams& model,
                                 const NoiseSpec& noise_u,
                                 const NoiseSpec& noise_v,
                                 CorrectionConvention convention) {
  return {stratonovich_correction(noise_u, convention),
          model.alpha - stratonovich_correction(noise_v, convention)};
}

}  // namespace sks
