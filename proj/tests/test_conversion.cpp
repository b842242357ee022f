#include "sks/conversion.hpp"
#include "sks/ensemble.hpp"

#include <doctest.h>

using namespace sks;

TEST_CASE("correction constant") {
  const NoiseSpec unit = make_noise_spec(2.0, 0, 1.0);
  CHECK(stratonovich_correction(unit, CorrectionConvention::half_gamma) == 0.5);
  CHECK(stratonovich_correction(unit, CorrectionConvention::full_gamma) == 1.0);
  const NoiseSpec off = make_noise_spec(2.0, 6, 0.0);
  CHECK(stratonovich_correction(off, CorrectionConvention::half_gamma) == 0.0);
  CHECK(stratonovich_correction(off, CorrectionConvention::full_gamma) == 0.0);
}

TEST_CASE("correction is quadratic in the amplitude") {
  const NoiseSpec a = make_noise_spec(1.4, 7, 0.3);
  const NoiseSpec b = make_noise_spec(1.4, 7, 0.6);
  for (auto conv : {CorrectionConvention::half_gamma,
                    CorrectionConvention::full_gamma}) {
    CHECK(stratonovich_correction(b, conv) ==
          doctest::Approx(4 * stratonovich_correction(a, conv)).epsilon(1e-14));
  }
}

TEST_CASE("effective parameters") {
  ModelParams m;
  m.alpha = 1.0;
  m.beta = 1.0;
  const NoiseSpec off = make_noise_spec(2.0, 0, 0.0);
  SUBCASE("zero noise") {
    const auto e = effective_params(m, off, off, CorrectionConvention::full_gamma);
    CHECK(e.gamma_u == 0.0);
    CHECK(e.alpha_eff == 1.0);
  }
  SUBCASE("half of gamma2 shifts the damping") {
    const NoiseSpec n2 = make_noise_spec(2.0, 0, std::sqrt(0.5));
    const auto e = effective_params(m, off, n2, CorrectionConvention::half_gamma);
    CHECK(e.alpha_eff == doctest::Approx(0.75).epsilon(1e-15));
  }
  SUBCASE("symmetric specs") {
    m.alpha = 2.3;
    const NoiseSpec s = make_noise_spec(1.8, 5, 0.7);
    const auto e = effective_params(m, s, s, CorrectionConvention::half_gamma);
    CHECK(e.gamma_u == doctest::Approx(m.alpha - e.alpha_eff).epsilon(1e-14));
  }
}

TEST_CASE("convention names") {
  CHECK(parse_convention("half") == CorrectionConvention::half_gamma);
  CHECK(parse_convention("full_gamma") == CorrectionConvention::full_gamma);
  CHECK(to_string(CorrectionConvention::half_gamma) == "half");
  CHECK_THROWS_AS(parse_convention("ito"), std::invalid_argument);
}

TEST_CASE("scalar reduction arbitrates the conventions") {
  ModelSetup s;
  s.grid = GridSpec(4);
  s.model.chi = 0.0;
  s.model.alpha = 0.0;
  s.model.beta = 0.0;
  s.noise_u = make_noise_spec(2.0, 0, 1.0);
  s.noise_v = make_noise_spec(2.0, 0, 0.0);
  s.scheme.t_end = 1.0;
  s.u0 = Field::constant(s.grid, 1.0);
  s.v0 = Field::constant(s.grid, 0.0);
  EnsembleConfig cfg{200, 99, 1};

  s.convention = CorrectionConvention::half_gamma;
  const auto half = run_strong_order(cfg, s, 0x1p-10, 5);
  s.convention = CorrectionConvention::full_gamma;
  const auto full = run_strong_order(cfg, s, 0x1p-10, 5);

  CHECK(half.errors.back() < 0.5 * half.errors.front());
  CHECK(full.errors.back() >= 0.75 * full.errors.front());
  CHECK(full.plateau);
  CHECK_FALSE(half.plateau);
}
