#pragma once

// Time-homogeneous spatial Wiener processes
//
//   W(t, x) = sum_{|k| <= K} lambda_k psi_k(x) beta_k(t),
//   lambda_k = amplitude * (1 + (2 pi k)^2)^(-delta/2),
//
// with psi_k the trigonometric orthonormal system of L2(0,1) and beta_k
// independent standard Brownian motions.
//
// Randomness is counter-addressed: the Gaussian draws for a given
// (seed, stream_id, step) triple are fixed, independent of how many other
// steps were drawn before. Each increment consumes exactly 2K+1 normals in
// k-ascending order (k = -K..K).

#include "sks/field_space.hpp"

#include <cstdint>
#include <vector>

namespace sks {

struct NoiseSpec {
  double delta = 0.0;
  int mode_cutoff = 0;
  double amplitude = 1.0;
  std::vector<double> lambdas;  // index k + mode_cutoff

  int mode_count() const { return 2 * mode_cutoff + 1; }
  double lambda(int k) const { return lambdas[k + mode_cutoff]; }
};

NoiseSpec make_noise_spec(double delta, int mode_cutoff,
                          double amplitude = 1.0);

/// sqrt(2) sin(2 pi k x) for k >= 1, 1 for k = 0, sqrt(2) cos(2 pi |k| x)
/// for k <= -1.
double basis_psi(int k, double x);

/// gamma = sum_k lambda_k^2 over the simulated modes.
double gamma_constant(const NoiseSpec& spec);

enum class HsTarget { L2, H1 };

struct HsReport {
  bool admissible = false;
  double delta_threshold = 0.0;
  /// Upper bound on the omitted sum over |k| > K of lambda_k^2, weighted by
  /// (1 + (2 pi k)^2) for the H1 target; infinite if the series diverges.
  double tail_bound = 0.0;
};

HsReport hs_admissibility(const NoiseSpec& spec, HsTarget target);

struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// The `count` standard normal draws addressed by (stream, step).
Eigen::VectorXd standard_normals(const RngStream& rng, std::uint64_t step,
                                 int count);

struct NoiseIncrement {
  Field field;
  double dt;
};

/// Precomputed lambda_k psi_k(x_j) table for one (spec, grid) pair.
class NoiseSampler {
 public:
  NoiseSampler(NoiseSpec spec, GridSpec grid);

  const NoiseSpec& spec() const { return spec_; }
  const GridSpec& grid() const { return grid_; }
  bool silent() const { return spec_.amplitude == 0.0; }

  /// Brownian coefficient increments over `substeps` consecutive fine steps
  /// starting at `first_step`, each of length dt_fine: sum_s xi_{k,s} sqrt(dt_fine).
  Eigen::VectorXd coefficient_increment(const RngStream& rng,
                                        std::uint64_t first_step,
                                        int substeps, double dt_fine) const;

  /// Spatial field sum_k lambda_k psi_k(x_j) c_k.
  Field synthesize(const Eigen::VectorXd& coefficients) const;

  /// Increment over a step of length dt assembled from `substeps` fine
  /// draws, the fine steps being step * substeps + s.
  NoiseIncrement increment(const RngStream& rng, std::uint64_t step, double dt,
                           int substeps = 1) const;

  /// Per-unit-time variance sum_k lambda_k^2 psi_k(x_j)^2 at every node.
  Eigen::VectorXd nodal_variance_rate() const;

 private:
  NoiseSpec spec_;
  GridSpec grid_;
  Eigen::MatrixXd basis_;  // (N+1) x (2K+1), column k holds lambda_k psi_k
};

NoiseIncrement sample_increment(const NoiseSpec& spec, const GridSpec& grid,
                                double dt, const RngStream& rng,
                                std::uint64_t step = 0);

/// Piecewise-linear interpolant of the Brownian coefficients on the fine
/// mesh dt_coarse / refinement. Fine interval m uses exactly the draws a
/// scheme stepping at the fine dt consumes at step m.
class PiecewiseLinearPath {
 public:
  PiecewiseLinearPath(const NoiseSampler& sampler, RngStream rng,
                      double t_end, double dt_coarse, int refinement,
                      int draw_substeps = 1);

  double fine_dt() const { return dt_fine_; }
  std::size_t intervals() const { return knots_.size() - 1; }

  /// Coefficients beta_k(t) of the interpolated path.
  Eigen::VectorXd value_coefficients(double t) const;
  /// Slopes d beta_k / dt on the interval containing t (right-open).
  Eigen::VectorXd slope_coefficients(double t) const;

  Field value(double t) const;
  Field slope(double t) const;
  /// Slope field on fine interval m.
  Field slope_on_interval(std::size_t m) const;

 private:
  std::size_t interval_of(double t) const;

  NoiseSampler sampler_;
  double dt_fine_;
  std::vector<Eigen::VectorXd> knots_;  // cumulative coefficients
  std::vector<Field> slopes_;
};

}  // namespace sks
