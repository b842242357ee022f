#include "sks/wiener.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace sks {

namespace {

// splitmix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform on (0, 1] from the top 53 bits.
double unit_open_left(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

double unit_closed_left(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

NoiseSpec make_noise_spec(double delta, int mode_cutoff, double amplitude) {
  if (mode_cutoff < 0) {
    throw std::invalid_argument("make_noise_spec: mode cutoff must be >= 0");
  }
  if (!(amplitude >= 0.0)) {
    throw std::invalid_argument("make_noise_spec: amplitude must be >= 0");
  }
  NoiseSpec spec;
  spec.delta = delta;
  spec.mode_cutoff = mode_cutoff;
  spec.amplitude = amplitude;
  spec.lambdas.resize(spec.mode_count());
  for (int k = 0; k <= mode_cutoff; ++k) {
    const double w = 2.0 * std::numbers::pi * k;
    const double lambda = amplitude * std::pow(1.0 + w * w, -delta / 2.0);
    spec.lambdas[mode_cutoff + k] = lambda;
    spec.lambdas[mode_cutoff - k] = lambda;
  }
  return spec;
}

double basis_psi(int k, double x) {
  if (k == 0) return 1.0;
  const double arg = 2.0 * std::numbers::pi * std::abs(k) * x;
  return k > 0 ? std::numbers::sqrt2 * std::sin(arg)
               : std::numbers::sqrt2 * std::cos(arg);
}

double gamma_constant(const NoiseSpec& spec) {
  double sum = 0.0;
  for (double l : spec.lambdas) sum += l * l;
  return sum;
}

HsReport hs_admissibility(const NoiseSpec& spec, HsTarget target) {
  HsReport report;
  report.delta_threshold = target == HsTarget::L2 ? 1.0 : 2.0;
  report.admissible = spec.delta > report.delta_threshold;

  // Omitted modes contribute 2 * sum_{k > K} (1 + (2 pi k)^2)^{-p}.
  const double p = target == HsTarget::L2 ? spec.delta : spec.delta - 1.0;
  const double a2 = spec.amplitude * spec.amplitude;
  if (a2 == 0.0) {
    report.tail_bound = 0.0;
  } else if (2.0 * p <= 1.0) {
    report.tail_bound = std::numeric_limits<double>::infinity();
  } else {
    const double k1 = spec.mode_cutoff + 1.0;
    const double w = 2.0 * std::numbers::pi;
    const double first = std::pow(1.0 + w * w * k1 * k1, -p);
    const double rest = std::pow(w, -2.0 * p) * std::pow(k1, 1.0 - 2.0 * p) /
                        (2.0 * p - 1.0);
    report.tail_bound = a2 * 2.0 * (first + rest);
  }
  return report;
}

Eigen::VectorXd standard_normals(const RngStream& rng, std::uint64_t step,
                                 int count) {
  const std::uint64_t key =
      mix64(mix64(rng.seed ^ mix64(rng.stream_id)) + step);
  std::mt19937_64 engine(key);
  Eigen::VectorXd out(count);
  // Box-Muller; std::normal_distribution is not portable across libraries.
  for (int i = 0; i < count; i += 2) {
    const double r = std::sqrt(-2.0 * std::log(unit_open_left(engine())));
    const double angle = 2.0 * std::numbers::pi * unit_closed_left(engine());
    out[i] = r * std::cos(angle);
    if (i + 1 < count) out[i + 1] = r * std::sin(angle);
  }
  return out;
}

NoiseSampler::NoiseSampler(NoiseSpec spec, GridSpec grid)
    : spec_(std::move(spec)), grid_(grid) {
  const int K = spec_.mode_cutoff;
  basis_.resize(grid_.nodes(), spec_.mode_count());
  for (int k = -K; k <= K; ++k) {
    for (int j = 0; j < grid_.nodes(); ++j) {
      basis_(j, k + K) = spec_.lambda(k) * basis_psi(k, grid_.node(j));
    }
  }
}

Eigen::VectorXd NoiseSampler::coefficient_increment(const RngStream& rng,
                                                    std::uint64_t first_step,
                                                    int substeps,
                                                    double dt_fine) const {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(spec_.mode_count());
  for (int s = 0; s < substeps; ++s) {
    sum += standard_normals(rng, first_step + s, spec_.mode_count());
  }
  return sum * std::sqrt(dt_fine);
}

Field NoiseSampler::synthesize(const Eigen::VectorXd& coefficients) const {
  return Field(grid_, basis_ * coefficients);
}

NoiseIncrement NoiseSampler::increment(const RngStream& rng,
                                       std::uint64_t step, double dt,
                                       int substeps) const {
  if (!(dt > 0.0)) throw std::invalid_argument("increment: dt must be > 0");
  if (substeps < 1) throw std::invalid_argument("increment: substeps < 1");
  if (silent()) return {Field(grid_), dt};
  const auto c = coefficient_increment(
      rng, step * static_cast<std::uint64_t>(substeps), substeps,
      dt / substeps);
  return {synthesize(c), dt};
}

Eigen::VectorXd NoiseSampler::nodal_variance_rate() const {
  return basis_.cwiseAbs2().rowwise().sum();
}

NoiseIncrement sample_increment(const NoiseSpec& spec, const GridSpec& grid,
                                double dt, const RngStream& rng,
                                std::uint64_t step) {
  return NoiseSampler(spec, grid).increment(rng, step, dt);
}

PiecewiseLinearPath::PiecewiseLinearPath(const NoiseSampler& sampler,
                                         RngStream rng, double t_end,
                                         double dt_coarse, int refinement,
                                         int draw_substeps)
    : sampler_(sampler), dt_fine_(dt_coarse / refinement) {
  if (refinement < 1 || draw_substeps < 1) {
    throw std::invalid_argument("PiecewiseLinearPath: refinement must be >= 1");
  }
  if (!(dt_coarse > 0.0) || !(t_end >= 0.0)) {
    throw std::invalid_argument("PiecewiseLinearPath: bad time parameters");
  }
  const auto steps =
      static_cast<std::size_t>(std::llround(t_end / dt_fine_));
  const int modes = sampler_.spec().mode_count();
  knots_.reserve(steps + 1);
  slopes_.reserve(steps);
  knots_.push_back(Eigen::VectorXd::Zero(modes));
  for (std::size_t m = 0; m < steps; ++m) {
    Eigen::VectorXd inc =
        sampler_.silent()
            ? Eigen::VectorXd::Zero(modes)
            : sampler_.coefficient_increment(
                  rng, m * static_cast<std::uint64_t>(draw_substeps),
                  draw_substeps, dt_fine_ / draw_substeps);
    knots_.push_back(knots_.back() + inc);
    slopes_.push_back(sampler_.synthesize(inc / dt_fine_));
  }
}

std::size_t PiecewiseLinearPath::interval_of(double t) const {
  if (intervals() == 0) {
    throw std::out_of_range("PiecewiseLinearPath: empty path");
  }
  const double pos = std::floor(t / dt_fine_ + 1e-9);
  if (pos < 0) return 0;
  return std::min(static_cast<std::size_t>(pos), intervals() - 1);
}

Eigen::VectorXd PiecewiseLinearPath::value_coefficients(double t) const {
  if (intervals() == 0) return knots_.front();
  const std::size_t m = interval_of(t);
  const double frac = (t - m * dt_fine_) / dt_fine_;
  return knots_[m] + frac * (knots_[m + 1] - knots_[m]);
}

Eigen::VectorXd PiecewiseLinearPath::slope_coefficients(double t) const {
  const std::size_t m = interval_of(t);
  return (knots_[m + 1] - knots_[m]) / dt_fine_;
}

Field PiecewiseLinearPath::value(double t) const {
  return sampler_.synthesize(value_coefficients(t));
}

Field PiecewiseLinearPath::slope(double t) const {
  return slopes_[interval_of(t)];
}

Field PiecewiseLinearPath::slope_on_interval(std::size_t m) const {
  return slopes_.at(m);
}

}  // namespace sks
