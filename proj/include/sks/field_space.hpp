#pragma once

// Scalar fields on [0,1] with homogeneous Neumann conditions.
//
// Fields are sampled on the N+1 nodes x_j = j/N of a uniform grid. The
// finite-difference operators use ghost reflection (f_{-1} = f_1,
// f_{N+1} = f_{N-1}); quadrature is the trapezoid rule, under which the
// discrete Laplacian and the chemotactic flux divergence integrate to zero.
// The spectral side is the type-I cosine transform, which diagonalizes the
// Neumann Laplacian on the same nodes.

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace sks {

class GridSpec {
 public:
  explicit GridSpec(int n_cells) : n_cells_(n_cells) {
    if (n_cells < 4) {
      throw std::invalid_argument("GridSpec: n_cells must be >= 4, got " +
                                  std::to_string(n_cells));
    }
    spacing_ = 1.0 / n_cells;
  }

  int n_cells() const { return n_cells_; }
  int nodes() const { return n_cells_ + 1; }
  double spacing() const { return spacing_; }
  double node(int j) const { return static_cast<double>(j) / n_cells_; }

  bool operator==(const GridSpec& other) const {
    return n_cells_ == other.n_cells_;
  }

 private:
  int n_cells_;
  double spacing_;
};

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
class BasicField {
  static_assert(std::is_floating_point_v<Scalar>);

 public:
  using Values = Vector<Scalar>;

  explicit BasicField(GridSpec grid)
      : grid_(grid), values_(Values::Zero(grid.nodes())) {}

  BasicField(GridSpec grid, Values values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.nodes()) {
      throw std::invalid_argument("Field: expected " +
                                  std::to_string(grid_.nodes()) +
                                  " values, got " +
                                  std::to_string(values_.size()));
    }
  }

  template <typename Fn>
  static BasicField sample(GridSpec grid, Fn&& fn) {
    Values values(grid.nodes());
    for (int j = 0; j < grid.nodes(); ++j) {
      values[j] = static_cast<Scalar>(fn(static_cast<Scalar>(grid.node(j))));
    }
    return BasicField(grid, std::move(values));
  }

  static BasicField constant(GridSpec grid, Scalar c) {
    return BasicField(grid, Values::Constant(grid.nodes(), c));
  }

  const GridSpec& grid() const { return grid_; }
  const Values& values() const { return values_; }
  Values& values() { return values_; }
  Scalar operator[](int j) const { return values_[j]; }
  Scalar& operator[](int j) { return values_[j]; }
  int size() const { return static_cast<int>(values_.size()); }

  bool all_finite() const { return values_.allFinite(); }

  bool operator==(const BasicField& other) const {
    return grid_ == other.grid_ && values_ == other.values_;
  }

 private:
  GridSpec grid_;
  Values values_;
};

using Field = BasicField<double>;

namespace detail {

template <typename Scalar>
void require_same_grid(const BasicField<Scalar>& a,
                       const BasicField<Scalar>& b) {
  if (!(a.grid() == b.grid())) {
    throw std::invalid_argument("fields live on different grids");
  }
}

}  // namespace detail

template <typename Scalar>
BasicField<Scalar> operator+(const BasicField<Scalar>& a,
                             const BasicField<Scalar>& b) {
  detail::require_same_grid(a, b);
  return BasicField<Scalar>(a.grid(), a.values() + b.values());
}

template <typename Scalar>
BasicField<Scalar> operator-(const BasicField<Scalar>& a,
                             const BasicField<Scalar>& b) {
  detail::require_same_grid(a, b);
  return BasicField<Scalar>(a.grid(), a.values() - b.values());
}

template <typename Scalar>
BasicField<Scalar> operator*(Scalar c, const BasicField<Scalar>& f) {
  return BasicField<Scalar>(f.grid(), c * f.values());
}

/// Pointwise product.
template <typename Scalar>
BasicField<Scalar> pointwise(const BasicField<Scalar>& a,
                             const BasicField<Scalar>& b) {
  detail::require_same_grid(a, b);
  return BasicField<Scalar>(a.grid(),
                            a.values().cwiseProduct(b.values()));
}

// ---------------------------------------------------------------------------
// Finite-difference operators

/// coeff * Delta_h f with ghost-point reflection at both ends.
template <typename Scalar>
BasicField<Scalar> neumann_laplacian(const BasicField<Scalar>& f,
                                     Scalar coeff) {
  const int n = f.grid().n_cells();
  const Scalar h = static_cast<Scalar>(f.grid().spacing());
  const Scalar scale = coeff / (h * h);
  const auto& x = f.values();
  typename BasicField<Scalar>::Values out(n + 1);
  out[0] = scale * (2 * (x[1] - x[0]));
  for (int j = 1; j < n; ++j) {
    out[j] = scale * ((x[j - 1] - x[j]) + (x[j + 1] - x[j]));
  }
  out[n] = scale * (2 * (x[n - 1] - x[n]));
  return BasicField<Scalar>(f.grid(), std::move(out));
}

/// Central differences inside, one-sided second order at the two ends.
template <typename Scalar>
BasicField<Scalar> gradient(const BasicField<Scalar>& f) {
  const int n = f.grid().n_cells();
  const Scalar h = static_cast<Scalar>(f.grid().spacing());
  const auto& x = f.values();
  typename BasicField<Scalar>::Values out(n + 1);
  out[0] = (-3 * x[0] + 4 * x[1] - x[2]) / (2 * h);
  for (int j = 1; j < n; ++j) {
    out[j] = (x[j + 1] - x[j - 1]) / (2 * h);
  }
  out[n] = (3 * x[n] - 4 * x[n - 1] + x[n - 2]) / (2 * h);
  return BasicField<Scalar>(f.grid(), std::move(out));
}

/// chi * div(u grad v) in conservative flux form.
///
/// Interface fluxes F_{j+1/2} = (u_j + u_{j+1})/2 * (v_{j+1} - v_j)/h and
/// zero flux through both walls. Boundary nodes own half cells of width h/2,
/// the control volumes matching trapezoid weights, so the trapezoid integral
/// of the output telescopes to zero and u = c reproduces c * Delta_h v.
template <typename Scalar>
BasicField<Scalar> chemotactic_divergence(const BasicField<Scalar>& u,
                                          const BasicField<Scalar>& v,
                                          Scalar chi) {
  detail::require_same_grid(u, v);
  const int n = u.grid().n_cells();
  const Scalar h = static_cast<Scalar>(u.grid().spacing());
  const auto& a = u.values();
  const auto& b = v.values();
  typename BasicField<Scalar>::Values flux(n);
  for (int j = 0; j < n; ++j) {
    flux[j] = (a[j] + a[j + 1]) / 2 * ((b[j + 1] - b[j]) / h);
  }
  typename BasicField<Scalar>::Values out(n + 1);
  out[0] = chi * (2 * flux[0] / h);
  for (int j = 1; j < n; ++j) {
    out[j] = chi * ((flux[j] - flux[j - 1]) / h);
  }
  out[n] = chi * (-2 * flux[n - 1] / h);
  return BasicField<Scalar>(u.grid(), std::move(out));
}

// ---------------------------------------------------------------------------
// Quadrature

template <typename Scalar>
Scalar trapezoid(const BasicField<Scalar>& f) {
  const auto& x = f.values();
  const int n = f.grid().n_cells();
  Scalar sum = (x[0] + x[n]) / 2;
  for (int j = 1; j < n; ++j) sum += x[j];
  return sum * static_cast<Scalar>(f.grid().spacing());
}

// ---------------------------------------------------------------------------
// Cosine transform

/// Type-I cosine transform on N+1 nodes: f_j = sum_k a_k cos(k pi j / N).
///
/// Instances are cached per grid size; the cached object is immutable and
/// may be used from any thread.
template <typename Scalar>
class CosineTransform {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit CosineTransform(int n_cells) : n_(n_cells) {
    const int m = n_ + 1;
    synthesis_.resize(m, m);
    analysis_.resize(m, m);
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        // Reduce k*j modulo 2N before evaluating the cosine.
        const long r = (static_cast<long>(k) * j) % (2L * n_);
        synthesis_(j, k) = static_cast<Scalar>(
            std::cos(std::numbers::pi_v<long double> * r / n_));
      }
    }
    for (int k = 0; k < m; ++k) {
      const Scalar mode_scale = (k == 0 || k == n_) ? Scalar(1) / n_
                                                    : Scalar(2) / n_;
      for (int j = 0; j < m; ++j) {
        const Scalar node_weight = (j == 0 || j == n_) ? Scalar(0.5)
                                                       : Scalar(1);
        analysis_(k, j) = mode_scale * node_weight * synthesis_(j, k);
      }
    }
  }

  static const CosineTransform& get(int n_cells) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<const CosineTransform>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n_cells];
    if (!slot) slot = std::make_unique<const CosineTransform>(n_cells);
    return *slot;
  }

  int n_cells() const { return n_; }

  Vector<Scalar> forward(const Vector<Scalar>& values) const {
    return analysis_ * values;
  }
  Vector<Scalar> inverse(const Vector<Scalar>& coeffs) const {
    return synthesis_ * coeffs;
  }

  /// Trapezoid L2 norm of cos(k pi x) squared: 1 for k = 0, N, else 1/2.
  Scalar mode_norm_sq(int k) const {
    return (k == 0 || k == n_) ? Scalar(1) : Scalar(0.5);
  }

 private:
  int n_;
  Matrix synthesis_;
  Matrix analysis_;
};

template <typename Scalar>
struct BasicSpectralField {
  GridSpec grid;
  Vector<Scalar> cos_coeffs;
};

using SpectralField = BasicSpectralField<double>;

template <typename Scalar>
BasicSpectralField<Scalar> to_spectral(const BasicField<Scalar>& f) {
  const auto& dct = CosineTransform<Scalar>::get(f.grid().n_cells());
  return {f.grid(), dct.forward(f.values())};
}

template <typename Scalar>
BasicField<Scalar> to_nodal(const BasicSpectralField<Scalar>& s) {
  const auto& dct = CosineTransform<Scalar>::get(s.grid.n_cells());
  return BasicField<Scalar>(s.grid, dct.inverse(s.cos_coeffs));
}

/// Eigenvalue exponent of e^{t(D A + c I)} on cos(k pi x).
template <typename Scalar>
Scalar heat_mode_rate(int k, Scalar diffusivity, Scalar zeroth_order) {
  const Scalar kpi = std::numbers::pi_v<Scalar> * k;
  return -diffusivity * kpi * kpi + zeroth_order;
}

/// phi_1(z) = (e^z - 1) / z, continuous at 0.
template <typename Scalar>
Scalar phi1(Scalar z) {
  if (z == Scalar(0)) return Scalar(1);
  return std::expm1(z) / z;
}

/// e^{t(diffusivity * A + zeroth_order * I)} f, applied mode by mode.
template <typename Scalar>
BasicField<Scalar> apply_heat_semigroup(const BasicField<Scalar>& f, Scalar t,
                                        Scalar diffusivity,
                                        Scalar zeroth_order) {
  if (!(t >= 0)) {
    throw std::invalid_argument("apply_heat_semigroup: negative time");
  }
  if (t == 0) return f;
  auto s = to_spectral(f);
  for (int k = 0; k < s.cos_coeffs.size(); ++k) {
    s.cos_coeffs[k] *=
        std::exp(t * heat_mode_rate(k, diffusivity, zeroth_order));
  }
  return to_nodal(s);
}

/// t * phi_1(t (diffusivity * A + zeroth_order * I)) f: the exact
/// contribution of a frozen source f over a step of length t.
template <typename Scalar>
BasicField<Scalar> apply_heat_phi1(const BasicField<Scalar>& f, Scalar t,
                                   Scalar diffusivity, Scalar zeroth_order) {
  if (!(t >= 0)) {
    throw std::invalid_argument("apply_heat_phi1: negative time");
  }
  auto s = to_spectral(f);
  for (int k = 0; k < s.cos_coeffs.size(); ++k) {
    s.cos_coeffs[k] *=
        t * phi1(t * heat_mode_rate(k, diffusivity, zeroth_order));
  }
  return to_nodal(s);
}

// ---------------------------------------------------------------------------
// Norms

/// A negative density where a non-negative one is required.
class NegativeValueError : public std::domain_error {
 public:
  NegativeValueError(int index, double value)
      : std::domain_error("negative value " + std::to_string(value) +
                          " at node " + std::to_string(index)),
        index_(index),
        value_(value) {}
  int index() const { return index_; }
  double value() const { return value_; }

 private:
  int index_;
  double value_;
};

template <typename Scalar>
Scalar l1_norm(const BasicField<Scalar>& f) {
  return trapezoid(BasicField<Scalar>(f.grid(), f.values().cwiseAbs()));
}

template <typename Scalar>
Scalar l2_norm(const BasicField<Scalar>& f) {
  return std::sqrt(
      trapezoid(BasicField<Scalar>(f.grid(), f.values().cwiseAbs2())));
}

template <typename Scalar>
Scalar h1_seminorm(const BasicField<Scalar>& f) {
  return l2_norm(gradient(f));
}

/// Bessel-potential norm in the Neumann cosine basis with shifted weights
/// (1 + (k pi)^2)^kappa, so constants have finite norm and kappa = 0 is the
/// trapezoid L2 norm.
template <typename Scalar>
Scalar bessel_norm_of_coeffs(const BasicSpectralField<Scalar>& s,
                             Scalar kappa) {
  const auto& dct = CosineTransform<Scalar>::get(s.grid.n_cells());
  Scalar sum = 0;
  for (int k = 0; k < s.cos_coeffs.size(); ++k) {
    const Scalar kpi = std::numbers::pi_v<Scalar> * k;
    const Scalar a = s.cos_coeffs[k];
    sum += std::pow(1 + kpi * kpi, kappa) * a * a * dct.mode_norm_sq(k);
  }
  return std::sqrt(sum);
}

template <typename Scalar>
Scalar bessel_norm(const BasicField<Scalar>& f, Scalar kappa) {
  return bessel_norm_of_coeffs(to_spectral(f), kappa);
}

/// Zygmund LlogL size via the equivalent form int |f| log(2 + |f|) dx.
/// Entries below -tol_pos raise NegativeValueError.
template <typename Scalar>
Scalar llogl_norm(const BasicField<Scalar>& f, Scalar tol_pos) {
  const auto& x = f.values();
  typename BasicField<Scalar>::Values g(x.size());
  for (int j = 0; j < x.size(); ++j) {
    if (x[j] < -tol_pos) throw NegativeValueError(j, static_cast<double>(x[j]));
    const Scalar a = std::abs(x[j]);
    g[j] = a * std::log(2 + a);
  }
  return trapezoid(BasicField<Scalar>(f.grid(), std::move(g)));
}

enum class NormKind { L1, L2, H1Seminorm, Bessel, LlogL };

struct Norm {
  NormKind kind = NormKind::L2;
  double kappa = 0.0;    // Bessel only
  double tol_pos = 0.0;  // LlogL only
};

template <typename Scalar>
Scalar norm(const BasicField<Scalar>& f, const Norm& which) {
  switch (which.kind) {
    case NormKind::L1:
      return l1_norm(f);
    case NormKind::L2:
      return l2_norm(f);
    case NormKind::H1Seminorm:
      return h1_seminorm(f);
    case NormKind::Bessel:
      return bessel_norm(f, static_cast<Scalar>(which.kappa));
    case NormKind::LlogL:
      return llogl_norm(f, static_cast<Scalar>(which.tol_pos));
  }
  throw std::invalid_argument("norm: unknown kind");
}

// ---------------------------------------------------------------------------
// Snapshot persistence (double precision fields)

/// CSV with header "x,value", one row per node, 17 significant digits.
std::string field_to_csv(const Field& f);
void write_field_csv(const Field& f, const std::string& path);
Field read_field_csv(const std::string& path);

}  // namespace sks
