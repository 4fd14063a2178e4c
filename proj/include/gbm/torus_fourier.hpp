#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <cstddef>
#include <vector>

#include "gbm/errors.hpp"
#include "gbm/mode_algebra.hpp"
#include "gbm/multi_index.hpp"
#include "gbm/types.hpp"

namespace gbm {

/// Uniform grid of G points per axis on [0,1)^n, spacing 1/G. Points are
/// enumerated lexicographically, first axis slowest.
class TorusGrid {
 public:
  TorusGrid() = default;
  TorusGrid(int dim, int points) : dim_(dim), points_(points) {
    require(dim >= 1, ErrorKind::InvalidArgument, "grid dimension must be positive");
    require(points >= 1, ErrorKind::InvalidArgument, "grid needs at least one point per axis");
    size_ = 1;
    for (int d = 0; d < dim; ++d) size_ *= static_cast<std::size_t>(points);
  }

  int dim() const { return dim_; }
  int points() const { return points_; }
  std::size_t size() const { return size_; }

  Eigen::VectorXi cell(std::size_t index) const {
    Eigen::VectorXi k(dim_);
    for (int d = dim_ - 1; d >= 0; --d) {
      k(d) = static_cast<int>(index % static_cast<std::size_t>(points_));
      index /= static_cast<std::size_t>(points_);
    }
    return k;
  }

  /// Periodic index of a (possibly out-of-range) cell.
  std::size_t index_of(const Eigen::VectorXi& k) const {
    std::size_t index = 0;
    for (int d = 0; d < dim_; ++d) {
      int kd = k(d) % points_;
      if (kd < 0) kd += points_;
      index = index * static_cast<std::size_t>(points_) + static_cast<std::size_t>(kd);
    }
    return index;
  }

  template <typename Scalar = double>
  Vector<Scalar> point(std::size_t index) const {
    return cell(index).template cast<Scalar>() / Scalar(points_);
  }

 private:
  int dim_ = 0;
  int points_ = 0;
  std::size_t size_ = 0;
};

/// Real vector field sampled on a TorusGrid: rows are grid points, columns components.
template <typename Scalar>
struct GridField {
  TorusGrid grid;
  Matrix<Scalar> values;

  int components() const { return static_cast<int>(values.cols()); }
};

template <typename Scalar, typename F>
GridField<Scalar> sample_field(const TorusGrid& grid, int components, F&& f) {
  GridField<Scalar> out{grid, Matrix<Scalar>(static_cast<Eigen::Index>(grid.size()), components)};
  for (std::size_t p = 0; p < grid.size(); ++p)
    out.values.row(static_cast<Eigen::Index>(p)) = f(grid.template point<Scalar>(p)).transpose();
  return out;
}

/// Truncated Fourier coefficients f_alpha in C^components for |alpha_i| <= K,
/// stored in ModeBox order.
template <typename Scalar>
struct SpectralField {
  int dim = 0;
  int components = 0;
  int radius = 0;
  std::vector<ComplexVector<Scalar>> coeffs;
  /// Grid mean square not captured by the retained modes (0 if not from a grid).
  Scalar tail_mass = 0;

  SpectralField() = default;
  SpectralField(int dim_, int components_, int radius_)
      : dim(dim_), components(components_), radius(radius_) {
    coeffs.assign(box().size(), ComplexVector<Scalar>::Zero(components_));
  }

  ModeBox box() const { return ModeBox(dim, radius); }
  ComplexVector<Scalar>& operator[](const MultiIndex& alpha) { return coeffs[box().index_of(alpha)]; }
  const ComplexVector<Scalar>& operator[](const MultiIndex& alpha) const { return coeffs[box().index_of(alpha)]; }

  /// sum_alpha |f_alpha|^2
  Scalar energy() const {
    Scalar s = 0;
    for (const auto& c : coeffs) s += c.squaredNorm();
    return s;
  }

  /// max over alpha of |f_{-alpha} - conj(f_alpha)|
  Scalar conjugate_asymmetry() const {
    const ModeBox b = box();
    Scalar worst = 0;
    for (std::size_t m = 0; m < b.size(); ++m)
      worst = std::max(worst, max_abs(coeffs[b.mirror(m)] - coeffs[m].conjugate()));
    return worst;
  }
};

namespace detail {

template <typename Scalar>
std::vector<std::complex<Scalar>> roots_of_unity(int points, Scalar sign) {
  std::vector<std::complex<Scalar>> w(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j)
    w[static_cast<std::size_t>(j)] = std::polar(Scalar(1), sign * Scalar(2) * kPi<Scalar> * Scalar(j) / Scalar(points));
  return w;
}

inline int dot_mod(const MultiIndex& alpha, const Eigen::VectorXi& k, int modulus) {
  long long s = 0;
  for (Eigen::Index d = 0; d < alpha.size(); ++d) s += static_cast<long long>(alpha(d)) * k(d);
  long long r = s % modulus;
  return static_cast<int>(r < 0 ? r + modulus : r);
}

}  // namespace detail

/// Equal-weight quadrature of f_alpha = int f(y) exp(-i 2 pi alpha y) dy for
/// every |alpha_i| <= K. Exact for fields band-limited to the box when G >= 2K+1.
template <typename Scalar>
SpectralField<Scalar> forward(const GridField<Scalar>& field, int radius) {
  const TorusGrid& grid = field.grid;
  require(grid.points() >= 2 * radius + 1, ErrorKind::AliasRisk,
          "grid of " + std::to_string(grid.points()) + " points cannot resolve radius " + std::to_string(radius));
  require(field.values.rows() == static_cast<Eigen::Index>(grid.size()), ErrorKind::LengthMismatch,
          "field rows do not match grid size");
  const int comps = field.components();
  SpectralField<Scalar> out(grid.dim(), comps, radius);
  const ModeBox box = out.box();
  const auto w = detail::roots_of_unity<Scalar>(grid.points(), Scalar(-1));
  std::vector<Eigen::VectorXi> cells(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) cells[p] = grid.cell(p);

  const Scalar weight = Scalar(1) / Scalar(grid.size());
  for (std::size_t m = 0; m < box.size(); ++m) {
    const MultiIndex alpha = box[m];
    ComplexVector<Scalar> acc = ComplexVector<Scalar>::Zero(comps);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const auto phase = w[static_cast<std::size_t>(detail::dot_mod(alpha, cells[p], grid.points()))];
      acc += phase * field.values.row(static_cast<Eigen::Index>(p)).transpose().template cast<std::complex<Scalar>>();
    }
    out.coeffs[m] = acc * weight;
  }
  const Scalar mean_square = field.values.squaredNorm() * weight;
  out.tail_mass = std::max(Scalar(0), mean_square - out.energy());
  return out;
}

template <typename Scalar>
struct FieldSamples {
  Matrix<Scalar> values;  ///< real part, rows are points
  Scalar max_imag = 0;    ///< largest discarded imaginary part
};

/// Pointwise truncated sum f(x) = sum_alpha f_alpha exp(i 2 pi alpha x).
template <typename Scalar>
FieldSamples<Scalar> inverse(const SpectralField<Scalar>& field, const std::vector<Vector<Scalar>>& points) {
  const ModeBox box = field.box();
  FieldSamples<Scalar> out{Matrix<Scalar>(static_cast<Eigen::Index>(points.size()), field.components), 0};
  for (std::size_t p = 0; p < points.size(); ++p) {
    require(points[p].size() == field.dim, ErrorKind::LengthMismatch, "evaluation point has wrong dimension");
    ComplexVector<Scalar> acc = ComplexVector<Scalar>::Zero(field.components);
    for (std::size_t m = 0; m < box.size(); ++m) {
      const Scalar angle = Scalar(2) * kPi<Scalar> * box[m].template cast<Scalar>().dot(points[p]);
      acc += std::polar(Scalar(1), angle) * field.coeffs[m];
    }
    out.values.row(static_cast<Eigen::Index>(p)) = acc.real().transpose();
    out.max_imag = std::max(out.max_imag, max_abs(acc.imag()));
  }
  return out;
}

/// Evaluate on the grid points of a TorusGrid.
template <typename Scalar>
GridField<Scalar> inverse_on_grid(const SpectralField<Scalar>& field, const TorusGrid& grid) {
  std::vector<Vector<Scalar>> points(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) points[p] = grid.template point<Scalar>(p);
  return GridField<Scalar>{grid, inverse(field, points).values};
}

template <typename Scalar>
struct ThetaValue {
  Scalar value = 0;
  Scalar imag_residual = 0;
  Scalar tail_bound = 0;  ///< sum of e^{-4 pi^2 |alpha|^2 t} over modes outside the box
};

/// Periodic heat kernel theta(t,x) = sum_alpha exp(2 pi i alpha x - 4 pi^2 |alpha|^2 t),
/// truncated to |alpha_i| <= K.
template <typename Scalar>
ThetaValue<Scalar> theta_kernel(Scalar t, const Vector<Scalar>& x, int radius) {
  require(t > Scalar(0), ErrorKind::NonpositiveTime, "theta kernel needs t > 0");
  const int n = static_cast<int>(x.size());
  const ModeBox box(n, radius);
  std::complex<Scalar> acc = 0;
  for (std::size_t m = 0; m < box.size(); ++m) {
    const Vector<Scalar> a = box[m].template cast<Scalar>();
    acc += std::polar(std::exp(-kFourPiSq<Scalar> * a.squaredNorm() * t), Scalar(2) * kPi<Scalar> * a.dot(x));
  }
  // 1D sums: inside = sum_{|m|<=K}, outside = sum_{|m|>K}
  Scalar inside = 0;
  for (int m = -radius; m <= radius; ++m) inside += std::exp(-kFourPiSq<Scalar> * Scalar(m) * Scalar(m) * t);
  Scalar outside = 0;
  for (int m = radius + 1;; ++m) {
    const Scalar term = Scalar(2) * std::exp(-kFourPiSq<Scalar> * Scalar(m) * Scalar(m) * t);
    outside += term;
    if (term <= std::numeric_limits<Scalar>::epsilon() * (inside + outside) || m > radius + 100000) break;
  }
  // (inside+outside)^n - inside^n without cancellation
  Scalar factor = 0;
  for (int j = 0; j < n; ++j) factor += std::pow(inside + outside, Scalar(j)) * std::pow(inside, Scalar(n - 1 - j));
  return {acc.real(), std::abs(acc.imag()), outside * factor};
}

template <typename Scalar>
struct SystemKernel {
  ComplexMatrix<Scalar> value;
  Scalar hermitian_residual = 0;  ///< max |K - K^H|
};

/// Theta^A(t, z) = sum_alpha exp(-A_alpha t) exp(i 2 pi alpha z) over the supplied spectra.
template <typename Scalar>
SystemKernel<Scalar> theta_system_kernel(const std::vector<ModeSpectrum<Scalar>>& spectra, Scalar t,
                                         const Vector<Scalar>& z) {
  require(t > Scalar(0), ErrorKind::NonpositiveTime, "system kernel needs t > 0");
  require(!spectra.empty(), ErrorKind::InvalidArgument, "system kernel needs at least one mode");
  const int n = spectra.front().dim();
  ComplexMatrix<Scalar> acc = ComplexMatrix<Scalar>::Zero(n, n);
  for (const auto& spec : spectra) {
    const auto phase = std::polar(Scalar(1), Scalar(2) * kPi<Scalar> * spec.alpha.template cast<Scalar>().dot(z));
    acc += phase * propagator(spec, t).template cast<std::complex<Scalar>>();
  }
  const Scalar herm = max_abs(acc - acc.adjoint());
  return {std::move(acc), herm};
}

}  // namespace gbm
