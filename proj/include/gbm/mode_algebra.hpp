#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "gbm/errors.hpp"
#include "gbm/multi_index.hpp"
#include "gbm/types.hpp"

namespace gbm {

/// Constant diffusion tensor a^{ij}_{kl}: i, j index system components and
/// k, l index space directions. The system and the space share dimension n.
template <typename Scalar>
class CoefficientTensor {
 public:
  CoefficientTensor() = default;
  explicit CoefficientTensor(int dim)
      : dim_(dim), data_(static_cast<std::size_t>(dim) * dim * dim * dim, Scalar(0)) {
    require(dim >= 1, ErrorKind::InvalidArgument, "tensor dimension must be positive");
  }

  int dim() const { return dim_; }

  Scalar& operator()(int i, int j, int k, int l) { return data_[offset(i, j, k, l)]; }
  Scalar operator()(int i, int j, int k, int l) const { return data_[offset(i, j, k, l)]; }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](Scalar v) { return std::isfinite(v); });
  }

  /// max_i sum_{j,k,l} |a^{ij}_{kl}|; bounds the discrete operator's row sums.
  Scalar row_norm() const {
    Scalar best = 0;
    for (int i = 0; i < dim_; ++i) {
      Scalar s = 0;
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k)
          for (int l = 0; l < dim_; ++l) s += std::abs((*this)(i, j, k, l));
      best = std::max(best, s);
    }
    return best;
  }

  CoefficientTensor& operator*=(Scalar s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend CoefficientTensor operator*(Scalar s, CoefficientTensor t) { return t *= s; }

  template <typename Other>
  CoefficientTensor<Other> cast() const {
    CoefficientTensor<Other> out(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k)
          for (int l = 0; l < dim_; ++l) out(i, j, k, l) = static_cast<Other>((*this)(i, j, k, l));
    return out;
  }

 private:
  std::size_t offset(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * dim_ + j) * dim_ + k) * dim_ + l;
  }

  int dim_ = 0;
  std::vector<Scalar> data_;
};

/// Uncoupled heat equations du_i/dt = c * Laplace(u_i).
template <typename Scalar>
CoefficientTensor<Scalar> scalar_tensor(int dim, Scalar c = Scalar(1)) {
  CoefficientTensor<Scalar> t(dim);
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < dim; ++k) t(i, i, k, k) = c;
  return t;
}

/// Time-dependent Lame operator  a * Laplace(v) + grad(div v), with the
/// mixed-derivative part split symmetrically over (k,l) and (l,k).
template <typename Scalar>
CoefficientTensor<Scalar> lame_tensor(int dim, Scalar a) {
  CoefficientTensor<Scalar> t(dim);
  for (int i = 0; i < dim; ++i) {
    for (int k = 0; k < dim; ++k) t(i, i, k, k) += a;
    for (int j = 0; j < dim; ++j) {
      t(i, j, i, j) += Scalar(0.5);
      t(i, j, j, i) += Scalar(0.5);
    }
  }
  return t;
}

/// Lame coefficient a = 1 - nu (n - 1).
template <typename Scalar>
Scalar lame_coefficient(int dim, Scalar nu) {
  return Scalar(1) - nu * Scalar(dim - 1);
}

template <typename Scalar>
CoefficientTensor<Scalar> lame_tensor_from_poisson(int dim, Scalar nu) {
  return lame_tensor<Scalar>(dim, lame_coefficient<Scalar>(dim, nu));
}

/// A_alpha = ( sum_{kl} a^{ij}_{kl} 4 pi^2 alpha_k alpha_l )_{ij}, symmetrized.
/// Throws AsymmetricMode when the raw assembly is asymmetric beyond
/// 1e-10 * ||A||_max and NonFinite on overflow.
template <typename Scalar>
Matrix<Scalar> build_mode_matrix(const CoefficientTensor<Scalar>& tensor, const MultiIndex& alpha) {
  const int n = tensor.dim();
  require(alpha.size() == n, ErrorKind::InvalidArgument, "multiindex length must equal tensor dimension");
  Matrix<Scalar> m = Matrix<Scalar>::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Scalar s = 0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += tensor(i, j, k, l) * Scalar(alpha(k)) * Scalar(alpha(l));
      m(i, j) = kFourPiSq<Scalar> * s;
    }
  if (!m.allFinite()) throw Error(ErrorKind::NonFinite, "mode matrix for " + to_string(alpha) + " is not finite");
  const Scalar scale = max_abs(m);
  const Scalar asym = max_abs(m - m.transpose());
  if (asym > Scalar(1e-10) * scale)
    throw Error(ErrorKind::AsymmetricMode,
                "mode matrix for " + to_string(alpha) + " has asymmetry " + std::to_string(double(asym)));
  return (m + m.transpose()) / Scalar(2);
}

template <typename Scalar>
struct EigenDecomposition {
  Matrix<Scalar> Q;       ///< orthogonal, columns are eigenvectors
  Vector<Scalar> lambda;  ///< ascending
  int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Eigenvalues are
/// returned ascending; each eigenvector is signed so that its largest
/// component is positive. Deterministic for fixed input.
template <typename Scalar>
EigenDecomposition<Scalar> eigendecompose(const Matrix<Scalar>& input, int max_sweeps = 50) {
  require(input.rows() == input.cols(), ErrorKind::InvalidArgument, "eigendecompose needs a square matrix");
  require(input.allFinite(), ErrorKind::NonFinite, "eigendecompose input is not finite");
  const Eigen::Index n = input.rows();
  const Scalar scale = max_abs(input);
  require(max_abs(input - input.transpose()) <= Scalar(1e-10) * scale, ErrorKind::AsymmetricMode,
          "eigendecompose input is not symmetric");

  Matrix<Scalar> a = (input + input.transpose()) / Scalar(2);
  Matrix<Scalar> v = Matrix<Scalar>::Identity(n, n);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar norm = a.norm();

  auto off_diagonal = [&]() {
    Scalar s = 0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) s += a(p, q) * a(p, q);
    return std::sqrt(Scalar(2) * s);
  };

  int sweep = 0;
  for (;; ++sweep) {
    const Scalar off = off_diagonal();
    if (off <= eps * norm) break;
    if (sweep >= max_sweeps)
      throw Error(ErrorKind::NoConvergence, "Jacobi did not converge in " + std::to_string(max_sweeps) + " sweeps");
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar app = a(p, p);
        const Scalar aqq = a(q, q);
        // negligible against both diagonal entries
        if (std::abs(app) + Scalar(100) * std::abs(apq) == std::abs(app) &&
            std::abs(aqq) + Scalar(100) * std::abs(apq) == std::abs(aqq)) {
          a(p, q) = a(q, p) = 0;
          continue;
        }
        const Scalar theta = (aqq - app) / (Scalar(2) * apq);
        const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) /
                         (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
        const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
        const Scalar s = t * c;
        for (Eigen::Index r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const Scalar g = a(r, p);
          const Scalar h = a(r, q);
          a(r, p) = a(p, r) = c * g - s * h;
          a(r, q) = a(q, r) = s * g + c * h;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0;
        for (Eigen::Index r = 0; r < n; ++r) {
          const Scalar g = v(r, p);
          const Scalar h = v(r, q);
          v(r, p) = c * g - s * h;
          v(r, q) = s * g + c * h;
        }
      }
    }
  }

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index(0));
  std::stable_sort(perm.begin(), perm.end(), [&](Eigen::Index x, Eigen::Index y) { return a(x, x) < a(y, y); });

  EigenDecomposition<Scalar> out;
  out.Q.resize(n, n);
  out.lambda.resize(n);
  out.sweeps = sweep;
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::Index src = perm[static_cast<std::size_t>(c)];
    out.lambda(c) = a(src, src);
    Vector<Scalar> col = v.col(src);
    Eigen::Index big = 0;
    col.cwiseAbs().maxCoeff(&big);
    if (col(big) < 0) col = -col;
    out.Q.col(c) = col;
  }
  return out;
}

/// Per-mode data: A_alpha (with the 4 pi^2 factor), its eigenbasis and spectrum.
template <typename Scalar>
struct ModeSpectrum {
  MultiIndex alpha;
  Matrix<Scalar> A;
  Matrix<Scalar> Q;
  Vector<Scalar> lambda;
  bool includes_two_pi_sq = true;

  int dim() const { return static_cast<int>(A.rows()); }
  Scalar lambda_min() const { return lambda.size() ? lambda.minCoeff() : Scalar(0); }
};

template <typename Scalar>
ModeSpectrum<Scalar> make_spectrum(const Matrix<Scalar>& A, MultiIndex alpha = {}) {
  auto eig = eigendecompose<Scalar>(A);
  return ModeSpectrum<Scalar>{std::move(alpha), A, std::move(eig.Q), std::move(eig.lambda), true};
}

template <typename Scalar>
ModeSpectrum<Scalar> make_spectrum(const CoefficientTensor<Scalar>& tensor, const MultiIndex& alpha) {
  return make_spectrum<Scalar>(build_mode_matrix(tensor, alpha), alpha);
}

/// Spectra for every mode of the truncation box, in lexicographic order.
template <typename Scalar>
std::vector<ModeSpectrum<Scalar>> mode_spectra(const CoefficientTensor<Scalar>& tensor, int radius) {
  const ModeBox box(tensor.dim(), radius);
  std::vector<ModeSpectrum<Scalar>> out;
  out.reserve(box.size());
  for (std::size_t m = 0; m < box.size(); ++m) out.push_back(make_spectrum(tensor, box[m]));
  return out;
}

/// Q diag(values) Q^T. values may be complex.
template <typename Scalar, typename Values>
auto spectral_function(const Matrix<Scalar>& Q, const Values& values) {
  using V = typename Values::Scalar;
  const Matrix<V> q = Q.template cast<V>();
  return Matrix<V>(q * values.asDiagonal() * q.transpose());
}

/// sqrt of an eigenvalue with the semidefinite guard: values in [-1e-12, 0]
/// become 0, anything below throws NegativeEigenvalue.
template <typename Scalar>
Scalar clamped_sqrt(Scalar lambda) {
  if (lambda < Scalar(-1e-12))
    throw Error(ErrorKind::NegativeEigenvalue, "eigenvalue " + std::to_string(double(lambda)) + " < -1e-12");
  return lambda <= Scalar(0) ? Scalar(0) : std::sqrt(lambda);
}

template <typename Scalar>
Matrix<Scalar> matrix_sqrt(const ModeSpectrum<Scalar>& spec) {
  Vector<Scalar> root = spec.lambda.unaryExpr([](Scalar l) { return clamped_sqrt(l); });
  return spectral_function(spec.Q, root);
}

/// exp(-A t) = Q diag(e^{-lambda t}) Q^T.
template <typename Scalar>
Matrix<Scalar> propagator(const ModeSpectrum<Scalar>& spec, Scalar t) {
  require(t >= Scalar(0), ErrorKind::NegativeTime, "propagator needs t >= 0");
  Vector<Scalar> decay = (-spec.lambda.array() * t).exp().matrix();
  return spectral_function(spec.Q, decay);
}

template <typename Scalar>
struct EllipticityEntry {
  MultiIndex alpha;
  Scalar lambda_min;
  bool exempt;   ///< some alpha_i == 0: positivity not required
  bool flagged;  ///< all alpha_i != 0 and lambda_min <= 0
};

template <typename Scalar>
struct EllipticityReport {
  std::vector<EllipticityEntry<Scalar>> entries;

  std::vector<MultiIndex> violations() const {
    std::vector<MultiIndex> out;
    for (const auto& e : entries)
      if (e.flagged) out.push_back(e.alpha);
    return out;
  }
  bool clean() const { return violations().empty(); }
};

/// lambda_min(A_alpha) for every |alpha_i| <= K.
template <typename Scalar>
EllipticityReport<Scalar> ellipticity_report(const CoefficientTensor<Scalar>& tensor, int radius) {
  require(radius >= 1, ErrorKind::InvalidArgument, "ellipticity report needs K >= 1");
  const ModeBox box(tensor.dim(), radius);
  EllipticityReport<Scalar> report;
  report.entries.reserve(box.size());
  for (std::size_t m = 0; m < box.size(); ++m) {
    const MultiIndex alpha = box[m];
    const auto eig = eigendecompose<Scalar>(build_mode_matrix(tensor, alpha));
    const Scalar lmin = eig.lambda.minCoeff();
    const bool exempt = !all_nonzero(alpha);
    report.entries.push_back({alpha, lmin, exempt, !exempt && lmin <= Scalar(0)});
  }
  return report;
}

/// Throws EllipticityViolation for the first flagged mode.
template <typename Scalar>
void check_ellipticity(const CoefficientTensor<Scalar>& tensor, int radius) {
  const auto report = ellipticity_report(tensor, std::max(radius, 1));
  for (const auto& e : report.entries)
    if (e.flagged)
      throw EllipticityViolation(e.alpha, double(e.lambda_min),
                                 "mode " + to_string(e.alpha) + " has lambda_min " +
                                     std::to_string(double(e.lambda_min)));
}

}  // namespace gbm
