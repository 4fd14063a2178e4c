#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace gbm {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexMatrix = Matrix<std::complex<Scalar>>;

template <typename Scalar>
using ComplexVector = Vector<std::complex<Scalar>>;

/// Integer multiindex alpha in Z^n.
using MultiIndex = Eigen::VectorXi;

/// Lattice coordinates of a walk position, in units of the lattice spacing.
using LatticePoint = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// One internal path omega: rows are time steps, columns are directions, entries +-1.
using SignMatrix = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
inline constexpr Scalar kPi = Scalar(3.141592653589793238462643383279502884L);

template <typename Scalar>
inline constexpr Scalar kFourPiSq = Scalar(4) * kPi<Scalar> * kPi<Scalar>;

template <typename Derived>
typename Derived::RealScalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? typename Derived::RealScalar(0) : m.cwiseAbs().maxCoeff();
}

}  // namespace gbm
