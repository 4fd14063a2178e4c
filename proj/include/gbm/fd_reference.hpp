#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "gbm/errors.hpp"
#include "gbm/mode_algebra.hpp"
#include "gbm/torus_fourier.hpp"
#include "gbm/types.hpp"

namespace gbm {

namespace detail {

/// neighbor[p] for the periodic shift of every grid point by `shift`.
inline std::vector<Eigen::Index> shifted_indices(const TorusGrid& grid, const Eigen::VectorXi& shift) {
  std::vector<Eigen::Index> out(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p)
    out[p] = static_cast<Eigen::Index>(grid.index_of(grid.cell(p) + shift));
  return out;
}

}  // namespace detail

/// Discrete operator sum_{j,k,l} a^{ij}_{kl} d^2 u_j / dx_k dx_l on a periodic
/// grid: central second differences, 4-point diagonal stencil for mixed terms.
/// Neighbor tables are built once so repeated application is cheap.
template <typename Scalar>
class FdOperator {
 public:
  FdOperator(const CoefficientTensor<Scalar>& tensor, const TorusGrid& grid) : grid_(grid), dim_(tensor.dim()) {
    const int n = dim_;
    require(grid.points() >= 4, ErrorKind::InvalidArgument, "finite differences need G >= 4");
    require(grid.dim() == n, ErrorKind::LengthMismatch, "grid dimension must match tensor dimension");
    const Scalar g2 = Scalar(grid.points()) * Scalar(grid.points());
    auto unit = [n](int axis, int sign) {
      Eigen::VectorXi e = Eigen::VectorXi::Zero(n);
      e(axis) = sign;
      return e;
    };
    for (int k = 0; k < n; ++k) {
      for (int l = k; l < n; ++l) {
        Term term;
        term.coupling.resize(n, n);  // (i, j) -> weight of D_kl u_j in component i
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            term.coupling(i, j) = k == l ? tensor(i, j, k, k) : tensor(i, j, k, l) + tensor(i, j, l, k);
        if (term.coupling.isZero(0)) continue;
        if (k == l) {
          term.taps = {{detail::shifted_indices(grid, unit(k, 1)), g2},
                       {detail::shifted_indices(grid, unit(k, -1)), g2}};
          term.center = Scalar(-2) * g2;
        } else {
          const Scalar w = g2 / Scalar(4);
          term.taps = {{detail::shifted_indices(grid, unit(k, 1) + unit(l, 1)), w},
                       {detail::shifted_indices(grid, unit(k, 1) + unit(l, -1)), -w},
                       {detail::shifted_indices(grid, unit(k, -1) + unit(l, 1)), -w},
                       {detail::shifted_indices(grid, unit(k, -1) + unit(l, -1)), w}};
          term.center = 0;
        }
        terms_.push_back(std::move(term));
      }
    }
  }

  const TorusGrid& grid() const { return grid_; }

  Matrix<Scalar> apply(const Matrix<Scalar>& u) const {
    require(u.rows() == static_cast<Eigen::Index>(grid_.size()) && u.cols() == dim_, ErrorKind::LengthMismatch,
            "field shape does not match operator");
    Matrix<Scalar> out = Matrix<Scalar>::Zero(u.rows(), u.cols());
    Matrix<Scalar> d(u.rows(), u.cols());
    for (const auto& term : terms_) {
      d = term.center * u;
      for (const auto& [index, weight] : term.taps)
        for (Eigen::Index p = 0; p < u.rows(); ++p) d.row(p) += weight * u.row(index[static_cast<std::size_t>(p)]);
      out.noalias() += d * term.coupling.transpose();
    }
    return out;
  }

 private:
  struct Term {
    Matrix<Scalar> coupling;
    std::vector<std::pair<std::vector<Eigen::Index>, Scalar>> taps;
    Scalar center = 0;
  };

  TorusGrid grid_;
  int dim_;
  std::vector<Term> terms_;
};

template <typename Scalar>
GridField<Scalar> apply_operator(const CoefficientTensor<Scalar>& tensor, const GridField<Scalar>& field) {
  require(field.components() == tensor.dim(), ErrorKind::LengthMismatch,
          "field components must match tensor dimension");
  return {field.grid, FdOperator<Scalar>(tensor, field.grid).apply(field.values)};
}

/// Largest forward-Euler step accepted by march: c / (G^2 * max_i sum |a^{ij}_{kl}|).
template <typename Scalar>
Scalar stable_time_step(const CoefficientTensor<Scalar>& tensor, const TorusGrid& grid, Scalar c = Scalar(0.2)) {
  const Scalar norm = tensor.row_norm();
  const Scalar g2 = Scalar(grid.points()) * Scalar(grid.points());
  return norm > 0 ? c / (g2 * norm) : std::numeric_limits<Scalar>::infinity();
}

/// Forward-Euler evolution to time t using ceil(t/dt) equal steps of size <= dt.
template <typename Scalar>
GridField<Scalar> march(const CoefficientTensor<Scalar>& tensor, const GridField<Scalar>& initial, Scalar t,
                        Scalar dt, Scalar stability_c = Scalar(0.2)) {
  require(t >= Scalar(0), ErrorKind::NegativeTime, "march needs t >= 0");
  require(dt > Scalar(0), ErrorKind::InvalidArgument, "march needs dt > 0");
  const Scalar bound = stable_time_step(tensor, initial.grid, stability_c);
  if (dt > bound * (Scalar(1) + Scalar(1e-12)))
    throw Error(ErrorKind::StabilityViolation,
                "dt " + std::to_string(double(dt)) + " exceeds stability bound " + std::to_string(double(bound)));
  GridField<Scalar> u = initial;
  if (t == Scalar(0)) return u;
  const FdOperator<Scalar> op(tensor, initial.grid);
  const long steps = static_cast<long>(std::ceil(t / dt - Scalar(1e-12)));
  const Scalar h = t / Scalar(steps);
  for (long s = 0; s < steps; ++s) u.values += h * op.apply(u.values);
  return u;
}

}  // namespace gbm
