#pragma once

#include <cmath>

#include "gbm/errors.hpp"
#include "gbm/types.hpp"

namespace gbm {

/// Values of one path of an internal process: row s holds X(s dt), so there
/// are M+1 rows; columns are components.
template <typename Scalar>
struct InternalProcess {
  Matrix<Scalar> values;

  long steps() const { return static_cast<long>(values.rows()) - 1; }
  int dim() const { return static_cast<int>(values.cols()); }

  /// Delta X(s) = X(s+1) - X(s), an M x n matrix.
  Matrix<Scalar> increments() const {
    const Eigen::Index m = values.rows() - 1;
    return values.bottomRows(m) - values.topRows(m);
  }
};

/// (int Y dX)(t) = sum_{s<t} Y(s) Delta X(s), left-point and componentwise.
template <typename Scalar>
InternalProcess<Scalar> stochastic_integral(const InternalProcess<Scalar>& integrand,
                                            const InternalProcess<Scalar>& integrator) {
  require(integrand.values.rows() == integrator.values.rows() && integrand.values.cols() == integrator.values.cols(),
          ErrorKind::LengthMismatch, "stochastic integral needs processes on the same timeline");
  const Eigen::Index m = integrator.values.rows() - 1;
  InternalProcess<Scalar> out{Matrix<Scalar>::Zero(m + 1, integrator.values.cols())};
  const Matrix<Scalar> dx = integrator.increments();
  for (Eigen::Index s = 0; s < m; ++s)
    out.values.row(s + 1) = out.values.row(s) + integrand.values.row(s).cwiseProduct(dx.row(s));
  return out;
}

/// [M]_t = sum_{s<t} (Delta M_s)^2, componentwise.
template <typename Scalar>
InternalProcess<Scalar> quadratic_variation(const InternalProcess<Scalar>& process) {
  const Eigen::Index m = process.values.rows() - 1;
  InternalProcess<Scalar> out{Matrix<Scalar>::Zero(m + 1, process.values.cols())};
  const Matrix<Scalar> dx = process.increments();
  for (Eigen::Index s = 0; s < m; ++s) out.values.row(s + 1) = out.values.row(s) + dx.row(s).cwiseAbs2();
  return out;
}

/// |f(M_t) - f(M_0) - sum f'(M_s) dM_s - 1/2 sum f''(M_s) dM_s^2| for a scalar path.
template <typename Scalar, typename F, typename DF, typename DDF>
Scalar ito_residual(F&& f, DF&& df, DDF&& ddf, const InternalProcess<Scalar>& process) {
  require(process.dim() == 1, ErrorKind::InvalidArgument, "ito residual needs a scalar process");
  require(process.values.rows() >= 1, ErrorKind::LengthMismatch, "empty process");
  const auto& v = process.values;
  const Eigen::Index m = v.rows() - 1;
  Scalar first = 0;
  Scalar second = 0;
  for (Eigen::Index s = 0; s < m; ++s) {
    const Scalar x = v(s, 0);
    const Scalar d = v(s + 1, 0) - x;
    first += df(x) * d;
    second += ddf(x) * d * d;
  }
  return std::abs(f(v(m, 0)) - f(v(0, 0)) - first - Scalar(0.5) * second);
}

}  // namespace gbm
