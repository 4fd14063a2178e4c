#pragma once

#include <functional>
#include <vector>

#include "gbm/hyperfinite_walk.hpp"
#include "gbm/mode_algebra.hpp"
#include "gbm/rng.hpp"

namespace gbm {

/// Position-dependent coefficient tensor x -> a^{ij}_{kl}(x), assumed smooth
/// and bounded, with a user-supplied uniform ellipticity margin.
struct CoefficientField {
  int dim = 0;
  std::function<CoefficientTensor<double>(const Eigen::VectorXd&)> tensor_at;
  double margin = 0;  ///< lambda_0: required lower bound of lambda_min(A_alpha(x)) when all alpha_i != 0

  static CoefficientField constant(CoefficientTensor<double> tensor, double margin = 0);
  /// (1 + depth * sin(2 pi x_1)) * Lame(a).
  static CoefficientField modulated_lame(int dim, double a, double depth = 0.5, double margin = 0);
};

/// Eigendecomposition of A_alpha(x); throws EllipticityViolation when the margin fails.
ModeSpectrum<double> local_spectrum(const CoefficientField& field, const MultiIndex& alpha, const Eigen::VectorXd& x);

/// Q_x diag(omega_i sqrt(2 dt lambda_{x,i})) Q_x^T.
Eigen::MatrixXd step_increment(const CoefficientField& field, const MultiIndex& alpha, const Eigen::VectorXd& x,
                               const Eigen::VectorXi& omega, double dt);

struct GeneralizedProcess {
  std::vector<MultiIndex> modes;             ///< ModeBox order, or as requested
  std::vector<Eigen::MatrixXd> accumulated;  ///< X^{sqrt A_alpha}(t)
  std::vector<Eigen::MatrixXcd> factors;     ///< exp(i X^{sqrt A_alpha}(t))
  WalkTrajectory base;
};

/// Accumulates step increments along the plain vector walk driven by `path`,
/// evaluating A_alpha at the pre-step base position. Runs of steps with a
/// bitwise-identical local eigensystem are summed in integer lattice units, so
/// a constant field reproduces mode_factor_sample exactly.
GeneralizedProcess evolve_generalized(const CoefficientField& field, const Timeline& timeline,
                                      const Eigen::VectorXd& start, int radius, const PathSample& path);

GeneralizedProcess evolve_generalized(const CoefficientField& field, const Timeline& timeline,
                                      const Eigen::VectorXd& start, int radius, SignStream& stream);

/// Same, restricted to the listed modes.
GeneralizedProcess evolve_generalized(const CoefficientField& field, const Timeline& timeline,
                                      const Eigen::VectorXd& start, const std::vector<MultiIndex>& modes,
                                      const PathSample& path);

}  // namespace gbm
