#include "gbm/variable_coeff.hpp"

#include <cmath>
#include <optional>

namespace gbm {

CoefficientField CoefficientField::constant(CoefficientTensor<double> tensor, double margin) {
  const int dim = tensor.dim();
  return {dim, [t = std::move(tensor)](const Eigen::VectorXd&) { return t; }, margin};
}

CoefficientField CoefficientField::modulated_lame(int dim, double a, double depth, double margin) {
  require(std::abs(depth) < 1, ErrorKind::InvalidArgument, "modulation depth must be below 1");
  return {dim,
          [base = lame_tensor<double>(dim, a), depth](const Eigen::VectorXd& x) {
            return (1.0 + depth * std::sin(2.0 * kPi<double> * x(0))) * base;
          },
          margin};
}

namespace {

ModeSpectrum<double> checked_spectrum(const CoefficientField& field, const CoefficientTensor<double>& tensor,
                                      const MultiIndex& alpha) {
  ModeSpectrum<double> spec = make_spectrum(tensor, alpha);
  if (all_nonzero(alpha) && spec.lambda_min() < field.margin)
    throw EllipticityViolation(alpha, spec.lambda_min(),
                               "mode " + to_string(alpha) + " violates the ellipticity margin at a base position");
  return spec;
}

}  // namespace

ModeSpectrum<double> local_spectrum(const CoefficientField& field, const MultiIndex& alpha, const Eigen::VectorXd& x) {
  require(x.size() == field.dim, ErrorKind::LengthMismatch, "position has wrong dimension");
  return checked_spectrum(field, field.tensor_at(x), alpha);
}

Eigen::MatrixXd step_increment(const CoefficientField& field, const MultiIndex& alpha, const Eigen::VectorXd& x,
                               const Eigen::VectorXi& omega, double dt) {
  const ModeSpectrum<double> spec = local_spectrum(field, alpha, x);
  require(omega.size() == spec.dim(), ErrorKind::LengthMismatch, "step signs have wrong dimension");
  Eigen::VectorXd d(spec.dim());
  for (int j = 0; j < spec.dim(); ++j) d(j) = static_cast<double>(omega(j)) * step_phase(dt, spec.lambda(j));
  return spectral_function(spec.Q, d);
}

namespace {

/// Steps sharing one local eigensystem, summed in lattice units.
struct Run {
  ModeSpectrum<double> spec;
  Eigen::VectorXd phase;  // step_phase per eigendirection
  LatticePoint sums;

  Eigen::MatrixXd matrix() const {
    Eigen::VectorXd d(phase.size());
    for (Eigen::Index j = 0; j < phase.size(); ++j) d(j) = static_cast<double>(sums(j)) * phase(j);
    return spectral_function(spec.Q, d);
  }
};

}  // namespace

GeneralizedProcess evolve_generalized(const CoefficientField& field, const Timeline& timeline,
                                      const Eigen::VectorXd& start, const std::vector<MultiIndex>& modes,
                                      const PathSample& path) {
  const int n = field.dim;
  require(path.dim() == n && start.size() == n, ErrorKind::LengthMismatch, "path and start must match field dimension");
  for (const auto& alpha : modes) require(alpha.size() == n, ErrorKind::LengthMismatch, "mode has wrong dimension");
  GeneralizedProcess out;
  out.modes = modes;
  out.base = walk_position(path, timeline, start);
  out.accumulated.resize(modes.size());
  out.factors.resize(modes.size());
  const double dt = timeline.dt;
  std::vector<CoefficientTensor<double>> local;
  local.reserve(static_cast<std::size_t>(timeline.steps));
  for (long s = 0; s < timeline.steps; ++s) local.push_back(field.tensor_at(out.base.position(s)));

  for (std::size_t m = 0; m < modes.size(); ++m) {
    const MultiIndex& alpha = out.modes[m];
    Eigen::MatrixXd flushed = Eigen::MatrixXd::Zero(n, n);
    bool has_flushed = false;
    std::optional<Run> run;
    for (long s = 0; s < timeline.steps; ++s) {
      ModeSpectrum<double> spec = checked_spectrum(field, local[static_cast<std::size_t>(s)], alpha);
      Eigen::VectorXd phase(n);
      for (int j = 0; j < n; ++j) phase(j) = step_phase(dt, spec.lambda(j));
      const LatticePoint step = path.omega.row(s).cast<std::int64_t>().transpose();
      if (run && run->spec.Q == spec.Q && run->phase == phase) {
        run->sums += step;
        continue;
      }
      if (run) {
        flushed += run->matrix();
        has_flushed = true;
      }
      run = Run{std::move(spec), std::move(phase), step};
    }

    if (!run) {
      out.accumulated[m] = Eigen::MatrixXd::Zero(n, n);
      out.factors[m] = Eigen::MatrixXcd::Identity(n, n);
    } else if (!has_flushed) {
      out.accumulated[m] = run->matrix();
      out.factors[m] = mode_factor_from_sums(run->spec, dt, run->sums);
    } else {
      out.accumulated[m] = flushed + run->matrix();
      const auto eig = eigendecompose<double>(out.accumulated[m]);
      Eigen::VectorXcd e(n);
      for (int j = 0; j < n; ++j) e(j) = std::polar(1.0, eig.lambda(j));
      out.factors[m] = spectral_function(eig.Q, e);
    }
  }
  return out;
}

GeneralizedProcess evolve_generalized(const CoefficientField& field, const Timeline& timeline,
                                      const Eigen::VectorXd& start, int radius, const PathSample& path) {
  return evolve_generalized(field, timeline, start, ModeBox(field.dim, radius).all(), path);
}

GeneralizedProcess evolve_generalized(const CoefficientField& field, const Timeline& timeline,
                                      const Eigen::VectorXd& start, int radius, SignStream& stream) {
  return evolve_generalized(field, timeline, start, radius, sample_path(timeline, field.dim, stream));
}

}  // namespace gbm
