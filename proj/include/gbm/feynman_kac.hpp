#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gbm/hyperfinite_walk.hpp"
#include "gbm/mode_algebra.hpp"
#include "gbm/torus_fourier.hpp"

namespace gbm {

/// du/dt = sum_{ij} A^{ij} d^2u/dx_i dx_j on T^n with u(0) = f, f given by
/// its truncated Fourier coefficients.
struct CauchyProblem {
  CoefficientTensor<double> tensor;
  SpectralField<double> initial;
  double t = 0;

  int radius() const { return initial.radius; }
  int dim() const { return tensor.dim(); }
  void validate() const;
};

struct MonteCarloOptions {
  std::uint64_t samples = 10000;  ///< paths per mode; pairs count double when antithetic
  std::uint64_t seed = 0;
  double dt = 1e-3;
  unsigned workers = 1;
  bool antithetic = true;
  std::uint64_t batch_size = 256;  ///< estimator units per RNG batch
  bool enumerate = false;          ///< replace sampling by all 2^{nM} paths (n*M <= 20)
};

struct RngProvenance {
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  std::uint64_t units = 0;  ///< i.i.d. estimator units (antithetic pairs or single paths)
  std::uint64_t batch_size = 0;
  std::uint64_t batches = 0;
  std::uint64_t streams = 0;  ///< sampled modes, one stream per {alpha, -alpha}
  bool antithetic = true;
  bool enumerated = false;
};

struct SolveReport {
  std::vector<Eigen::VectorXd> points;
  std::vector<Eigen::VectorXcd> mc_values;
  std::vector<Eigen::VectorXd> std_errors;  ///< sqrt(var Re + var Im) / sqrt(units)
  std::vector<Eigen::VectorXcd> oracle_values;
  std::vector<Eigen::VectorXcd> closed_form_values;
  Eigen::VectorXcd point_mean;            ///< MC average over the supplied points
  Eigen::VectorXd point_mean_std_error;
  double truncation_tail = 0;
  double discretization_bias = 0;  ///< max |closed form - oracle| over points
  double max_imag = 0;             ///< max |Im mc_values|
  double dt = 0;
  long steps = 0;
  RngProvenance rng;
  double oracle_seconds = 0;
  double mc_seconds = 0;
};

/// u(t,x) = sum_alpha exp(-A_alpha t) f_alpha exp(i 2 pi alpha x).
std::vector<Eigen::VectorXcd> solve_spectral_oracle(const CauchyProblem& problem,
                                                    const std::vector<Eigen::VectorXd>& points);

/// Same contraction with the exact finite-dt expectation of the mode factors.
std::vector<Eigen::VectorXcd> solve_closed_form(const CauchyProblem& problem, const Timeline& timeline,
                                                const std::vector<Eigen::VectorXd>& points);

/// Monte-Carlo average of sum_alpha exp(i B^{sqrt(2 A_alpha)}(t)) f_alpha exp(i 2 pi alpha x).
SolveReport solve_monte_carlo(const CauchyProblem& problem, const std::vector<Eigen::VectorXd>& points,
                              const MonteCarloOptions& options);

struct PathspaceResult {
  double value = 0;
  double std_error = 0;
  std::uint64_t paths = 0;
};

/// E^x f(B_t) for the scalar heat equation: mean of f at the endpoint of the
/// vector walk started at x. samples == 0 enumerates all paths.
PathspaceResult solve_scalar_pathspace(const std::function<double(const Eigen::VectorXd&)>& f,
                                       const Timeline& timeline, const Eigen::VectorXd& x, std::uint64_t samples,
                                       std::uint64_t seed);

struct MeanDiagnostic {
  Eigen::VectorXcd f_mean;
  Eigen::VectorXcd oracle_mean;
  Eigen::VectorXcd mc_mean;
  Eigen::VectorXd mc_std_error;
  double oracle_error = 0;  ///< max |oracle_mean - f_mean|
  double mc_error = 0;      ///< max |mc_mean - f_mean|
  bool mc_within_3sigma = false;
};

/// Spatial means of the oracle and MC solutions over a (2K+1)^n grid against f_0.
MeanDiagnostic mean_preservation_check(const CauchyProblem& problem, const MonteCarloOptions& options);

/// Evaluation points on a uniform lattice of `per_axis` points per axis, offset by half a cell.
std::vector<Eigen::VectorXd> lattice_points(int dim, int per_axis);

}  // namespace gbm

namespace gbm {

/// f = (cos(2 pi x_1), 0, ..., 0) on T^n, stored with truncation radius K >= 1.
SpectralField<double> cosine_field(int dim, int radius);

/// Random real vector field band-limited to |alpha_i| <= data_radius, stored
/// with truncation radius `radius` >= data_radius. Coefficients are uniform in
/// [-1,1] + i[-1,1] scaled by 1/(1 + |alpha|^2), with f_{-alpha} = conj(f_alpha).
SpectralField<double> random_real_field(int dim, int data_radius, int radius, std::uint64_t seed);

}  // namespace gbm
