#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "gbm/mode_algebra.hpp"
#include "gbm/torus_fourier.hpp"
#include "gbm/types.hpp"

namespace gbm {

/// Interior lattice points of a Dirichlet domain for the diagonal lattice walk
/// (every step moves each coordinate by +-1). Physical position of lattice
/// point k is origin + spacing * k.
class LatticeDomain {
 public:
  /// Interior points lo < k < hi (strict, componentwise) on the unbounded lattice.
  static LatticeDomain box(LatticePoint lo, LatticePoint hi, double spacing,
                           Eigen::VectorXd origin = Eigen::VectorXd());

  /// Periodic mask on the torus grid: interior[p] marks grid cell p as inside;
  /// spacing 1/G, origin 0. Throws NoBoundary if some interior cell cannot reach
  /// the exterior.
  static LatticeDomain mask(const TorusGrid& grid, std::vector<bool> interior);

  int dim() const { return dim_; }
  double spacing() const { return spacing_; }
  /// dt of the walk with this spacing, spacing = sqrt(2 dt).
  double dt() const { return 0.5 * spacing_ * spacing_; }

  bool interior(const LatticePoint& k) const;
  Eigen::VectorXd position(const LatticePoint& k) const;

 private:
  struct Box {
    LatticePoint lo, hi;
  };
  struct Mask {
    TorusGrid grid;
    std::vector<bool> inside;
  };

  LatticeDomain() = default;
  void check_connectivity() const;

  int dim_ = 0;
  double spacing_ = 0;
  Eigen::VectorXd origin_;
  std::variant<Box, Mask> shape_;
};

struct ExitOptions {
  std::uint64_t samples = 10000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::uint64_t batch_size = 1024;
  std::uint64_t max_steps = 10'000'000;
};

struct ExitResult {
  double value = 0;
  double std_error = 0;
  double mean_exit_steps = 0;
  double exit_steps_std_error = 0;
  std::uint64_t samples = 0;
};

/// E^x g(W_tau): mean of g at the first lattice point outside the domain.
ExitResult solve_dirichlet_scalar(const LatticeDomain& domain, const std::function<double(const Eigen::VectorXd&)>& g,
                                  const LatticePoint& start, const ExitOptions& options);

struct SystemExitResult {
  Eigen::VectorXcd value;
  Eigen::VectorXd std_error;
  double max_imag = 0;
  double mean_exit_steps = 0;
  bool experimental = true;
};

/// Mode contraction sum_alpha F_alpha(tau) f_alpha exp(i 2 pi alpha x) evaluated
/// at the exit time tau of one shared base walk, with the +-omega pair sharing
/// tau. This reading of the system exit problem is an interpretation, so the
/// result is always flagged experimental.
SystemExitResult solve_dirichlet_system_experimental(const CoefficientTensor<double>& tensor,
                                                     const LatticeDomain& domain,
                                                     const SpectralField<double>& boundary,
                                                     const LatticePoint& start, const ExitOptions& options);

}  // namespace gbm
