#pragma once

#include <cstdint>
#include <vector>

#include "gbm/hyperfinite_walk.hpp"

namespace gbm {

struct ItoValidation {
  double linear_max = 0;     ///< max residual for f(x) = x
  double quadratic_max = 0;  ///< max residual for f(x) = x^2
  double cos_max = 0;        ///< max residual for cos at dt
  double cos_max_half = 0;   ///< max residual for cos at dt/2
  double ratio = 0;          ///< cos_max / cos_max_half
};

/// Ito residuals on `paths` Anderson-walk paths of horizon t.
ItoValidation ito_validation(double t, double dt, int paths, std::uint64_t seed);

struct DensityValidation {
  DensityTable enumerated;
  DensityTable sampled;
  double binomial_max_error = 0;  ///< max |p - prod_j binom(M, (M+k_j)/2) / 2^M|
  double total_error = 0;         ///< |sum p - 1|
  double heat_recursion_error = 0;
  double sampled_max_z = 0;       ///< max |p_sampled - p| / sigma over sites with p > 0
};

/// Enumerated endpoint law at M steps against the binomial product, the
/// discrete heat recursion from M-1 steps, and a sampled estimate.
DensityValidation density_validation(long steps, int dim, std::uint64_t samples, std::uint64_t seed);

/// C(M, (M+k)/2) / 2^M, zero when M + k is odd or |k| > M.
double binomial_site_probability(long steps, long offset);

}  // namespace gbm
