#include "gbm/validators.hpp"

#include <cmath>

#include "gbm/rng.hpp"
#include "gbm/stochastic_calculus.hpp"

namespace gbm {

namespace {

InternalProcess<double> walk_process(const Timeline& timeline, SignStream& stream) {
  const WalkTrajectory walk = walk_position(sample_path(timeline, 1, stream), timeline, Eigen::VectorXd::Zero(1));
  InternalProcess<double> p{Eigen::MatrixXd(walk.offsets.rows(), 1)};
  for (Eigen::Index s = 0; s < walk.offsets.rows(); ++s) p.values(s, 0) = walk.position(s)(0);
  return p;
}

double max_cos_residual(const Timeline& timeline, int paths, SignStream& stream) {
  double worst = 0;
  for (int i = 0; i < paths; ++i) {
    const auto p = walk_process(timeline, stream);
    worst = std::max(worst, ito_residual([](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); },
                                         [](double x) { return -std::cos(x); }, p));
  }
  return worst;
}

}  // namespace

ItoValidation ito_validation(double t, double dt, int paths, std::uint64_t seed) {
  require(paths >= 1, ErrorKind::InvalidArgument, "need at least one path");
  const Timeline coarse = Timeline::from_horizon(t, dt);
  const Timeline fine = Timeline::from_horizon(t, dt / 2);
  ItoValidation out;
  SignStream poly({seed, 0, 0});
  for (int i = 0; i < paths; ++i) {
    const auto p = walk_process(coarse, poly);
    out.linear_max = std::max(out.linear_max, ito_residual([](double x) { return x; }, [](double) { return 1.0; },
                                                           [](double) { return 0.0; }, p));
    out.quadratic_max = std::max(out.quadratic_max, ito_residual([](double x) { return x * x; },
                                                                 [](double x) { return 2 * x; },
                                                                 [](double) { return 2.0; }, p));
  }
  SignStream a({seed, 1, 0});
  SignStream b({seed, 2, 0});
  out.cos_max = max_cos_residual(coarse, paths, a);
  out.cos_max_half = max_cos_residual(fine, paths, b);
  out.ratio = out.cos_max_half > 0 ? out.cos_max / out.cos_max_half : 0.0;
  return out;
}

double binomial_site_probability(long steps, long offset) {
  if (std::abs(offset) > steps || (steps + offset) % 2 != 0) return 0.0;
  const long up = (steps + offset) / 2;
  // exact for steps <= 24: C(M, up) < 2^53
  double c = 1;
  for (long i = 1; i <= up; ++i) c = c * static_cast<double>(steps - up + i) / static_cast<double>(i);
  return std::round(c) * std::ldexp(1.0, static_cast<int>(-steps));
}

DensityValidation density_validation(long steps, int dim, std::uint64_t samples, std::uint64_t seed) {
  require(steps >= 1, ErrorKind::InvalidArgument, "density validation needs M >= 1");
  const Timeline timeline(1.0, steps);
  DensityValidation out;
  out.enumerated = empirical_density(timeline, dim);
  out.total_error = std::abs(out.enumerated.total() - 1.0);
  for (const auto& [k, p] : out.enumerated.probability) {
    double expect = 1;
    for (auto kj : k) expect *= binomial_site_probability(steps, static_cast<long>(kj));
    out.binomial_max_error = std::max(out.binomial_max_error, std::abs(p - expect));
  }

  const DensityTable previous = empirical_density(Timeline(1.0, steps - 1), dim);
  const double weight = std::ldexp(1.0, -dim);
  for (const auto& [k, p] : out.enumerated.probability) {
    double s = 0;
    for (int dir = 0; dir < (1 << dim); ++dir) {
      std::vector<std::int64_t> from = k;
      for (int j = 0; j < dim; ++j) from[static_cast<std::size_t>(j)] -= ((dir >> j) & 1) ? 1 : -1;
      s += previous.at(from);
    }
    out.heat_recursion_error = std::max(out.heat_recursion_error, std::abs(weight * s - p));
  }

  if (samples > 0) {
    SignStream stream({seed, 0, 0});
    out.sampled = empirical_density(timeline, dim, samples, stream);
    for (const auto& [k, p] : out.enumerated.probability) {
      const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(samples));
      if (sigma > 0) out.sampled_max_z = std::max(out.sampled_max_z, std::abs(out.sampled.at(k) - p) / sigma);
    }
  }
  return out;
}

}  // namespace gbm
