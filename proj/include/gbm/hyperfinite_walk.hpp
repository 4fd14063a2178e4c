#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "gbm/errors.hpp"
#include "gbm/mode_algebra.hpp"
#include "gbm/rng.hpp"
#include "gbm/types.hpp"

namespace gbm {

/// Uniform timeline {0, dt, ..., M dt}.
struct Timeline {
  double dt = 0;
  long steps = 0;

  Timeline() = default;
  Timeline(double dt_, long steps_) : dt(dt_), steps(steps_) {
    require(dt_ > 0 && std::isfinite(dt_), ErrorKind::InvalidArgument, "timeline needs dt > 0");
    require(steps_ >= 0, ErrorKind::InvalidArgument, "timeline needs M >= 0");
  }

  double horizon() const { return dt * static_cast<double>(steps); }

  /// M = t / dt, which must be an integer to within 1e-9 relative.
  static Timeline from_horizon(double t, double dt) {
    require(t >= 0, ErrorKind::NegativeTime, "horizon must be nonnegative");
    require(dt > 0, ErrorKind::InvalidArgument, "dt must be positive");
    const double ratio = t / dt;
    const long steps = std::lround(ratio);
    if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio))
      throw Error(ErrorKind::InvalidArgument,
                  "horizon " + std::to_string(t) + " is not a multiple of dt " + std::to_string(dt));
    return Timeline(dt, steps);
  }

  /// Lattice spacing sqrt(2 dt) of the walk.
  double spacing() const { return std::sqrt(2.0 * dt); }
};

struct PathSample {
  SignMatrix omega;  ///< M x n, entries +-1

  long steps() const { return static_cast<long>(omega.rows()); }
  int dim() const { return static_cast<int>(omega.cols()); }
  PathSample operator-() const { return {SignMatrix(-omega)}; }
};

inline PathSample sample_path(const Timeline& timeline, int dim, SignStream& stream) {
  PathSample path{SignMatrix(timeline.steps, dim)};
  for (long s = 0; s < timeline.steps; ++s)
    for (int j = 0; j < dim; ++j) path.omega(s, j) = static_cast<std::int8_t>(stream.next());
  return path;
}

/// Path number `index` in the enumeration of {-1,+1}^{M x n}: bit (s*n + j)
/// set means omega_j(s) = +1.
inline PathSample path_from_bits(std::uint64_t index, long steps, int dim) {
  PathSample path{SignMatrix(steps, dim)};
  for (long s = 0; s < steps; ++s)
    for (int j = 0; j < dim; ++j)
      path.omega(s, j) = static_cast<std::int8_t>(((index >> (s * dim + j)) & 1u) ? 1 : -1);
  return path;
}

inline void require_enumerable(long steps, int dim, int limit) {
  if (static_cast<long>(dim) * steps > limit)
    throw Error(ErrorKind::EnumerationTooLarge,
                "n*M = " + std::to_string(dim * steps) + " exceeds " + std::to_string(limit));
}

/// Calls visit(path) for each of the 2^{nM} paths.
template <typename Visit>
void enumerate_paths(long steps, int dim, Visit&& visit, int limit = 24) {
  require_enumerable(steps, dim, limit);
  const std::uint64_t count = std::uint64_t(1) << (steps * dim);
  for (std::uint64_t i = 0; i < count; ++i) visit(path_from_bits(i, steps, dim));
}

/// Walk B^x on the lattice x + sqrt(2 dt) Z^n, tracked in integer coordinates.
struct WalkTrajectory {
  Eigen::VectorXd start;
  double spacing = 0;
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> offsets;  ///< (M+1) x n

  long steps() const { return static_cast<long>(offsets.rows()) - 1; }

  Eigen::VectorXd position(long step) const {
    return start + spacing * offsets.row(step).transpose().cast<double>();
  }

  LatticePoint endpoint() const { return offsets.row(offsets.rows() - 1).transpose(); }

  /// Per-component sum of squared increments in lattice units; equals M for
  /// every path, i.e. [B]_t = M * 2dt = 2t.
  LatticePoint quadratic_variation_units() const {
    LatticePoint qv = LatticePoint::Zero(offsets.cols());
    for (Eigen::Index s = 1; s < offsets.rows(); ++s) {
      const LatticePoint d = (offsets.row(s) - offsets.row(s - 1)).transpose();
      qv += d.cwiseProduct(d);
    }
    return qv;
  }
};

inline WalkTrajectory walk_position(const PathSample& path, const Timeline& timeline, const Eigen::VectorXd& start) {
  require(path.steps() == timeline.steps, ErrorKind::LengthMismatch, "path length differs from timeline");
  require(start.size() == path.dim(), ErrorKind::LengthMismatch, "start point has wrong dimension");
  WalkTrajectory walk{start, timeline.spacing(), {}};
  walk.offsets.setZero(timeline.steps + 1, path.dim());
  for (long s = 0; s < timeline.steps; ++s)
    walk.offsets.row(s + 1) = walk.offsets.row(s) + path.omega.row(s).cast<std::int64_t>();
  return walk;
}

/// Integer sums k_j = sum_s omega_j(s).
inline LatticePoint lattice_sums(const PathSample& path) {
  return path.omega.cast<std::int64_t>().colwise().sum().transpose();
}

/// Phase gained per unit lattice step along an eigendirection with eigenvalue
/// lambda: sqrt(2 dt lambda).
template <typename Scalar>
Scalar step_phase(Scalar dt, Scalar lambda) {
  return std::sqrt(Scalar(2) * dt) * clamped_sqrt(lambda);
}

/// Q diag(exp(i k_j c_j)) Q^T with c_j = step_phase(dt, lambda_j).
template <typename Scalar>
ComplexMatrix<Scalar> mode_factor_from_sums(const ModeSpectrum<Scalar>& spec, Scalar dt, const LatticePoint& sums) {
  require(sums.size() == spec.dim(), ErrorKind::LengthMismatch, "path dimension differs from mode dimension");
  ComplexVector<Scalar> phases(spec.dim());
  for (int j = 0; j < spec.dim(); ++j)
    phases(j) = std::polar(Scalar(1), Scalar(sums(j)) * step_phase(dt, spec.lambda(j)));
  return spectral_function(spec.Q, phases);
}

/// One sample of exp(i B^{sqrt(2A)}(t, omega)).
template <typename Scalar>
ComplexMatrix<Scalar> mode_factor_sample(const ModeSpectrum<Scalar>& spec, const Timeline& timeline,
                                         const PathSample& path) {
  require(path.steps() == timeline.steps, ErrorKind::LengthMismatch, "path length differs from timeline");
  return mode_factor_from_sums(spec, Scalar(timeline.dt), lattice_sums(path));
}

/// Exact expectation of mode_factor_sample: Q diag(cos(sqrt(2 lambda_j dt))^M) Q^T.
template <typename Scalar>
Matrix<Scalar> mode_factor_closed_form(const ModeSpectrum<Scalar>& spec, const Timeline& timeline) {
  Vector<Scalar> damp(spec.dim());
  for (int j = 0; j < spec.dim(); ++j)
    damp(j) = std::pow(std::cos(step_phase(Scalar(timeline.dt), spec.lambda(j))), Scalar(timeline.steps));
  return spectral_function(spec.Q, damp);
}

/// Mean of mode_factor_sample over all 2^{nM} paths.
template <typename Scalar>
ComplexMatrix<Scalar> mode_factor_enumerated(const ModeSpectrum<Scalar>& spec, const Timeline& timeline,
                                             int limit = 24) {
  const int n = spec.dim();
  // Neumaier summation on real and imaginary parts; 2^{nM} unit-size terms
  Matrix<Scalar> sum_re = Matrix<Scalar>::Zero(n, n), sum_im = sum_re, comp_re = sum_re, comp_im = sum_re;
  auto add = [](Scalar& sum, Scalar& comp, Scalar v) {
    const Scalar t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  };
  std::uint64_t count = 0;
  enumerate_paths(timeline.steps, n, [&](const PathSample& path) {
    const ComplexMatrix<Scalar> f = mode_factor_sample(spec, timeline, path);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        add(sum_re(i, j), comp_re(i, j), f(i, j).real());
        add(sum_im(i, j), comp_im(i, j), f(i, j).imag());
      }
    ++count;
  }, limit);
  ComplexMatrix<Scalar> acc(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) acc(i, j) = {sum_re(i, j) + comp_re(i, j), sum_im(i, j) + comp_im(i, j)};
  return acc / Scalar(count);
}

/// Transition probabilities p(t_M, x, x + spacing * k) keyed by lattice offset k.
struct DensityTable {
  double spacing = 0;
  std::uint64_t paths = 0;
  std::map<std::vector<std::int64_t>, double> probability;

  double total() const {
    double s = 0;
    for (const auto& [k, p] : probability) s += p;
    return s;
  }
  double at(const std::vector<std::int64_t>& k) const {
    const auto it = probability.find(k);
    return it == probability.end() ? 0.0 : it->second;
  }
};

namespace detail {
inline std::vector<std::int64_t> endpoint_key(const PathSample& path) {
  const LatticePoint k = lattice_sums(path);
  return {k.data(), k.data() + k.size()};
}
}  // namespace detail

/// Full enumeration of the endpoint law; requires n*M <= 24.
inline DensityTable empirical_density(const Timeline& timeline, int dim) {
  require_enumerable(timeline.steps, dim, 24);
  std::map<std::vector<std::int64_t>, std::uint64_t> counts;
  std::uint64_t total = 0;
  enumerate_paths(timeline.steps, dim, [&](const PathSample& path) {
    ++counts[detail::endpoint_key(path)];
    ++total;
  });
  DensityTable table{timeline.spacing(), total, {}};
  for (const auto& [k, c] : counts) table.probability[k] = static_cast<double>(c) / static_cast<double>(total);
  return table;
}

/// Sampled endpoint law from `samples` independent paths.
inline DensityTable empirical_density(const Timeline& timeline, int dim, std::uint64_t samples, SignStream& stream) {
  require(samples > 0, ErrorKind::InvalidArgument, "need at least one sample");
  std::map<std::vector<std::int64_t>, std::uint64_t> counts;
  for (std::uint64_t i = 0; i < samples; ++i) ++counts[detail::endpoint_key(sample_path(timeline, dim, stream))];
  DensityTable table{timeline.spacing(), samples, {}};
  for (const auto& [k, c] : counts) table.probability[k] = static_cast<double>(c) / static_cast<double>(samples);
  return table;
}

struct CltRow {
  long m = 0;
  double x = 0;
  double scaled_binomial = 0;  ///< sqrt(npq) B_n(m)
  double gaussian = 0;         ///< exp(-x^2/2) / sqrt(2 pi)
};

/// Local central limit table for Binomial(n, p) over m with x in [-2, 2].
inline std::vector<CltRow> clt_check(long trials, double p) {
  require(trials >= 1, ErrorKind::InvalidArgument, "clt check needs n >= 1");
  require(p > 0 && p < 1, ErrorKind::InvalidArgument, "clt check needs p in (0,1)");
  const double q = 1 - p;
  const double n = static_cast<double>(trials);
  const double sd = std::sqrt(n * p * q);
  const long lo = std::max(0L, static_cast<long>(std::ceil(n * p - 2 * sd)));
  const long hi = std::min(trials, static_cast<long>(std::floor(n * p + 2 * sd)));
  std::vector<CltRow> rows;
  for (long m = lo; m <= hi; ++m) {
    const double x = (static_cast<double>(m) - n * p) / sd;
    if (x < -2 || x > 2) continue;
    const double md = static_cast<double>(m);
    const double log_mass = std::lgamma(n + 1) - std::lgamma(md + 1) - std::lgamma(n - md + 1) + md * std::log(p) +
                            (n - md) * std::log(q);
    rows.push_back({m, x, sd * std::exp(log_mass), std::exp(-0.5 * x * x) / std::sqrt(2 * kPi<double>)});
  }
  return rows;
}

}  // namespace gbm
