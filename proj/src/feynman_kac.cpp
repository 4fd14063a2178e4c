#include "gbm/feynman_kac.hpp"

#include <chrono>
#include <cmath>

#include "gbm/parallel.hpp"
#include "gbm/rng.hpp"

namespace gbm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Running mean and sum of squared deviations for complex (points x n) samples.
struct Accumulator {
  std::uint64_t count = 0;
  Eigen::MatrixXcd mean;
  Eigen::MatrixXd m2;
  Eigen::VectorXcd agg_mean;  // average over points
  Eigen::VectorXd agg_m2;

  Accumulator(Eigen::Index points, Eigen::Index comps)
      : mean(Eigen::MatrixXcd::Zero(points, comps)),
        m2(Eigen::MatrixXd::Zero(points, comps)),
        agg_mean(Eigen::VectorXcd::Zero(comps)),
        agg_m2(Eigen::VectorXd::Zero(comps)) {}

  void push(const Eigen::MatrixXcd& value) {
    ++count;
    const double k = static_cast<double>(count);
    const Eigen::MatrixXcd delta = value - mean;
    mean += delta / k;
    m2.array() += (delta.conjugate().array() * (value - mean).array()).real();
    const Eigen::VectorXcd agg = value.colwise().mean().transpose();
    const Eigen::VectorXcd agg_delta = agg - agg_mean;
    agg_mean += agg_delta / k;
    agg_m2.array() += (agg_delta.conjugate().array() * (agg - agg_mean).array()).real();
  }

  void merge(const Accumulator& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const double n = na + nb;
    const Eigen::MatrixXcd delta = other.mean - mean;
    mean += delta * (nb / n);
    m2 += other.m2 + delta.cwiseAbs2() * (na * nb / n);
    const Eigen::VectorXcd agg_delta = other.agg_mean - agg_mean;
    agg_mean += agg_delta * (nb / n);
    agg_m2 += other.agg_m2 + agg_delta.cwiseAbs2() * (na * nb / n);
    count += other.count;
  }
};

struct ModeTable {
  ModeBox box;
  std::vector<ModeSpectrum<double>> spectra;
  std::vector<std::size_t> canonical;  // mode -> representative of {alpha, -alpha}
  std::vector<std::size_t> active;     // sampled representatives, ascending
  std::vector<int> slot;               // representative -> position in active, -1 if none
  std::size_t zero_mode = 0;
};

ModeTable make_mode_table(const CauchyProblem& problem) {
  const ModeBox box = problem.initial.box();
  ModeTable table{box, mode_spectra(problem.tensor, problem.radius()), {}, {}, {}, box.index_of(MultiIndex::Zero(problem.dim()))};
  table.canonical.resize(box.size());
  table.slot.assign(box.size(), -1);
  for (std::size_t m = 0; m < box.size(); ++m) table.canonical[m] = std::max(m, box.mirror(m));
  for (std::size_t m = 0; m < box.size(); ++m) {
    if (table.canonical[m] != m || m == table.zero_mode) continue;
    const bool live = !problem.initial.coeffs[m].isZero(0) || !problem.initial.coeffs[box.mirror(m)].isZero(0);
    if (live) {
      table.slot[m] = static_cast<int>(table.active.size());
      table.active.push_back(m);
    }
  }
  return table;
}

/// weights[m][p] = f_alpha exp(i 2 pi alpha x_p)
std::vector<std::vector<Eigen::VectorXcd>> plane_wave_weights(const CauchyProblem& problem,
                                                              const std::vector<Eigen::VectorXd>& points) {
  const ModeBox box = problem.initial.box();
  std::vector<std::vector<Eigen::VectorXcd>> w(box.size());
  for (std::size_t m = 0; m < box.size(); ++m) {
    const Eigen::VectorXd alpha = box[m].cast<double>();
    w[m].reserve(points.size());
    for (const auto& x : points)
      w[m].push_back(std::polar(1.0, 2.0 * kPi<double> * alpha.dot(x)) * problem.initial.coeffs[m]);
  }
  return w;
}

/// sum over modes in lexicographic order of factor(mode) * weights[mode][p].
template <typename FactorOf>
Eigen::MatrixXcd contract(const ModeTable& table, const std::vector<std::vector<Eigen::VectorXcd>>& weights,
                          std::size_t point_count, int comps, FactorOf&& factor_of) {
  Eigen::MatrixXcd value = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(point_count), comps);
  for (std::size_t m = 0; m < table.box.size(); ++m) {
    if (m != table.zero_mode && table.slot[table.canonical[m]] < 0) continue;
    const Eigen::MatrixXcd* factor = factor_of(m);
    for (std::size_t p = 0; p < point_count; ++p) {
      if (factor)
        value.row(static_cast<Eigen::Index>(p)) += (*factor * weights[m][p]).transpose();
      else
        value.row(static_cast<Eigen::Index>(p)) += weights[m][p].transpose();
    }
  }
  return value;
}

void check_points(const CauchyProblem& problem, const std::vector<Eigen::VectorXd>& points) {
  for (const auto& x : points)
    require(x.size() == problem.dim(), ErrorKind::LengthMismatch, "evaluation point has wrong dimension");
}

}  // namespace

void CauchyProblem::validate() const {
  require(tensor.dim() >= 1, ErrorKind::InvalidArgument, "problem needs a tensor");
  require(tensor.all_finite(), ErrorKind::NonFinite, "tensor has non-finite entries");
  require(initial.dim == tensor.dim() && initial.components == tensor.dim(), ErrorKind::LengthMismatch,
          "initial data dimension must match tensor dimension");
  require(t >= 0 && std::isfinite(t), ErrorKind::NegativeTime, "horizon must be finite and nonnegative");
  if (initial.radius >= 1) check_ellipticity(tensor, initial.radius);
}

std::vector<Eigen::VectorXcd> solve_spectral_oracle(const CauchyProblem& problem,
                                                    const std::vector<Eigen::VectorXd>& points) {
  problem.validate();
  check_points(problem, points);
  const ModeBox box = problem.initial.box();
  const auto weights = plane_wave_weights(problem, points);
  std::vector<Eigen::VectorXcd> out(points.size(), Eigen::VectorXcd::Zero(problem.dim()));
  for (std::size_t m = 0; m < box.size(); ++m) {
    const Eigen::MatrixXcd prop = propagator(make_spectrum(problem.tensor, box[m]), problem.t).cast<std::complex<double>>();
    for (std::size_t p = 0; p < points.size(); ++p) out[p] += prop * weights[m][p];
  }
  return out;
}

std::vector<Eigen::VectorXcd> solve_closed_form(const CauchyProblem& problem, const Timeline& timeline,
                                                const std::vector<Eigen::VectorXd>& points) {
  problem.validate();
  check_points(problem, points);
  const ModeBox box = problem.initial.box();
  const auto weights = plane_wave_weights(problem, points);
  std::vector<Eigen::VectorXcd> out(points.size(), Eigen::VectorXcd::Zero(problem.dim()));
  for (std::size_t m = 0; m < box.size(); ++m) {
    const Eigen::MatrixXcd factor =
        mode_factor_closed_form(make_spectrum(problem.tensor, box[m]), timeline).cast<std::complex<double>>();
    for (std::size_t p = 0; p < points.size(); ++p) out[p] += factor * weights[m][p];
  }
  return out;
}

SolveReport solve_monte_carlo(const CauchyProblem& problem, const std::vector<Eigen::VectorXd>& points,
                              const MonteCarloOptions& options) {
  problem.validate();
  check_points(problem, points);
  require(!points.empty(), ErrorKind::InvalidArgument, "need at least one evaluation point");
  require(options.samples >= 2, ErrorKind::InvalidArgument, "need at least two samples");
  require(!options.antithetic || options.samples % 2 == 0, ErrorKind::InvalidArgument,
          "antithetic pairing needs an even sample count");
  require(options.batch_size >= 1, ErrorKind::InvalidArgument, "batch size must be positive");

  const Timeline timeline = Timeline::from_horizon(problem.t, options.dt);
  const int n = problem.dim();
  const Eigen::Index point_count = static_cast<Eigen::Index>(points.size());

  SolveReport report;
  report.points = points;
  report.dt = timeline.dt;
  report.steps = timeline.steps;
  report.truncation_tail = problem.initial.tail_mass;

  const auto oracle_start = Clock::now();
  report.oracle_values = solve_spectral_oracle(problem, points);
  report.closed_form_values = solve_closed_form(problem, timeline, points);
  for (std::size_t p = 0; p < points.size(); ++p)
    report.discretization_bias =
        std::max(report.discretization_bias, max_abs(report.closed_form_values[p] - report.oracle_values[p]));
  report.oracle_seconds = seconds_since(oracle_start);

  const auto mc_start = Clock::now();
  const ModeTable table = make_mode_table(problem);
  const auto weights = plane_wave_weights(problem, points);

  RngProvenance& rng = report.rng;
  rng.seed = options.seed;
  rng.samples = options.samples;
  rng.antithetic = options.antithetic;
  rng.enumerated = options.enumerate;
  rng.streams = table.active.size();

  Accumulator total(point_count, n);

  if (options.enumerate) {
    require_enumerable(timeline.steps, n, 20);
    std::vector<Eigen::MatrixXcd> mean_factor(table.active.size());
    parallel_for(table.active.size(), options.workers, [&](std::size_t i) {
      mean_factor[i] = mode_factor_enumerated(table.spectra[table.active[i]], timeline, 20);
    });
    const Eigen::MatrixXcd value = contract(table, weights, points.size(), n, [&](std::size_t m) -> const Eigen::MatrixXcd* {
      if (m == table.zero_mode) return nullptr;
      return &mean_factor[static_cast<std::size_t>(table.slot[table.canonical[m]])];
    });
    total.push(value);
    rng.units = 1;
    rng.batches = 0;
  } else {
    const std::uint64_t units = options.antithetic ? options.samples / 2 : options.samples;
    const std::uint64_t batch = options.batch_size;
    const std::uint64_t batches = (units + batch - 1) / batch;
    rng.units = units;
    rng.batch_size = batch;
    rng.batches = batches;

    std::vector<Accumulator> partial(batches, Accumulator(point_count, n));
    parallel_for(static_cast<std::size_t>(batches), options.workers, [&](std::size_t b) {
      const std::uint64_t first = b * batch;
      const std::uint64_t count = std::min(batch, units - first);
      // factors[unit][slot]
      std::vector<std::vector<Eigen::MatrixXcd>> factors(count, std::vector<Eigen::MatrixXcd>(table.active.size()));
      for (std::size_t slot = 0; slot < table.active.size(); ++slot) {
        const std::size_t mode = table.active[slot];
        const auto& spec = table.spectra[mode];
        SignStream stream({options.seed, mode, b});
        for (std::uint64_t u = 0; u < count; ++u) {
          const PathSample path = sample_path(timeline, n, stream);
          if (options.antithetic)
            factors[u][slot] = 0.5 * (mode_factor_sample(spec, timeline, path) + mode_factor_sample(spec, timeline, -path));
          else
            factors[u][slot] = mode_factor_sample(spec, timeline, path);
        }
      }
      Accumulator& acc = partial[b];
      for (std::uint64_t u = 0; u < count; ++u) {
        acc.push(contract(table, weights, points.size(), n, [&](std::size_t m) -> const Eigen::MatrixXcd* {
          if (m == table.zero_mode) return nullptr;
          return &factors[u][static_cast<std::size_t>(table.slot[table.canonical[m]])];
        }));
      }
    });
    for (const auto& part : partial) total.merge(part);
  }

  const double units = static_cast<double>(total.count);
  report.mc_values.resize(points.size());
  report.std_errors.resize(points.size());
  for (Eigen::Index p = 0; p < point_count; ++p) {
    report.mc_values[static_cast<std::size_t>(p)] = total.mean.row(p).transpose();
    report.std_errors[static_cast<std::size_t>(p)] =
        units > 1 ? Eigen::VectorXd((total.m2.row(p).transpose() / (units - 1)).cwiseSqrt() / std::sqrt(units))
                  : Eigen::VectorXd::Zero(n);
    report.max_imag = std::max(report.max_imag, max_abs(total.mean.row(p).imag()));
  }
  report.point_mean = total.agg_mean;
  report.point_mean_std_error = units > 1 ? Eigen::VectorXd((total.agg_m2 / (units - 1)).cwiseSqrt() / std::sqrt(units))
                                          : Eigen::VectorXd::Zero(n);
  report.mc_seconds = seconds_since(mc_start);
  return report;
}

PathspaceResult solve_scalar_pathspace(const std::function<double(const Eigen::VectorXd&)>& f,
                                       const Timeline& timeline, const Eigen::VectorXd& x, std::uint64_t samples,
                                       std::uint64_t seed) {
  const int n = static_cast<int>(x.size());
  require(n >= 1, ErrorKind::InvalidArgument, "start point must have positive dimension");
  const double h = timeline.spacing();
  double sum = 0;  // plain sum: exact for dyadic values under enumeration
  double mean = 0;
  double m2 = 0;
  std::uint64_t count = 0;
  auto push = [&](const PathSample& path) {
    const double v = f(x + h * lattice_sums(path).cast<double>());
    ++count;
    sum += v;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  };
  if (samples == 0) {
    enumerate_paths(timeline.steps, n, push);
    return {sum / static_cast<double>(count), 0.0, count};
  }
  SignStream stream({seed, 0, 0});
  for (std::uint64_t i = 0; i < samples; ++i) push(sample_path(timeline, n, stream));
  const double se = count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count)) : 0.0;
  return {sum / static_cast<double>(count), se, count};
}

std::vector<Eigen::VectorXd> lattice_points(int dim, int per_axis) {
  const TorusGrid grid(dim, per_axis);
  std::vector<Eigen::VectorXd> out(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p)
    out[p] = (grid.cell(p).cast<double>().array() + 0.5).matrix() / static_cast<double>(per_axis);
  return out;
}

MeanDiagnostic mean_preservation_check(const CauchyProblem& problem, const MonteCarloOptions& options) {
  const TorusGrid grid(problem.dim(), 2 * problem.radius() + 1);
  std::vector<Eigen::VectorXd> points(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) points[p] = grid.point(p);

  MeanDiagnostic diag;
  diag.f_mean = problem.initial[MultiIndex::Zero(problem.dim())];
  const auto oracle = solve_spectral_oracle(problem, points);
  diag.oracle_mean = Eigen::VectorXcd::Zero(problem.dim());
  for (const auto& v : oracle) diag.oracle_mean += v;
  diag.oracle_mean /= static_cast<double>(points.size());
  diag.oracle_error = max_abs(diag.oracle_mean - diag.f_mean);

  const SolveReport mc = solve_monte_carlo(problem, points, options);
  diag.mc_mean = mc.point_mean;
  diag.mc_std_error = mc.point_mean_std_error;
  diag.mc_error = max_abs(diag.mc_mean - diag.f_mean);
  diag.mc_within_3sigma = true;
  for (int i = 0; i < problem.dim(); ++i)
    diag.mc_within_3sigma = diag.mc_within_3sigma &&
                            std::abs(diag.mc_mean(i) - diag.f_mean(i)) <= 3 * diag.mc_std_error(i) + 1e-12;
  return diag;
}

}  // namespace gbm

namespace gbm {

SpectralField<double> cosine_field(int dim, int radius) {
  require(radius >= 1, ErrorKind::InvalidArgument, "cosine data needs K >= 1");
  SpectralField<double> f(dim, dim, radius);
  MultiIndex e1 = MultiIndex::Zero(dim);
  e1(0) = 1;
  f[e1](0) = 0.5;
  f[MultiIndex(-e1)](0) = 0.5;
  return f;
}

SpectralField<double> random_real_field(int dim, int data_radius, int radius, std::uint64_t seed) {
  require(data_radius >= 0 && data_radius <= radius, ErrorKind::InvalidArgument,
          "data radius must lie in [0, K]");
  SpectralField<double> f(dim, dim, radius);
  const ModeBox data(dim, data_radius);
  SignStream stream({seed, ~std::uint64_t(0), 0});
  auto uniform = [&] { return 2.0 * static_cast<double>(stream.engine()() >> 11) * 0x1.0p-53 - 1.0; };
  for (std::size_t m = 0; m < data.size(); ++m) {
    const MultiIndex alpha = data[m];
    const std::size_t mirror = data.mirror(m);
    if (mirror > m) continue;  // fill each {alpha, -alpha} once, from the larger index
    const double scale = 1.0 / (1.0 + alpha.squaredNorm());
    Eigen::VectorXcd c(dim);
    for (int i = 0; i < dim; ++i) {
      const double re = uniform();
      const double im = uniform();
      c(i) = {scale * re, mirror == m ? 0.0 : scale * im};
    }
    f[alpha] = c;
    f[MultiIndex(-alpha)] = c.conjugate();
  }
  return f;
}

}  // namespace gbm
