#include "gbm/exit_time.hpp"

#include <cmath>
#include <deque>

#include "gbm/hyperfinite_walk.hpp"
#include "gbm/parallel.hpp"
#include "gbm/rng.hpp"

namespace gbm {

LatticeDomain LatticeDomain::box(LatticePoint lo, LatticePoint hi, double spacing, Eigen::VectorXd origin) {
  require(lo.size() == hi.size() && lo.size() >= 1, ErrorKind::InvalidArgument, "box corners must share a dimension");
  require(spacing > 0, ErrorKind::InvalidArgument, "lattice spacing must be positive");
  require((hi.array() > lo.array()).all(), ErrorKind::InvalidArgument, "box needs hi > lo");
  LatticeDomain d;
  d.dim_ = static_cast<int>(lo.size());
  d.spacing_ = spacing;
  d.origin_ = origin.size() ? std::move(origin) : Eigen::VectorXd::Zero(d.dim_);
  require(d.origin_.size() == d.dim_, ErrorKind::InvalidArgument, "origin has wrong dimension");
  d.shape_ = Box{std::move(lo), std::move(hi)};
  return d;
}

LatticeDomain LatticeDomain::mask(const TorusGrid& grid, std::vector<bool> interior) {
  require(interior.size() == grid.size(), ErrorKind::LengthMismatch, "mask size differs from grid size");
  LatticeDomain d;
  d.dim_ = grid.dim();
  d.spacing_ = 1.0 / grid.points();
  d.origin_ = Eigen::VectorXd::Zero(d.dim_);
  d.shape_ = Mask{grid, std::move(interior)};
  d.check_connectivity();
  return d;
}

bool LatticeDomain::interior(const LatticePoint& k) const {
  if (const auto* b = std::get_if<Box>(&shape_)) return (k.array() > b->lo.array()).all() && (k.array() < b->hi.array()).all();
  const auto& m = std::get<Mask>(shape_);
  const std::int64_t g = m.grid.points();
  std::size_t index = 0;
  for (Eigen::Index d = 0; d < k.size(); ++d) {
    std::int64_t kd = k(d) % g;
    if (kd < 0) kd += g;
    index = index * static_cast<std::size_t>(g) + static_cast<std::size_t>(kd);
  }
  return m.inside[index];
}

Eigen::VectorXd LatticeDomain::position(const LatticePoint& k) const {
  return origin_ + spacing_ * k.cast<double>();
}

void LatticeDomain::check_connectivity() const {
  const auto* m = std::get_if<Mask>(&shape_);
  if (!m) return;
  const TorusGrid& grid = m->grid;
  // Reverse search from the exterior over diagonal steps (a symmetric relation).
  std::vector<bool> reached(grid.size(), false);
  std::deque<std::size_t> frontier;
  for (std::size_t p = 0; p < grid.size(); ++p)
    if (!m->inside[p]) {
      reached[p] = true;
      frontier.push_back(p);
    }
  if (frontier.empty()) throw Error(ErrorKind::NoBoundary, "domain covers the whole torus");
  const int directions = 1 << dim_;
  while (!frontier.empty()) {
    const std::size_t p = frontier.front();
    frontier.pop_front();
    const Eigen::VectorXi cell = grid.cell(p);
    for (int dir = 0; dir < directions; ++dir) {
      Eigen::VectorXi next = cell;
      for (int j = 0; j < dim_; ++j) next(j) += ((dir >> j) & 1) ? 1 : -1;
      const std::size_t q = grid.index_of(next);
      if (!reached[q]) {
        reached[q] = true;
        frontier.push_back(q);
      }
    }
  }
  for (std::size_t p = 0; p < grid.size(); ++p)
    if (!reached[p]) throw Error(ErrorKind::NoBoundary, "interior cell " + std::to_string(p) + " cannot reach the boundary");
}

namespace {

/// Runs the diagonal walk from start until it leaves the domain; returns the
/// exit point and the number of steps taken.
std::pair<LatticePoint, std::uint64_t> walk_to_exit(const LatticeDomain& domain, const LatticePoint& start,
                                                    SignStream& stream, std::uint64_t max_steps) {
  LatticePoint k = start;
  std::uint64_t steps = 0;
  while (domain.interior(k)) {
    for (Eigen::Index j = 0; j < k.size(); ++j) k(j) += stream.next();
    if (++steps > max_steps)
      throw Error(ErrorKind::ExitTimeout, "walk did not exit within " + std::to_string(max_steps) + " steps");
  }
  return {k, steps};
}

struct ScalarStats {
  std::uint64_t count = 0;
  double mean = 0, m2 = 0;
  double steps_mean = 0, steps_m2 = 0;

  void push(double v, double s) {
    ++count;
    const double k = static_cast<double>(count);
    double d = v - mean;
    mean += d / k;
    m2 += d * (v - mean);
    d = s - steps_mean;
    steps_mean += d / k;
    steps_m2 += d * (s - steps_mean);
  }

  void merge(const ScalarStats& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(count), nb = static_cast<double>(o.count), n = na + nb;
    double d = o.mean - mean;
    mean += d * nb / n;
    m2 += o.m2 + d * d * na * nb / n;
    d = o.steps_mean - steps_mean;
    steps_mean += d * nb / n;
    steps_m2 += o.steps_m2 + d * d * na * nb / n;
    count += o.count;
  }
};

double std_error(double m2, std::uint64_t count) {
  return count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count)) : 0.0;
}

}  // namespace

ExitResult solve_dirichlet_scalar(const LatticeDomain& domain, const std::function<double(const Eigen::VectorXd&)>& g,
                                  const LatticePoint& start, const ExitOptions& options) {
  require(start.size() == domain.dim(), ErrorKind::LengthMismatch, "start point has wrong dimension");
  require(options.samples >= 1 && options.batch_size >= 1, ErrorKind::InvalidArgument, "need samples and batch size");
  if (!domain.interior(start)) return {g(domain.position(start)), 0.0, 0.0, 0.0, options.samples};

  const std::uint64_t batches = (options.samples + options.batch_size - 1) / options.batch_size;
  std::vector<ScalarStats> partial(batches);
  parallel_for(static_cast<std::size_t>(batches), options.workers, [&](std::size_t b) {
    SignStream stream({options.seed, 0, b});
    const std::uint64_t count = std::min(options.batch_size, options.samples - b * options.batch_size);
    for (std::uint64_t i = 0; i < count; ++i) {
      const auto [exit, steps] = walk_to_exit(domain, start, stream, options.max_steps);
      partial[b].push(g(domain.position(exit)), static_cast<double>(steps));
    }
  });
  ScalarStats total;
  for (const auto& p : partial) total.merge(p);
  return {total.mean, std_error(total.m2, total.count), total.steps_mean, std_error(total.steps_m2, total.count),
          total.count};
}

SystemExitResult solve_dirichlet_system_experimental(const CoefficientTensor<double>& tensor,
                                                     const LatticeDomain& domain,
                                                     const SpectralField<double>& boundary,
                                                     const LatticePoint& start, const ExitOptions& options) {
  const int n = tensor.dim();
  require(domain.dim() == n && boundary.dim == n && boundary.components == n, ErrorKind::LengthMismatch,
          "tensor, domain and boundary data must share a dimension");
  require(start.size() == n, ErrorKind::LengthMismatch, "start point has wrong dimension");
  require(options.samples >= 1 && options.batch_size >= 1, ErrorKind::InvalidArgument, "need samples and batch size");
  if (boundary.radius >= 1) check_ellipticity(tensor, boundary.radius);

  const ModeBox box = boundary.box();
  const auto spectra = mode_spectra(tensor, boundary.radius);
  const Eigen::VectorXd x = domain.position(start);
  std::vector<Eigen::VectorXcd> weights(box.size());
  for (std::size_t m = 0; m < box.size(); ++m)
    weights[m] = std::polar(1.0, 2.0 * kPi<double> * box[m].cast<double>().dot(x)) * boundary.coeffs[m];
  const double dt = domain.dt();

  struct Stats {
    std::uint64_t count = 0;
    Eigen::VectorXcd mean;
    Eigen::VectorXd m2;
    double steps = 0;
  };
  const std::uint64_t batches = (options.samples + options.batch_size - 1) / options.batch_size;
  std::vector<Stats> partial(batches, Stats{0, Eigen::VectorXcd::Zero(n), Eigen::VectorXd::Zero(n), 0});
  parallel_for(static_cast<std::size_t>(batches), options.workers, [&](std::size_t b) {
    SignStream stream({options.seed, 0, b});
    const std::uint64_t count = std::min(options.batch_size, options.samples - b * options.batch_size);
    Stats& st = partial[b];
    for (std::uint64_t i = 0; i < count; ++i) {
      LatticePoint sums = start;
      std::uint64_t steps = 0;
      if (domain.interior(start)) {
        auto [exit, s] = walk_to_exit(domain, start, stream, options.max_steps);
        sums = exit - start;
        steps = s;
      } else {
        sums.setZero();
      }
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
      for (std::size_t m = 0; m < box.size(); ++m) {
        if (weights[m].isZero(0)) continue;
        const Eigen::MatrixXcd f = 0.5 * (mode_factor_from_sums(spectra[m], dt, sums) +
                                          mode_factor_from_sums(spectra[m], dt, LatticePoint(-sums)));
        v += f * weights[m];
      }
      ++st.count;
      const Eigen::VectorXcd delta = v - st.mean;
      st.mean += delta / static_cast<double>(st.count);
      st.m2.array() += (delta.conjugate().array() * (v - st.mean).array()).real();
      st.steps += static_cast<double>(steps);
    }
  });

  Stats total{0, Eigen::VectorXcd::Zero(n), Eigen::VectorXd::Zero(n), 0};
  for (const auto& p : partial) {
    if (p.count == 0) continue;
    if (total.count == 0) {
      total = p;
      continue;
    }
    const double na = static_cast<double>(total.count), nb = static_cast<double>(p.count), nn = na + nb;
    const Eigen::VectorXcd d = p.mean - total.mean;
    total.mean += d * (nb / nn);
    total.m2 += p.m2 + d.cwiseAbs2() * (na * nb / nn);
    total.steps += p.steps;
    total.count += p.count;
  }
  SystemExitResult out;
  out.value = total.mean;
  out.std_error = total.count > 1 ? Eigen::VectorXd((total.m2 / static_cast<double>(total.count - 1)).cwiseSqrt() /
                                                    std::sqrt(static_cast<double>(total.count)))
                                  : Eigen::VectorXd::Zero(n);
  out.max_imag = max_abs(total.mean.imag());
  out.mean_exit_steps = total.count ? total.steps / static_cast<double>(total.count) : 0.0;
  return out;
}

}  // namespace gbm
