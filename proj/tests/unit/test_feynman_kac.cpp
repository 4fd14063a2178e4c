#include <doctest.h>

#include <cmath>

#include "gbm/feynman_kac.hpp"

using namespace gbm;

namespace {

MultiIndex mi(std::initializer_list<int> v) {
  MultiIndex a(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (int x : v) a(i++) = x;
  return a;
}

CauchyProblem scalar_cos_problem(double t) { return {scalar_tensor(1, 1.0), cosine_field(1, 2), t}; }

double max_diff(const std::vector<Eigen::VectorXcd>& a, const std::vector<Eigen::VectorXcd>& b) {
  double worst = 0;
  for (std::size_t p = 0; p < a.size(); ++p) worst = std::max(worst, max_abs(Eigen::VectorXcd(a[p] - b[p])));
  return worst;
}

}  // namespace

TEST_CASE("spectral oracle") {
  SUBCASE("t = 0 reconstructs f") {
    const auto f = random_real_field(2, 3, 3, 4);
    const auto pts = lattice_points(2, 5);
    const auto u = solve_spectral_oracle(CauchyProblem{lame_tensor(2, 1.0), f, 0.0}, pts);
    std::vector<Eigen::VectorXd> xs(pts.begin(), pts.end());
    const auto direct = inverse(f, xs);
    for (std::size_t p = 0; p < pts.size(); ++p)
      CHECK(max_abs(Eigen::VectorXd(u[p].real() - direct.values.row(static_cast<Eigen::Index>(p)).transpose())) < 1e-13);
  }
  SUBCASE("scalar cosine decays by exp(-4 pi^2 t)") {
    const auto pts = lattice_points(1, 16);
    const auto u = solve_spectral_oracle(scalar_cos_problem(0.01), pts);
    for (std::size_t p = 0; p < pts.size(); ++p)
      CHECK(std::abs(u[p](0) - std::exp(-4 * M_PI * M_PI * 0.01) * std::cos(2 * M_PI * pts[p](0))) < 1e-14);
  }
  SUBCASE("Lame mode (1,0) decays with diag(2,1)") {
    const auto pts = lattice_points(2, 3);
    const auto u = solve_spectral_oracle(CauchyProblem{lame_tensor(2, 1.0), cosine_field(2, 1), 0.02}, pts);
    for (std::size_t p = 0; p < pts.size(); ++p) {
      CHECK(std::abs(u[p](0) - std::exp(-8 * M_PI * M_PI * 0.02) * std::cos(2 * M_PI * pts[p](0))) < 1e-14);
      CHECK(std::abs(u[p](1)) < 1e-14);
    }
  }
  SUBCASE("semigroup") {
    const auto tensor = lame_tensor(2, 0.6);
    const auto f = random_real_field(2, 3, 3, 9);
    const double t1 = 0.004, t2 = 0.007;
    SpectralField<double> f1 = f;
    for (std::size_t m = 0; m < f.coeffs.size(); ++m)
      f1.coeffs[m] = propagator(make_spectrum(tensor, f.box()[m]), t1).cast<std::complex<double>>() * f.coeffs[m];
    const auto pts = lattice_points(2, 4);
    const auto once = solve_spectral_oracle(CauchyProblem{tensor, f, t1 + t2}, pts);
    const auto twice = solve_spectral_oracle(CauchyProblem{tensor, f1, t2}, pts);
    double scale = 0;
    for (const auto& v : once) scale = std::max(scale, max_abs(v));
    CHECK(max_diff(once, twice) <= 1e-9 * scale);
  }
  SUBCASE("ellipticity violation propagates") {
    CHECK_THROWS_AS(solve_spectral_oracle(CauchyProblem{lame_tensor(2, -0.1), cosine_field(2, 1), 0.01},
                                          lattice_points(2, 2)),
                    EllipticityViolation);
  }
}

TEST_CASE("closed form discretization bias is O(dt)") {
  const auto problem = scalar_cos_problem(0.01);
  const auto pts = lattice_points(1, 16);
  const auto oracle = solve_spectral_oracle(problem, pts);
  const double b1 = max_diff(solve_closed_form(problem, Timeline::from_horizon(0.01, 1e-3), pts), oracle);
  const double b2 = max_diff(solve_closed_form(problem, Timeline::from_horizon(0.01, 5e-4), pts), oracle);
  CHECK(b1 / b2 >= 1.6);
  CHECK(b1 / b2 <= 2.4);
}

TEST_CASE("Monte Carlo: enumeration mode equals the closed-form contraction") {
  SUBCASE("n = 1, M = 10") {
    const CauchyProblem p{scalar_tensor(1, 1.0), random_real_field(1, 3, 3, 2), 0.01};
    MonteCarloOptions o;
    o.enumerate = true;
    o.dt = 1e-3;
    const auto pts = lattice_points(1, 8);
    const auto r = solve_monte_carlo(p, pts, o);
    CHECK(max_diff(r.mc_values, r.closed_form_values) <= 1e-14);
  }
  SUBCASE("Lame n = 2, M = 5") {
    const CauchyProblem p{lame_tensor(2, 1.0), random_real_field(2, 2, 2, 3), 0.005};
    MonteCarloOptions o;
    o.enumerate = true;
    o.dt = 1e-3;
    const auto r = solve_monte_carlo(p, lattice_points(2, 3), o);
    CHECK(max_diff(r.mc_values, r.closed_form_values) <= 1e-14);
  }
  SUBCASE("too many paths") {
    MonteCarloOptions o;
    o.enumerate = true;
    o.dt = 1e-3;
    CHECK_THROWS_AS(solve_monte_carlo(scalar_cos_problem(0.05), lattice_points(1, 2), o), Error);
  }
}

TEST_CASE("Monte Carlo: zero-mode data is reproduced exactly") {
  SpectralField<double> f(2, 2, 2);
  f[mi({0, 0})] = Eigen::Vector2cd(1.25, -0.5);
  MonteCarloOptions o;
  o.samples = 100;
  o.seed = 3;
  const auto r = solve_monte_carlo(CauchyProblem{lame_tensor(2, 1.0), f, 0.01}, lattice_points(2, 3), o);
  for (std::size_t p = 0; p < r.points.size(); ++p) {
    CHECK(r.mc_values[p] == Eigen::VectorXcd(Eigen::Vector2cd(1.25, -0.5)));
    CHECK(r.std_errors[p].isZero(0));
  }
}

TEST_CASE("Monte Carlo: scalar heat within 3 sigma at 16 points") {
  MonteCarloOptions o;
  o.samples = 10000;
  o.seed = 2024;
  o.dt = 1e-3;
  const auto r = solve_monte_carlo(scalar_cos_problem(0.01), lattice_points(1, 16), o);
  for (std::size_t p = 0; p < r.points.size(); ++p)
    CHECK(std::abs(r.mc_values[p](0) - r.oracle_values[p](0)) <= 3 * r.std_errors[p](0));
  CHECK(r.max_imag <= 1e-10);
  CHECK(r.rng.units == 5000);
  CHECK(r.steps == 10);
}

TEST_CASE("Monte Carlo: Lame system real output and 1/sqrt(S) errors") {
  const CauchyProblem p{lame_tensor(2, 1.0), random_real_field(2, 2, 2, 6), 0.01};
  const auto pts = lattice_points(2, 3);
  MonteCarloOptions o;
  o.samples = 2000;
  o.seed = 8;
  const auto a = solve_monte_carlo(p, pts, o);
  double fmax = 0;
  for (const auto& c : p.initial.coeffs) fmax += c.cwiseAbs().maxCoeff();
  CHECK(a.max_imag <= 1e-10 * (1 + fmax));
  o.samples = 8000;
  o.seed = 9;
  const auto b = solve_monte_carlo(p, pts, o);
  for (std::size_t q = 0; q < pts.size(); ++q)
    for (int i = 0; i < 2; ++i) {
      const double ratio = a.std_errors[q](i) / b.std_errors[q](i) / 2;
      CHECK(ratio >= 0.8);
      CHECK(ratio <= 1.2);
    }
}

TEST_CASE("Monte Carlo: worker count and batch order do not change results") {
  const CauchyProblem p{lame_tensor(2, 0.8), random_real_field(2, 2, 3, 12), 0.01};
  const auto pts = lattice_points(2, 3);
  MonteCarloOptions o;
  o.samples = 3000;
  o.seed = 77;
  o.batch_size = 64;
  o.workers = 1;
  const auto one = solve_monte_carlo(p, pts, o);
  o.workers = 5;
  const auto five = solve_monte_carlo(p, pts, o);
  for (std::size_t q = 0; q < pts.size(); ++q) {
    CHECK(one.mc_values[q] == five.mc_values[q]);
    CHECK(one.std_errors[q] == five.std_errors[q]);
  }
  o.seed = 78;
  const auto other = solve_monte_carlo(p, pts, o);
  CHECK(other.mc_values[0] != one.mc_values[0]);
}

TEST_CASE("Monte Carlo: argument checks") {
  MonteCarloOptions o;
  o.samples = 11;
  CHECK_THROWS_AS(solve_monte_carlo(scalar_cos_problem(0.01), lattice_points(1, 4), o), Error);
  o.samples = 10;
  o.dt = 3e-3;
  CHECK_THROWS_AS(solve_monte_carlo(scalar_cos_problem(0.01), lattice_points(1, 4), o), Error);
}

TEST_CASE("path-space estimator") {
  const Timeline t(std::ldexp(1.0, -11), 10);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  const auto c = solve_scalar_pathspace([](const Eigen::VectorXd&) { return 2.5; }, t, zero, 0, 0);
  CHECK(c.value == 2.5);
  CHECK(c.paths == 1024);
  const auto sq = solve_scalar_pathspace([](const Eigen::VectorXd& y) { return y(0) * y(0); }, t, zero, 0, 0);
  CHECK(sq.value == 2 * t.horizon());
  const auto lin = solve_scalar_pathspace([](const Eigen::VectorXd& y) { return y(0) + y(1); }, Timeline(1e-3, 50),
                                          Eigen::Vector2d(0.3, -0.3), 20000, 4);
  CHECK(std::abs(lin.value) <= 3 * lin.std_error);

  // the path-space mean of cos(2 pi y) solves the same heat problem as the mode estimator
  const Timeline h = Timeline::from_horizon(0.01, 1e-3);
  const auto e = solve_scalar_pathspace([](const Eigen::VectorXd& y) { return std::cos(2 * M_PI * y(0)); }, h,
                                        Eigen::VectorXd::Constant(1, 0.1), 0, 0);
  const auto closed = solve_closed_form(scalar_cos_problem(0.01), h, {Eigen::VectorXd::Constant(1, 0.1)});
  CHECK(std::abs(e.value - closed[0](0).real()) <= 1e-14);
}

TEST_CASE("mean preservation") {
  MonteCarloOptions o;
  o.samples = 1000;
  o.seed = 5;
  const auto d = mean_preservation_check(CauchyProblem{lame_tensor(2, 1.0), random_real_field(2, 2, 2, 13), 0.01}, o);
  CHECK(d.oracle_error <= 1e-14);
  CHECK(d.mc_within_3sigma);

  const auto z = mean_preservation_check(CauchyProblem{lame_tensor(2, 1.0), cosine_field(2, 2), 0.01}, o);
  CHECK(z.f_mean.isZero(0));
  CHECK(max_abs(z.oracle_mean) <= 1e-14);
  CHECK(max_abs(z.mc_mean) <= 1e-12);
}
