#include <doctest.h>

#include <cmath>

#include "gbm/fd_reference.hpp"
#include "gbm/feynman_kac.hpp"

using namespace gbm;

namespace {

GridField<double> cos_field(int dim, int g) {
  return sample_field<double>(TorusGrid(dim, g), dim, [dim](const Eigen::VectorXd& x) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v(0) = std::cos(2 * M_PI * x(0));
    return v;
  });
}

// Symbol of the stencil on e^{i 2 pi alpha x}, written from the difference formulas.
Eigen::MatrixXcd discrete_symbol(const CoefficientTensor<double>& t, const MultiIndex& alpha, int g) {
  const int n = t.dim();
  const double h = 1.0 / g;
  auto theta = [&](int k) { return 2 * M_PI * alpha(k) * h; };
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double d = k == l ? (2 * std::cos(theta(k)) - 2) / (h * h) : -std::sin(theta(k)) * std::sin(theta(l)) / (h * h);
          s(i, j) += t(i, j, k, l) * d;
        }
  return s;
}

}  // namespace

TEST_CASE("constant field maps to zero") {
  const TorusGrid g(2, 8);
  const auto f = sample_field<double>(g, 2, [](const Eigen::VectorXd&) { return Eigen::Vector2d(1.5, -0.5); });
  CHECK(max_abs(apply_operator(lame_tensor(2, 0.7), f).values) < 1e-9);
}

TEST_CASE("scalar cosine gets the discrete symbol") {
  for (int g : {16, 32, 64}) {
    const auto f = cos_field(1, g);
    const auto lf = apply_operator(scalar_tensor(1, 1.0), f);
    const double symbol = -(2 - 2 * std::cos(2 * M_PI / g)) * g * g;
    CHECK(max_abs(Eigen::MatrixXd(lf.values - symbol * f.values)) <= 1e-9 * g * g);
  }
  const double e16 = std::abs(-(2 - 2 * std::cos(2 * M_PI / 16)) * 256 + 4 * M_PI * M_PI);
  const double e32 = std::abs(-(2 - 2 * std::cos(2 * M_PI / 32)) * 1024 + 4 * M_PI * M_PI);
  CHECK(e16 / e32 == doctest::Approx(4).epsilon(0.01));
}

TEST_CASE("plane waves: stencil eigenvalue converges to -A_alpha at rate G^-2") {
  const auto t = lame_tensor(2, 1.0);
  MultiIndex alpha(2);
  alpha << 1, 2;
  const Eigen::MatrixXd a = build_mode_matrix(t, alpha);
  double previous = 0;
  for (int g : {16, 32, 64}) {
    const TorusGrid grid(2, g);
    // apply to cos and sin parts of e^{i 2 pi alpha x} e_j and read off the symbol
    Eigen::MatrixXcd measured(2, 2);
    for (int j = 0; j < 2; ++j) {
      auto re = sample_field<double>(grid, 2, [&](const Eigen::VectorXd& x) {
        Eigen::Vector2d v = Eigen::Vector2d::Zero();
        v(j) = std::cos(2 * M_PI * alpha.cast<double>().dot(x));
        return v;
      });
      auto im = sample_field<double>(grid, 2, [&](const Eigen::VectorXd& x) {
        Eigen::Vector2d v = Eigen::Vector2d::Zero();
        v(j) = std::sin(2 * M_PI * alpha.cast<double>().dot(x));
        return v;
      });
      const auto lr = apply_operator(t, re).values;
      const auto li = apply_operator(t, im).values;
      // at x = 0 the wave equals 1, so the response there is the symbol column
      for (int i = 0; i < 2; ++i) measured(i, j) = {lr(0, i), li(0, i)};
    }
    CHECK(max_abs(Eigen::MatrixXcd(measured - discrete_symbol(t, alpha, g))) <= 1e-8 * g * g);
    const double err = max_abs(Eigen::MatrixXd(measured.real() + a));
    if (previous > 0) CHECK(previous / err == doctest::Approx(4).epsilon(0.05));
    previous = err;
  }
}

TEST_CASE("translation commutes with the operator") {
  const auto f = random_real_field(2, 3, 3, 8);
  const TorusGrid grid(2, 16);
  const auto u = inverse_on_grid(f, grid);
  GridField<double> shifted = u;
  const Eigen::Vector2i step(1, 0);
  for (std::size_t p = 0; p < grid.size(); ++p)
    shifted.values.row(static_cast<Eigen::Index>(grid.index_of(grid.cell(p) + step))) = u.values.row(static_cast<Eigen::Index>(p));
  const auto t = lame_tensor(2, 0.8);
  const auto lu = apply_operator(t, u).values;
  const auto ls = apply_operator(t, shifted).values;
  for (std::size_t p = 0; p < grid.size(); ++p)
    CHECK(max_abs(Eigen::VectorXd(ls.row(static_cast<Eigen::Index>(grid.index_of(grid.cell(p) + step))) -
                                  lu.row(static_cast<Eigen::Index>(p)))) <= 1e-9);
}

TEST_CASE("march") {
  const auto tensor = scalar_tensor(1, 1.0);
  const auto f = cos_field(1, 64);
  const auto same = march(tensor, f, 0.0, 1e-6);
  CHECK(same.values == f.values);

  const double dt = stable_time_step(tensor, f.grid);
  const auto u = march(tensor, f, 0.01, dt);
  const double amplitude = u.values(0, 0);
  CHECK(std::abs(amplitude / std::exp(-4 * M_PI * M_PI * 0.01) - 1) <= 0.01);

  try {
    march(tensor, f, 0.01, 2 * dt);
    FAIL("expected StabilityViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::StabilityViolation);
  }
}

TEST_CASE("scalar heat energy is non-increasing") {
  const auto tensor = scalar_tensor(2, 1.0);
  const TorusGrid grid(2, 16);
  GridField<double> u = inverse_on_grid(random_real_field(2, 4, 4, 3), grid);
  const double dt = stable_time_step(tensor, grid);
  double energy = u.values.squaredNorm();
  for (int i = 0; i < 20; ++i) {
    u = march(tensor, u, dt, dt);
    const double next = u.values.squaredNorm();
    CHECK(next <= energy * (1 + 1e-14));
    energy = next;
  }
}

TEST_CASE("Lame system against the spectral oracle") {
  const auto tensor = lame_tensor(2, 1.0);
  const auto f = random_real_field(2, 4, 4, 42);
  const TorusGrid grid(2, 64);
  const auto fd = march(tensor, inverse_on_grid(f, grid), 0.01, stable_time_step(tensor, grid));
  std::vector<Eigen::VectorXd> pts;
  for (std::size_t p = 0; p < grid.size(); ++p) pts.push_back(grid.point(p));
  const auto oracle = solve_spectral_oracle(CauchyProblem{tensor, f, 0.01}, pts);
  Eigen::MatrixXd ref(static_cast<Eigen::Index>(grid.size()), 2);
  for (std::size_t p = 0; p < grid.size(); ++p) ref.row(static_cast<Eigen::Index>(p)) = oracle[p].real().transpose();
  CHECK((fd.values - ref).norm() / ref.norm() <= 1e-2);
}
