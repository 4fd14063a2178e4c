#include <doctest.h>

#include <cmath>

#include "gbm/hyperfinite_walk.hpp"
#include "gbm/validators.hpp"

using namespace gbm;

namespace {

ModeSpectrum<double> scalar_spectrum(double lambda) {
  Eigen::MatrixXd a(1, 1);
  a << lambda;
  return make_spectrum(a);
}

MultiIndex mi(std::initializer_list<int> v) {
  MultiIndex a(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (int x : v) a(i++) = x;
  return a;
}

}  // namespace

TEST_CASE("timeline") {
  const auto t = Timeline::from_horizon(0.25, 1e-3);
  CHECK(t.steps == 250);
  CHECK(t.horizon() == doctest::Approx(0.25));
  CHECK(t.spacing() == doctest::Approx(std::sqrt(2e-3)));
  CHECK_THROWS_AS(Timeline::from_horizon(0.25, 0.3), Error);
}

TEST_CASE("sampling is deterministic and balanced") {
  const Timeline t(1e-3, 50);
  SignStream a({9, 4, 2}), b({9, 4, 2}), c({9, 5, 2});
  const auto pa = sample_path(t, 3, a);
  CHECK(pa.omega == sample_path(t, 3, b).omega);
  CHECK(pa.omega != sample_path(t, 3, c).omega);
  CHECK((pa.omega.array().abs() == 1).all());

  SignStream s({1, 0, 0});
  const long draws = 100000;
  long sum = 0;
  for (long i = 0; i < draws; ++i) sum += s.next();
  CHECK(std::abs(static_cast<double>(sum) / draws) <= 3 / std::sqrt(double(draws)));

  long plus = 0;
  SignStream one({2, 0, 0});
  for (long i = 0; i < draws; ++i) plus += sample_path(Timeline(1.0, 1), 1, one).omega(0, 0) > 0;
  CHECK(std::abs(static_cast<double>(plus) / draws - 0.5) <= 3 * 0.5 / std::sqrt(double(draws)));
}

TEST_CASE("walk positions") {
  const Timeline t(0.01, 4);
  PathSample up{SignMatrix::Ones(4, 1)};
  const auto w = walk_position(up, t, Eigen::VectorXd::Zero(1));
  CHECK(w.endpoint()(0) == 4);
  CHECK(w.position(4)(0) == doctest::Approx(4 * std::sqrt(0.02)));

  SignStream s({3, 0, 0});
  const Timeline tl(1e-3, 40);
  const auto p = sample_path(tl, 2, s);
  const Eigen::Vector2d x0(0.3, -0.1);
  const auto fwd = walk_position(p, tl, x0);
  const auto bwd = walk_position(PathSample{SignMatrix(-p.omega)}, tl, x0);
  CHECK(fwd.offsets == -bwd.offsets);
  CHECK(fwd.quadratic_variation_units() == LatticePoint::Constant(2, 40));
}

TEST_CASE("density by enumeration") {
  const auto d = empirical_density(Timeline(0.5, 2), 1);
  CHECK(d.probability.size() == 3);
  CHECK(d.at({-2}) == 0.25);
  CHECK(d.at({0}) == 0.5);
  CHECK(d.at({2}) == 0.25);
  CHECK(d.total() == 1.0);
  CHECK_THROWS_AS(empirical_density(Timeline(1.0, 13), 2), Error);
}

TEST_CASE("density validator: binomial, heat recursion, sampling") {
  for (int dim : {1, 2}) {
    const auto v = density_validation(8, dim, 100000, 17);
    CHECK(v.binomial_max_error == 0);
    CHECK(v.total_error == 0);
    CHECK(v.heat_recursion_error == 0);
    CHECK(std::abs(v.sampled.total() - 1) <= 1e-12);
    // per-site z scores; a 5 sigma bound keeps the multiple-comparison rate negligible
    CHECK(v.sampled_max_z <= 5);
  }
}

TEST_CASE("mode factor samples") {
  SUBCASE("zero mode gives the identity") {
    const auto spec = make_spectrum(lame_tensor(2, 1.0), mi({0, 0}));
    SignStream s({1, 1, 1});
    const Timeline t(1e-3, 10);
    CHECK(mode_factor_sample(spec, t, sample_path(t, 2, s)) == Eigen::MatrixXcd::Identity(2, 2));
  }
  SUBCASE("antithetic pair at M = 1 averages to cos") {
    const auto spec = make_spectrum(lame_tensor(2, 1.0), mi({1, 1}));
    const Timeline t(1e-3, 1);
    PathSample p{SignMatrix(1, 2)};
    p.omega << 1, -1;
    const Eigen::MatrixXcd avg =
        0.5 * (mode_factor_sample(spec, t, p) + mode_factor_sample(spec, t, PathSample{SignMatrix(-p.omega)}));
    Eigen::VectorXd c(2);
    for (int i = 0; i < 2; ++i) c(i) = std::cos(std::sqrt(2 * spec.lambda(i) * 1e-3));
    CHECK(max_abs(Eigen::MatrixXd(avg.real() - spectral_function(spec.Q, c))) < 1e-14);
    CHECK(max_abs(Eigen::MatrixXd(avg.imag())) <= 1e-12);
  }
  SUBCASE("unitary") {
    const auto spectra = mode_spectra(lame_tensor(3, 0.5), 2);
    SignStream s({4, 0, 0});
    const Timeline t(1e-3, 30);
    for (const auto& spec : spectra) {
      const auto f = mode_factor_sample(spec, t, sample_path(t, 3, s));
      CHECK(max_abs(Eigen::MatrixXcd(f * f.adjoint() - Eigen::MatrixXcd::Identity(3, 3))) <= 1e-12);
    }
  }
  SUBCASE("enumeration M = 6 equals cos^6") {
    const auto spec = scalar_spectrum(1.0);
    const Timeline t(0.01, 6);
    const auto e = mode_factor_enumerated(spec, t);
    CHECK(std::abs(e(0, 0) - std::pow(std::cos(std::sqrt(0.02)), 6)) <= 1e-14);
    CHECK(std::abs(e(0, 0).imag()) <= 1e-15);
  }
  SUBCASE("enumeration matches closed form for a 2x2 mode") {
    const auto spec = make_spectrum(lame_tensor(2, 1.0), mi({1, -1}));
    const Timeline t(1e-3, 5);
    const auto e = mode_factor_enumerated(spec, t);
    CHECK(max_abs(Eigen::MatrixXd(e.real() - mode_factor_closed_form(spec, t))) <= 1e-14);
  }
}

TEST_CASE("closed form against the propagator") {
  const auto spec = scalar_spectrum(1.0);
  const double v = mode_factor_closed_form(spec, Timeline::from_horizon(0.25, 1e-3))(0, 0);
  CHECK(v == doctest::Approx(std::pow(std::cos(std::sqrt(0.002)), 250)).epsilon(1e-14));
  CHECK(std::abs(v - std::exp(-0.25)) <= 1e-4);
  CHECK(mode_factor_closed_form(spec, Timeline(1e-3, 0)).isIdentity(0));

  const auto spectra = mode_spectra(lame_tensor(2, 1.0), 3);
  for (const auto& s : spectra) {
    // asymptotic regime lambda dt << 1 only
    if (s.lambda.maxCoeff() == 0 || s.lambda.maxCoeff() * 1e-3 > 0.1) continue;
    const double e1 = max_abs(Eigen::MatrixXd(mode_factor_closed_form(s, Timeline::from_horizon(0.05, 1e-3)) - propagator(s, 0.05)));
    const double e2 = max_abs(Eigen::MatrixXd(mode_factor_closed_form(s, Timeline::from_horizon(0.05, 5e-4)) - propagator(s, 0.05)));
    CHECK(e1 / e2 >= 1.5);
    CHECK(e1 / e2 <= 3);
  }
}

TEST_CASE("sampled mean of mode factors within 3 sigma of the closed form") {
  const auto spectra = mode_spectra(lame_tensor(2, 1.0), 1);
  const Timeline t(1e-3, 20);
  const int paths = 4000;
  int inside = 0;
  int total = 0;
  for (std::size_t m = 0; m < spectra.size(); ++m) {
    SignStream s({31, m, 0});
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(2, 2);
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(2, 2);
    for (int i = 0; i < paths; ++i) {
      const Eigen::MatrixXcd f = mode_factor_sample(spectra[m], t, sample_path(t, 2, s));
      sum += f;
      sq += f.cwiseAbs2();
    }
    const Eigen::MatrixXcd mean = sum / double(paths);
    const Eigen::MatrixXd closed = mode_factor_closed_form(spectra[m], t);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double var = sq(i, j) / paths - std::norm(mean(i, j));
        const double se = std::sqrt(std::max(var, 0.0) / paths);
        inside += std::abs(mean(i, j) - closed(i, j)) <= 3 * se + 1e-12;
        ++total;
      }
  }
  CHECK(inside >= total - 1);
}

TEST_CASE("CLT table") {
  const auto rows = clt_check(10000, 0.5);
  CHECK_FALSE(rows.empty());
  double worst = 0;
  for (const auto& r : rows) {
    CHECK(std::abs(r.x) <= 2 + 1e-12);
    worst = std::max(worst, std::abs(r.scaled_binomial - r.gaussian));
    if (r.m == 5000) {
      CHECK(r.x == 0);
      CHECK(r.gaussian == doctest::Approx(1 / std::sqrt(2 * M_PI)));
      CHECK(std::abs(r.scaled_binomial - r.gaussian) < 1e-3);
    }
  }
  CHECK(worst <= 1e-3);
  // symmetric table for p = 1/2
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].scaled_binomial == rows[rows.size() - 1 - i].scaled_binomial);

  double small = 0;
  for (const auto& r : clt_check(100, 0.5)) small = std::max(small, std::abs(r.scaled_binomial - r.gaussian));
  CHECK(small <= 1e-2);
  CHECK_THROWS_AS(clt_check(100, 1.0), Error);
}
