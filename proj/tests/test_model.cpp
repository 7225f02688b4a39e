#include <doctest.h>

#include <cmath>
#include <functional>

#include <phi4/common.hpp>
#include <phi4/constants.hpp>
#include <phi4/model.hpp>

using namespace phi4;

namespace
{
  // nested central differences along the multi-index axes
  double fd_derivative(const std::function<double(const FourMomentum &)> &f, FourMomentum p,
                       std::vector<int> axes, double h)
  {
    if (axes.empty()) return f(p);
    const int mu = axes.back();
    axes.pop_back();
    FourMomentum pp = p, pm = p;
    pp[mu] += h;
    pm[mu] -= h;
    return (fd_derivative(f, pp, axes, h) - fd_derivative(f, pm, axes, h)) / (2.0 * h);
  }

  double fd_richardson(const std::function<double(const FourMomentum &)> &f,
                       const FourMomentum &p, const std::vector<int> &axes, double h)
  {
    const double d1 = fd_derivative(f, p, axes, h);
    const double d2 = fd_derivative(f, p, axes, 0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
  }
} // namespace

TEST_CASE("propagator endpoint values")
{
  CHECK(propagator(3.7, FlowScales(2.0, 2.0, 1.0)) == 0.0);
  // Lambda = 0, huge Lambda0, p = 0, m = 1: (1/m^2)(1 - 0)
  CHECK(propagator(0.0, FlowScales(0.0, 1e9, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  // direct scalar evaluation of the defining formula
  const double expected = 0.5 * (std::exp(-0.5) - std::exp(-2.0));
  CHECK(propagator(1.0, FlowScales(1.0, 2.0, 1.0)) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("propagator monotone in Lambda and positive")
{
  Rng rng(7);
  for (int it = 0; it < 200; ++it) {
    const double p2 = rng.uniform(0.0, 30.0);
    const double lam0 = rng.uniform(5.0, 80.0);
    double prev = propagator(p2, FlowScales(0.0, lam0, 1.0));
    CHECK(prev >= 0.0);
    for (double lam : {0.2, 0.8, 2.0, 4.9}) {
      const double cur = propagator(p2, FlowScales(lam, lam0, 1.0));
      CHECK(cur >= 0.0);
      CHECK(cur <= prev + 1e-15);
      prev = cur;
    }
  }
}

TEST_CASE("Lambda derivative of the propagator")
{
  // direct substitution at p^2 = 0, m = 1, Lambda = 1
  CHECK(propagator_lambda_derivative(0.0, FlowScales(1.0, 10.0, 1.0)) ==
        doctest::Approx(-2.0 * std::exp(-1.0)).epsilon(1e-15));
  CHECK_THROWS_AS(propagator_lambda_derivative(1.0, FlowScales(0.0, 10.0, 1.0)), domain_error);

  // finite-difference oracle
  Rng rng(11);
  for (int it = 0; it < 50; ++it) {
    const double p2 = rng.uniform(0.0, 9.0);
    const double lam = rng.uniform(0.4, 6.0);
    const double lam0 = 50.0;
    const double h = 1e-5 * lam;
    const double fd = (propagator(p2, FlowScales(lam + h, lam0, 1.0)) -
                       propagator(p2, FlowScales(lam - h, lam0, 1.0))) /
                      (2.0 * h);
    const double exact = propagator_lambda_derivative(p2, FlowScales(lam, lam0, 1.0));
    CHECK(exact == doctest::Approx(fd).epsilon(1e-6));
    CHECK(exact <= 0.0);
    // |dC/dL| L^3 / 2 <= 1
    CHECK(std::abs(exact) * lam * lam * lam / 2.0 <= 1.0);
  }

  // large-Lambda asymptote -2/Lambda^3
  const double lam = 4000.0;
  const double v = propagator_lambda_derivative(1.0, FlowScales(lam, 8000.0, 1.0));
  CHECK(v == doctest::Approx(-2.0 / (lam * lam * lam)).epsilon(1e-6));
}

TEST_CASE("regulator momentum derivatives")
{
  const FlowScales s(1.3, 40.0, 1.0);
  const FourMomentum zero{};
  CHECK(regulator_momentum_derivative(zero, s, MultiIndex(0, 0, 0, 0)) ==
        doctest::Approx(std::exp(-1.0 / (1.3 * 1.3))).epsilon(1e-15));
  CHECK(regulator_momentum_derivative(zero, s, MultiIndex(1, 0, 0, 0)) == 0.0);
  CHECK_THROWS_AS(MultiIndex(2, 2, 0, 0), domain_error);

  // third finite differences, Richardson extrapolated
  Rng rng(13);
  const std::vector<MultiIndex> ws = {MultiIndex(3, 0, 0, 0), MultiIndex(2, 1, 0, 0),
                                      MultiIndex(1, 1, 1, 0), MultiIndex(0, 1, 2, 0)};
  for (bool half : {false, true}) {
    for (const auto &w : ws) {
      for (int it = 0; it < 12; ++it) {
        FourMomentum p;
        for (int mu = 0; mu < 4; ++mu)
          p[mu] = rng.uniform(-2.0, 2.0);
        auto f = [&](const FourMomentum &q) {
          return regulator_momentum_derivative(q, s, MultiIndex(0, 0, 0, 0), half);
        };
        const double fd = fd_richardson(f, p, w.axes(), 0.02);
        const double exact = regulator_momentum_derivative(p, s, w, half);
        CHECK(exact == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("eta subsum function")
{
  const FourMomentum p{{1, 0, 0, 0}}, q{{0, 2, 0, 0}};
  MomentumConfig cfg({p, -p, q, -q});
  CHECK(eta(cfg, 1, 2) == doctest::Approx(1.0));
  CHECK_THROWS_AS(eta(cfg, 2, 2), domain_error);

  MomentumConfig zeros(std::vector<FourMomentum>(4));
  CHECK(eta(zeros, 1, 2) == 0.0);

  MomentumConfig pair({p, -p});
  CHECK(eta(pair, 1, 2) == doctest::Approx(p.norm()));

  // invariance under permuting the momenta outside {i, j}
  Rng rng(17);
  for (int it = 0; it < 40; ++it) {
    std::vector<FourMomentum> m(6);
    FourMomentum sum{};
    for (int i = 0; i < 5; ++i) {
      for (int mu = 0; mu < 4; ++mu)
        m[i][mu] = rng.normal();
      sum = sum + m[i];
    }
    m[5] = -sum;
    MomentumConfig a(m);
    std::swap(m[2], m[4]);
    std::swap(m[3], m[5]);
    MomentumConfig b(m);
    CHECK(eta(a, 1, 2) == doctest::Approx(eta(b, 1, 2)).epsilon(1e-12));
  }
}

TEST_CASE("sup momentum")
{
  CHECK(sup_momentum(MomentumConfig(std::vector<FourMomentum>(2))) == 0.0);
  const FourMomentum p{{0, 3, 4, 0}};
  CHECK(sup_momentum(MomentumConfig({p, -p})) == doctest::Approx(5.0));
  Rng rng(23);
  for (int it = 0; it < 20; ++it) {
    std::vector<FourMomentum> m(4);
    FourMomentum sum{};
    for (int i = 0; i < 3; ++i) {
      for (int mu = 0; mu < 4; ++mu)
        m[i][mu] = rng.normal();
      sum = sum + m[i];
    }
    m[3] = -sum;
    double ref = 0.0;
    for (const auto &v : m)
      ref = std::max(ref, v.norm());
    CHECK(sup_momentum(MomentumConfig(m)) == doctest::Approx(ref));
  }
}

TEST_CASE("kinematic families")
{
  const auto z = make_family("zero", {4});
  CHECK(z.two_n() == 4);
  CHECK(sup_momentum(z) == 0.0);

  const auto ap = make_family("antipodal-pair", {1.0});
  CHECK(ap.momenta[0].norm() == doctest::Approx(1.0));
  CHECK((ap.momenta[0] + ap.momenta[1]).norm() == 0.0);

  const auto fp = make_family("four-point", {1.0, 1.0, 0.0});
  CHECK(fp.momenta[0].dot(fp.momenta[2]) == doctest::Approx(0.0));
  CHECK_THROWS_AS(make_family("nonsense", {1.0}), domain_error);
}

TEST_CASE("momentum configuration invariants")
{
  const FourMomentum p{{1, 0, 0, 0}};
  CHECK_THROWS_AS(MomentumConfig({p, p}), domain_error);
  CHECK_THROWS_AS(MomentumConfig({p}), domain_error);
  CHECK_THROWS_AS(FlowScales(2.0, 1.0, 1.0), domain_error);
  CHECK_THROWS_AS(FlowScales(0.0, 1.0, 0.0), domain_error);
  CHECK(FlowScales(1.5, 10.0, 1.0).kappa() == doctest::Approx(2.5));
}

TEST_CASE("regulator bound, Lambda-derivative part")
{
  // (2/L^3) e^{-m^2/L^2} <= K2/kappa^3 on a log grid of Lambda/m
  const double K2 = default_registry().K2;
  for (int i = 0; i <= 600; ++i) {
    const double lam = 1e-3 * std::pow(1e6, i / 600.0);
    const double kappa = lam + 1.0;
    const double lhs = 2.0 / (lam * lam * lam) * std::exp(-1.0 / (lam * lam));
    CHECK(lhs <= K2 / (kappa * kappa * kappa) * (1.0 + 1e-12));
  }
}

TEST_CASE("regulator bound, momentum-derivative part on |p| >= kappa")
{
  // |d^w dC/dL| <= K^(|w|) kappa^-3 sup(kappa,|p|)^-|w| checked on sampled
  // grids in the momentum range |p| >= kappa where the constants are
  // calibrated; |w| = 0 holds for every p and is sampled unrestricted.
  const auto &reg = default_registry();
  Rng rng(29);
  const std::vector<MultiIndex> ws = {MultiIndex(0, 0, 0, 0), MultiIndex(1, 0, 0, 0),
                                      MultiIndex(2, 0, 0, 0), MultiIndex(1, 1, 0, 0),
                                      MultiIndex(3, 0, 0, 0), MultiIndex(2, 1, 0, 0),
                                      MultiIndex(1, 1, 1, 0)};
  for (bool half : {false, true}) {
    const auto &K = half ? reg.Kw_prime : reg.Kw;
    for (const auto &w : ws) {
      const int order = w.order();
      for (int it = 0; it < 400; ++it) {
        const double lam = std::exp(rng.uniform(std::log(0.05), std::log(30.0)));
        const FlowScales s(lam, 1e6, 1.0);
        const double kappa = s.kappa();
        const double pnorm = order == 0 ? kappa * rng.uniform(0.0, 5.0)
                                        : kappa * std::exp(rng.uniform(0.0, std::log(40.0)));
        FourMomentum dir;
        for (int mu = 0; mu < 4; ++mu)
          dir[mu] = rng.normal();
        const double dn = dir.norm();
        FourMomentum p = dir * (pnorm / dn);
        const double lhs =
            (2.0 / (lam * lam * lam)) * std::abs(regulator_momentum_derivative(p, s, w, half));
        const double rhs = K[order] / (kappa * kappa * kappa) /
                           std::pow(std::max(kappa, pnorm), double(order));
        CHECK(lhs <= rhs * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("scaling inequality for momenta")
{
  // |x+y| >= |x| implies |lambda x + y| >= lambda |x|
  Rng rng(31);
  int applicable = 0;
  for (int it = 0; it < 20000; ++it) {
    FourMomentum x, y;
    for (int mu = 0; mu < 4; ++mu) {
      x[mu] = rng.normal();
      y[mu] = rng.normal() * std::exp(rng.uniform(-1.5, 1.5));
    }
    const double lambda = rng.uniform();
    if ((x + y).norm() < x.norm()) continue;
    ++applicable;
    CHECK((x * lambda + y).norm() >= lambda * x.norm() - 1e-12 * std::max(1.0, x.norm()));
  }
  CHECK(applicable > 5000);
}
