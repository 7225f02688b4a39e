#include <doctest.h>

#include <cmath>

#include <phi4/model.hpp>
#include <phi4/oracle.hpp>
#include <phi4/trees.hpp>

using namespace phi4;

namespace
{
  MomentumConfig random_config(Rng &rng, int two_n, double scale = 2.0)
  {
    std::vector<FourMomentum> p(two_n);
    FourMomentum sum{};
    for (int i = 0; i + 1 < two_n; ++i) {
      for (int mu = 0; mu < 4; ++mu)
        p[i][mu] = scale * rng.normal();
      sum = sum + p[i];
    }
    p[two_n - 1] = -sum;
    return MomentumConfig(p);
  }
} // namespace

TEST_CASE("tree level: two and four point")
{
  const FlowScales s(1.0, 50.0, 1.0);
  const double g = 1.7;
  CHECK(tree_cag(MomentumConfig(std::vector<FourMomentum>(2)), s, g) == 0.0);
  Rng rng(5);
  for (int it = 0; it < 10; ++it)
    CHECK(tree_cag(random_config(rng, 4), s, g) == doctest::Approx(g / 24.0).epsilon(1e-15));
  CHECK(tree_graph_enumeration(random_config(rng, 4), s, g) ==
        doctest::Approx(g / 24.0).epsilon(1e-15));
}

TEST_CASE("tree level six point at zero momenta: closed-form value")
{
  // ten channels with C(0) each: -(g^2/720) * 10 * C(0) = -8 (g/4!)^2 C(0)
  const FlowScales s(1.0, 10.0, 1.0);
  const double g = 1.0;
  const double c0 = propagator(0.0, s);
  const double expected = -8.0 * (g / 24.0) * (g / 24.0) * c0;
  MomentumConfig zeros(std::vector<FourMomentum>(6));
  CHECK(tree_cag(zeros, s, g) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(tree_graph_enumeration(zeros, s, g) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("tree recursion matches graph enumeration")
{
  Rng rng(41);
  const double g = 0.8;
  for (int it = 0; it < 60; ++it) {
    const double lam = rng.uniform(0.0, 5.0);
    const FlowScales s(lam, 100.0, 1.0);
    const auto c6 = random_config(rng, 6);
    const double a6 = tree_cag(c6, s, g);
    const double b6 = tree_graph_enumeration(c6, s, g);
    CHECK(a6 == doctest::Approx(b6).epsilon(1e-10));
  }
  for (int it = 0; it < 12; ++it) {
    const double lam = rng.uniform(0.0, 5.0);
    const FlowScales s(lam, 100.0, 1.0);
    const auto c8 = random_config(rng, 8);
    const double a8 = tree_cag(c8, s, g);
    const double b8 = tree_graph_enumeration(c8, s, g);
    CHECK(a8 == doctest::Approx(b8).epsilon(1e-10));
  }
  CHECK_THROWS_AS(tree_graph_enumeration(random_config(rng, 10), FlowScales(1, 10, 1), g),
                  domain_error);
}

TEST_CASE("tadpole oracle")
{
  const double g = 1.0;
  CHECK(tadpole_l1(FlowScales(0.0, 100.0, 1.0), g).value == 0.0);

  double prev = 0.0;
  for (double lam : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    const FlowScales s(lam, 100.0, 1.0);
    const auto r = tadpole_l1(s, g);
    // monotone decreasing (strictly negative integrand)
    CHECK(r.value < prev);
    prev = r.value;
    // unit-coupling value bounded by kappa^2
    CHECK(std::abs(r.value) / (g / 24.0) <= s.kappa() * s.kappa());
    CHECK(r.error_estimate >= 0.0);
    CHECK(r.error_estimate < 1e-8 * std::abs(r.value) + 1e-18);
  }
}

TEST_CASE("bubble oracle basics")
{
  const double g = 1.0;
  const FlowScales s(0.0, 100.0, 1.0);
  // all momenta zero: renormalization point
  CHECK(bubble_l1(make_family("four-point", {0.0, 0.0, 0.0}), s, g).value == doctest::Approx(0.0));

  // channel symmetry under q -> -q
  const auto a = bubble_l1(make_family("four-point", {2.0, 1.0, 0.6}), s, g);
  const auto b = bubble_l1(make_family("four-point", {2.0, 1.0, -0.6}), s, g);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-13));

  // refinement consistency: doubling nodes stays within the error estimate
  const auto coarse = bubble_l1(make_family("four-point", {3.0, 1.0, 0.3}), s, g, 14, 20);
  const auto fine = bubble_l1(make_family("four-point", {3.0, 1.0, 0.3}), s, g, 28, 40);
  CHECK(std::abs(coarse.value - fine.value) <= std::max(coarse.error_estimate, 1e-14));
}

TEST_CASE("bubble oracle: cutoff insensitivity at fixed momenta")
{
  const double g = 1.0;
  for (const auto &params : {std::array<double, 3>{2.0, 1.0, 0.2},
                             std::array<double, 3>{3.0, 2.0, 0.3}}) {
    const auto cfg = make_family("four-point", {params[0], params[1], params[2]});
    const double v100 = bubble_l1(cfg, FlowScales(0.0, 100.0, 1.0), g).value;
    const double v200 = bubble_l1(cfg, FlowScales(0.0, 200.0, 1.0), g).value;
    const double v400 = bubble_l1(cfg, FlowScales(0.0, 400.0, 1.0), g).value;
    CHECK(std::abs(v200 - v100) <= 1e-3 * std::abs(v100));
    CHECK(std::abs(v400 - v100) <= 1e-3 * std::abs(v100));
  }
}
