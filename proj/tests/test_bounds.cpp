#include <doctest.h>

#include <cmath>

#include <phi4/bounds.hpp>
#include <phi4/model.hpp>

using namespace phi4;

TEST_CASE("theorem bound: direct substitutions")
{
  BoundParams p;
  p.n = 2;
  p.l = 0;
  p.K = 123.0; // K enters with power zero here
  p.kappa = 1.0;
  p.m = 1.0;
  p.p_sup = 0.5;
  CHECK(theorem_bound(p) == doctest::Approx(1.0).epsilon(1e-15));

  p.n = 3;
  p.l = 1;
  p.K = 2.0;
  p.p_sup = 1.0;
  // kappa^-2 Kt^3/3! 4! (empty log sum) = 4 Kt^3
  CHECK(theorem_bound(p) == doctest::Approx(4.0 * 8.0).epsilon(1e-14));

  // n = 1 prefactor is sup(|p|,kappa)^2 and the sum stops at l-1
  p.n = 1;
  p.l = 1;
  p.p_sup = 3.0;
  p.kappa = 1.0;
  const double expected = 9.0 * std::pow(2.0, 2) / 4.0 * 1.0 * 1.0;
  CHECK(theorem_bound(p) == doctest::Approx(expected).epsilon(1e-14));
  p.l = 0;
  CHECK_THROWS_AS(theorem_bound(p), domain_error);
}

TEST_CASE("proposition bound: direct substitutions")
{
  BoundParams p;
  p.n = 3;
  p.l = 0;
  p.w_order = 0;
  p.K = 7.0;
  p.kappa = 1.0;
  p.m = 1.0;
  p.p_sup = 0.5;
  // kappa^-2 K/(1 3! 27) 2! = K/81
  CHECK(proposition_bound(p, PropositionCase::ManyLegs) ==
        doctest::Approx(7.0 / 81.0).epsilon(1e-14));

  // two-point case: prefactor sup(|p|,kappa)^{2-|w|}, sum to l-2
  p.n = 1;
  p.l = 2;
  p.w_order = 1;
  p.p_sup = 4.0;
  const double expected = std::pow(4.0, 1) * std::pow(7.0, 3) / 9.0 * 2.0 * 1.0 *
                          (1.0 + std::log(4.0));
  CHECK(proposition_bound(p, PropositionCase::TwoPointLowW) ==
        doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(proposition_bound(p, PropositionCase::ManyLegs), domain_error);
}

TEST_CASE("bounds are monotone in the momentum scale")
{
  Rng rng(47);
  for (int it = 0; it < 300; ++it) {
    BoundParams p;
    p.n = 1 + int(rng.uniform() * 4);
    p.l = 1 + int(rng.uniform() * 4);
    p.K = std::exp(rng.uniform(0.0, 10.0));
    p.kappa = std::exp(rng.uniform(0.0, 3.0));
    p.m = 1.0;
    p.w_order = 0;
    p.eta = 0.0;
    const double p1 = std::exp(rng.uniform(-1.0, 4.0));
    const double p2 = p1 * rng.uniform(1.0, 5.0);
    BoundParams q = p;
    p.p_sup = p1;
    q.p_sup = p2;
    if (p.n >= 2) {
      CHECK(theorem_bound(q) >= theorem_bound(p) * (1.0 - 1e-12));
    } else {
      CHECK(theorem_bound(q) >= theorem_bound(p) * (1.0 - 1e-12));
    }
    // spot value at kappa = m: bound at |p| = e kappa strictly exceeds the
    // bound at |p| = kappa once the log argument leaves the sup tie
    BoundParams a = p, b = p;
    a.kappa = b.kappa = 1.0;
    a.p_sup = 1.0;
    b.p_sup = std::exp(1.0);
    CHECK(theorem_bound(b) > theorem_bound(a));
  }
}

TEST_CASE("eta factor: the inf over partner indices dominates")
{
  Rng rng(53);
  for (int it = 0; it < 50; ++it) {
    std::vector<FourMomentum> m(6);
    FourMomentum sum{};
    for (int i = 0; i < 5; ++i) {
      for (int mu = 0; mu < 4; ++mu)
        m[i][mu] = rng.normal();
      sum = sum + m[i];
    }
    m[5] = -sum;
    MomentumConfig cfg(m);
    BoundParams p;
    p.n = 3;
    p.l = 1;
    p.w_order = 2;
    p.K = 100.0;
    p.kappa = 1.3;
    p.m = 1.0;
    p.p_sup = sup_momentum(cfg);
    BoundParams pinf = p;
    pinf.eta = eta_best_partner(cfg, 1);
    const double with_inf = proposition_bound(pinf, PropositionCase::ManyLegs);
    for (int j = 2; j <= 6; ++j) {
      BoundParams pj = p;
      pj.eta = eta(cfg, 1, j);
      CHECK(proposition_bound(pj, PropositionCase::ManyLegs) >= with_inf * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("four-point bound at a vanishing first momentum is the sharper one")
{
  // at |p_vec| > kappa the zero-momentum form (sum to l) stays below the
  // general form (sum to l-1 times 1 + log)
  BoundParams p;
  p.n = 2;
  p.l = 3;
  p.w_order = 0;
  p.K = 10.0;
  p.kappa = 1.0;
  p.m = 1.0;
  for (double ps : {2.0, 5.0, 50.0}) {
    p.p_sup = ps;
    CHECK(proposition_bound(p, PropositionCase::FourPointAtZero) <=
          proposition_bound(p, PropositionCase::FourPoint));
  }
}

TEST_CASE("theorem dominates the four-point proposition in the small-momentum regime")
{
  // spot checks at |p| <= kappa with matching constants
  for (int l : {1, 2, 3}) {
    BoundParams p;
    p.n = 2;
    p.l = l;
    p.K = 6.2e5;
    p.kappa = 2.0;
    p.m = 1.0;
    p.p_sup = 1.5;
    CHECK(theorem_bound(p) >= proposition_bound(p, PropositionCase::FourPoint));
  }
}

TEST_CASE("log growth fit")
{
  // synthetic exact-log data
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i < 12; ++i) {
    const double p = 5.0 * std::pow(12.0, i / 11.0);
    samples.push_back({p, 2.5 + 0.7 * std::log(p / 1.0)});
  }
  auto fit = log_growth_fit(samples, 1.0);
  CHECK(fit.c0 == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(fit.c1 == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(fit.max_rel_residual < 1e-12);

  // constant data fits with zero slope
  for (auto &s : samples)
    s.second = 3.3;
  fit = log_growth_fit(samples, 1.0);
  CHECK(fit.c1 == doctest::Approx(0.0).epsilon(1e-12));

  // insufficient span fails
  std::vector<std::pair<double, double>> narrow;
  for (int i = 0; i < 10; ++i)
    narrow.push_back({5.0 + i * 0.1, 1.0});
  CHECK_THROWS_AS(log_growth_fit(narrow, 1.0), domain_error);
}

TEST_CASE("amplitude checking flags corrupted tables")
{
  SolverConfig cfg = SolverConfig::defaults();
  AmplitudeTable t;
  t.l = 1;
  t.n = 1;
  t.family = "antipodal-pair";
  t.axes = {{0.0, 1.0, 2.0}};
  t.lambda_nodes = {0.0, 1.0, 10.0};
  t.values.assign(9, 1e-4 * cfg.vertex());
  const auto good = check_amplitude(t, cfg, 6.2e5, true);
  CHECK(good.pass);
  CHECK(good.nodes == 9);
  CHECK(good.worst_margin > 1.0);
  // deliberate corruption far beyond any bound
  t.values[4] = 1e40;
  const auto bad = check_amplitude(t, cfg, 6.2e5, true);
  CHECK(!bad.pass);
  CHECK(bad.violations.size() == 1);
  CHECK(bad.worst.lambda == 1.0);
}
