#include <doctest.h>

#include <cmath>

#include <phi4/chain.hpp>

using namespace phi4;

TEST_CASE("K-tilde multinomial enumeration")
{
  ConstantChain chain;
  // |w| = 0
  CHECK(chain.ktilde_order(0, false) == doctest::Approx(6.2).epsilon(1e-14));
  // single-axis |w| = 3: multiplicities (8, 12, 6, 1)
  CHECK(chain.ktilde_order(3, false) == doctest::Approx(606.8).epsilon(1e-12));
  CHECK(chain.ktilde_order(3, true) == doctest::Approx(1377.0).epsilon(1e-12));
  // mixed multi-indices with the same order agree (trinomial identity)
  CHECK(chain.ktilde(MultiIndex(1, 1, 1, 0), false) ==
        doctest::Approx(chain.ktilde_order(3, false)).epsilon(1e-13));
  CHECK(chain.ktilde(MultiIndex(2, 1, 0, 0), true) ==
        doctest::Approx(chain.ktilde_order(3, true)).epsilon(1e-13));
  CHECK(chain.ktilde(MultiIndex(1, 0, 1, 0), false) ==
        doctest::Approx(chain.ktilde_order(2, false)).epsilon(1e-13));
}

TEST_CASE("constraint evaluation examples")
{
  ConstantChain chain;
  // direct arithmetic at n = 3, l = 1, |w| = 0, K = 100
  CHECK(chain.evaluate_constraint("bdk0", 3, 1, 0, 100.0) ==
        doctest::Approx(0.6103125).epsilon(1e-12));
  // K -> infinity limit
  CHECK(chain.evaluate_constraint("bdk0", 3, 1, 0, 1e12) < 1e-10);
  // the binding record is marginally satisfied at the quoted constant
  const double v = chain.evaluate_constraint("bdke", 3, 1, 3, 6.2e5);
  CHECK(v <= 1.0);
  CHECK(v > 0.95);
  CHECK_THROWS_AS(chain.evaluate_constraint("bdk0", 2, 1, 0, 100.0), domain_error);
  CHECK_THROWS_AS(chain.evaluate_constraint("nosuch", 3, 1, 0, 100.0), domain_error);
}

TEST_CASE("minimal K fixpoint")
{
  ConstantChain chain;
  const auto res = chain.minimal_K();
  CHECK(res.K_star > 5.9e5);
  CHECK(res.K_star < 6.5e5);
  CHECK(res.binding_id == "bdke");
  CHECK(res.n == 3);
  CHECK(res.l == 1);
  CHECK(res.w == 3);
  // every record satisfied at the fixpoint
  for (const auto &row : res.table)
    CHECK(row.implied <= res.K_star * (1.0 + 1e-9));
  // caps guard precondition
  ConstantChain::Options bad;
  bad.n_cap = bad.l_cap = 5;
  CHECK_THROWS_AS(chain.minimal_K(bad), convergence_error);
}

TEST_CASE("argmax of the parameter sweeps")
{
  ConstantChain chain;
  const auto &r = chain.record("bdk0");
  // for |w| = 0 the n-dependent factor is maximized at n = 3
  const auto sup0 = chain.supremum_over_parameters(r, 6.2e5, 50, 50, 0);
  CHECK(sup0.n == 3);
  CHECK(sup0.l == 1);
  // (l+1)^2/l^2 is maximal at l = 1 for every record with an l sweep
  const auto supe = chain.supremum_over_parameters(chain.record("bdke"), 6.2e5, 50, 50);
  CHECK(supe.l == 1);
  CHECK(supe.w == 3);
  const auto sup4 = chain.supremum_over_parameters(chain.record("bdk4"), 6.2e5, 50, 50);
  CHECK(sup4.n == 4);
  CHECK(sup4.l == 1);
}

TEST_CASE("raising a registry constant raises the fixpoint")
{
  ConstantChain base;
  const double k0 = base.minimal_K().K_star;
  ConstantRegistry reg;
  reg.scale("K2", 1.1);
  ConstantChain bumped(reg);
  const double k1 = bumped.minimal_K().K_star;
  CHECK(k1 > k0 * 1.05);
}

TEST_CASE("removing the binding record strictly lowers the fixpoint")
{
  ConstantChain chain;
  const double k0 = chain.minimal_K().K_star;
  ConstantChain::Options opt;
  opt.exclude = {"bdke"};
  const auto ablated = chain.minimal_K(opt);
  CHECK(ablated.K_star < k0 * 0.999);
  CHECK(ablated.binding_id != "bdke");
}

TEST_CASE("fixpoint is invariant under record registration order")
{
  ConstantChain chain;
  ConstantChain::Options fwd, rev;
  rev.reverse_order = true;
  const auto a = chain.minimal_K(fwd);
  const auto b = chain.minimal_K(rev);
  CHECK(a.K_star == b.K_star); // bit identical: sup is commutative
  CHECK(a.binding_id == b.binding_id);
}

TEST_CASE("one registry feeds both the certifier and the chain")
{
  const auto &reg = default_registry();
  ConstantChain chain(reg);
  const auto lhs = chain.registry().as_map();
  const auto rhs = reg.as_map();
  REQUIRE(lhs.size() == rhs.size());
  for (const auto &[name, ptr] : lhs)
    CHECK(*ptr == *rhs.at(name));
  // a perturbed registry flows into every downstream value
  ConstantRegistry bumped = reg;
  bumped.scale("Kw3", 2.0);
  ConstantChain chain2(bumped);
  CHECK(chain2.ktilde_order(3, false) == doctest::Approx(606.8 + 37.0).epsilon(1e-12));
}
