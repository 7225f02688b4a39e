#include <doctest.h>

#include <cmath>

#include <phi4/bigint.hpp>
#include <phi4/lemmas.hpp>

using namespace phi4;

TEST_CASE("big integers and rationals")
{
  CHECK(big_factorial(20).to_string() == "2432902008176640000");
  CHECK(big_binomial(59, 29).to_double() == doctest::Approx(5.9132290782430086e16).epsilon(1e-12));
  BigRat a(BigUInt(1), BigUInt(3));
  BigRat b(BigUInt(1), BigUInt(6));
  CHECK((a + b).to_double() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(a.compare(b) > 0);
  BigUInt g = BigUInt::gcd(big_factorial(30), big_factorial(28));
  CHECK(g == big_factorial(28));
}

TEST_CASE("lemma 1: convolution sums")
{
  const auto rep = verify_lemma1(30, 200);
  CHECK(rep.pass);
  // direct spot values
  double l2 = 0.0;
  for (int l1 = 0; l1 <= 2; ++l1)
    l2 += 1.0 / ((l1 + 1.0) * (l1 + 1.0) * (3.0 - l1) * (3.0 - l1));
  CHECK(l2 == doctest::Approx(2.0 / 9.0 + 1.0 / 16.0).epsilon(1e-15));
  CHECK(l2 <= 5.0 / 9.0);
  // n = 2: (1,2) and (2,1)
  CHECK(1.0 / 8.0 + 1.0 / 8.0 <= 4.0 / 8.0);
}

TEST_CASE("lemma 2: factorial-ratio sums, exact")
{
  // full acceptance sweep runs in the acceptance suite; a reduced sweep here
  const auto rep = verify_lemma2(12, 12, 60);
  CHECK(rep.pass);

  // independent BigRat evaluation at a small corner against the claim
  for (int n : {3, 4}) {
    for (int l : {0, 1, 2}) {
      for (int lam = 0; lam <= l; ++lam) {
        BigRat sum(0);
        for (int l1 = 0; l1 <= l; ++l1)
          for (int n1 = 1; n1 <= n; ++n1) {
            const int l2 = l - l1, n2 = n + 1 - n1;
            if (n2 < 1) continue;
            for (int lam1 = std::max(0, lam - l2); lam1 <= std::min(lam, l1); ++lam1) {
              const int lam2 = lam - lam1;
              BigUInt num = big_factorial(n) * big_factorial(lam) *
                            big_factorial(n1 + l1 - 1) * big_factorial(n2 + l2 - 1);
              BigUInt den = big_factorial(n1) * big_factorial(n2) * big_factorial(lam1) *
                            big_factorial(lam2) * big_factorial(n + l - 1);
              den *= uint64_t(l1 + 1) * (l1 + 1);
              den *= uint64_t(l2 + 1) * (l2 + 1);
              den *= uint64_t(n1) * n1;
              den *= uint64_t(n2) * n2;
              sum = sum + BigRat(num, den);
            }
          }
        BigRat bound(BigUInt(20), BigUInt(uint64_t(l + 1) * (l + 1) * n * n));
        CHECK(sum.compare(bound) <= 0);
      }
    }
  }
}

TEST_CASE("lemma 3: Gaussian shift constants")
{
  const auto rep = verify_lemma3(20260808, 200000);
  CHECK(rep.pass);
  // v = 0 claim is an identity
  CHECK(rep.claims[0].computed == doctest::Approx(1.0).epsilon(1e-9));
  // v = 3 collinear worst case near (sqrt(13)-1)/2 with value <= 5.25
  CHECK(rep.claims[3].computed <= 5.25);
  CHECK(rep.claims[3].computed >= 5.2);
}

TEST_CASE("lemma 3 determinism under a fixed seed")
{
  const auto a = verify_lemma3(42, 50000);
  const auto b = verify_lemma3(42, 50000);
  REQUIRE(a.claims.size() == b.claims.size());
  for (std::size_t i = 0; i < a.claims.size(); ++i)
    CHECK(a.claims[i].computed == b.claims[i].computed); // bit identical
}

TEST_CASE("lemma 4: Gaussian log moments")
{
  const auto rep = verify_lemma4(20);
  CHECK(rep.pass);
  for (const auto &c : rep.claims) {
    if (c.name.find("sup_r") != std::string::npos) {
      CHECK(c.computed == doctest::Approx(2.708).epsilon(1e-2));
      CHECK(c.note == "max at r = 15");
    }
  }
}

TEST_CASE("lemma 5: flow-scale integral bound")
{
  const auto rep = verify_lemma5();
  CHECK(rep.pass);
}

TEST_CASE("lemma 6: regulator constants within the drift band")
{
  const auto rep = verify_lemma6_constants();
  CHECK(rep.pass);
  for (const auto &c : rep.claims) {
    CHECK(c.pass);
    if (c.name.rfind("K2", 0) == 0) {
      CHECK(c.computed > 5.5);
      CHECK(c.computed <= 6.2);
    }
    if (c.name.rfind("K^(1)", 0) == 0)
      CHECK(c.computed == doctest::Approx(2.0 * 6.2 / std::exp(1.0)).epsilon(1e-12));
  }
}

TEST_CASE("lemma 7: flow integral constants")
{
  const auto rep = verify_lemma7();
  CHECK(rep.pass);
  for (const auto &c : rep.claims)
    if (c.name.find("(1+y)^5") != std::string::npos) {
      CHECK(c.computed <= 14.5);
      CHECK(c.computed == doctest::Approx(12.2452).epsilon(1e-3));
    }
}

TEST_CASE("lemma 8: sampled scaling inequality")
{
  const auto rep = verify_lemma8(20260808, 100000);
  CHECK(rep.pass);
}

TEST_CASE("fault injection: corrupted registry fails certification")
{
  ConstantRegistry reg;
  reg.set("K2", 0.5); // far below the true supremum
  const auto rep = verify_lemma6_constants(reg);
  CHECK(!rep.pass);
}
