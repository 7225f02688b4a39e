#include <doctest.h>

#include <cmath>

#include <phi4/bigint.hpp>
#include <phi4/common.hpp>
#include <phi4/ode.hpp>
#include <phi4/quadrature.hpp>

using namespace phi4;

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly")
{
  for (int n : {2, 8, 15, 48}) {
    // degree 2n-1 is exact
    const int k = 2 * n - 1;
    const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
    const double got = integrate_gl([&](double x) { return std::pow(x, k); }, -1.0, 1.0, n);
    CHECK(got == doctest::Approx(exact).epsilon(1e-13));
    double wsum = 0.0;
    for (double w : gauss_legendre(n).w)
      wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("adaptive integration handles smooth and spiked integrands")
{
  const auto smooth = integrate_adaptive([](double x) { return std::exp(-x * x); }, 0.0, 10.0);
  CHECK(smooth.value == doctest::Approx(0.5 * std::sqrt(pi)).epsilon(1e-13));

  // narrow interior peak: exp(-((x-0.3)/1e-4)^2)
  const double w = 1e-4;
  const auto spike = integrate_adaptive(
      [&](double x) {
        const double t = (x - 0.3) / w;
        return std::exp(-t * t);
      },
      0.0, 1.0, 1e-10);
  CHECK(spike.value == doctest::Approx(w * std::sqrt(pi)).epsilon(1e-8));
  CHECK(spike.error <= 1e-8 * spike.value + 1e-300);
}

TEST_CASE("Dormand-Prince stepper hits checkpoints and tolerance")
{
  DormandPrince ode;
  ode.rtol = 1e-10;
  std::vector<double> y = {1.0, 0.0};
  std::vector<std::pair<double, std::vector<double>>> seen;
  // harmonic oscillator y'' = -y
  ode.integrate(
      [](double, const std::vector<double> &s, std::vector<double> &d) {
        d[0] = s[1];
        d[1] = -s[0];
      },
      0.0, 2.0 * pi, y, {0.5 * pi, pi, 2.0 * pi},
      [&](double t, const std::vector<double> &s) { seen.push_back({t, s}); });
  REQUIRE(seen.size() == 3);
  CHECK(seen[0].second[0] == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(seen[1].second[0] == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(y[1] == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("deterministic rng substreams")
{
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i)
    CHECK(a.next_u64() == b.next_u64());
  Rng s1 = a.substream(7), s2 = b.substream(7);
  CHECK(s1.uniform() == s2.uniform());
  // normals stay in a sane range and have roughly unit variance
  Rng n(5);
  double sum = 0.0, sq = 0.0;
  const int N = 20000;
  for (int i = 0; i < N; ++i) {
    const double x = n.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / N) < 0.03);
  CHECK(sq / N == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("parallel map is deterministic and propagates errors")
{
  std::vector<double> out(257);
  parallel_for(out.size(), [&](std::size_t i) { out[i] = std::sin(double(i)); });
  for (std::size_t i = 0; i < out.size(); ++i)
    CHECK(out[i] == std::sin(double(i)));
  CHECK_THROWS_AS(parallel_for(8, [](std::size_t i) {
                    if (i == 5) throw domain_error("inner failure");
                  }),
                  domain_error);
}

TEST_CASE("big integer division and gcd stress")
{
  // (a*b)/b == a for large factorials
  BigUInt a = big_factorial(57);
  BigUInt b = big_factorial(31);
  BigUInt prod = a * b;
  BigUInt g = BigUInt::gcd(prod, b);
  CHECK(g == b);
  BigRat r(prod, b);
  CHECK(r.to_double() == doctest::Approx(a.to_double()).epsilon(1e-12));
  // binomial identity C(n,k) = C(n-1,k-1) + C(n-1,k)
  for (int n : {40, 90, 119}) {
    for (int k : {1, 7, n / 2}) {
      BigUInt lhs = big_binomial(n, k);
      BigUInt rhs = big_binomial(n - 1, k - 1) + big_binomial(n - 1, k);
      CHECK(lhs == rhs);
    }
  }
}
