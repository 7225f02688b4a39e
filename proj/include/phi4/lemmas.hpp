#pragma once

// standard library
#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <phi4/bigint.hpp>
#include <phi4/common.hpp>
#include <phi4/constants.hpp>
#include <phi4/quadrature.hpp>

namespace phi4
{
  /// Outcome of one verified claim inside a lemma.
  struct CertClaim {
    std::string name;
    double claimed = 0.0;
    double computed = 0.0;
    double ratio = 0.0; // computed / claimed where meaningful
    bool pass = false;
    std::string note;
  };

  /// Outcome of a lemma / constant verification.
  struct CertReport {
    std::string id;
    std::string domain;
    std::vector<CertClaim> claims;
    bool pass = true;

    void add(CertClaim c)
    {
      pass = pass && c.pass;
      claims.push_back(std::move(c));
    }
  };

  namespace detail
  {
    /// coarse grid then golden-section refinement to ~1e-12 relative
    inline std::pair<double, double> maximize_1d(const std::function<double(double)> &f, double a,
                                                 double b, int grid = 10000)
    {
      double best_x = a, best = f(a);
      for (int i = 1; i <= grid; ++i) {
        const double x = a + (b - a) * i / grid;
        const double v = f(x);
        if (v > best) {
          best = v;
          best_x = x;
        }
      }
      double lo = std::max(a, best_x - (b - a) / grid);
      double hi = std::min(b, best_x + (b - a) / grid);
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      double f1 = f(x1), f2 = f(x2);
      for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
        if (f1 < f2) {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + gr * (hi - lo);
          f2 = f(x2);
        } else {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - gr * (hi - lo);
          f1 = f(x1);
        }
      }
      const double xm = 0.5 * (lo + hi);
      return {xm, std::max(std::max(f1, f2), f(xm))};
    }

    inline uint64_t lcm_range(uint64_t n)
    {
      auto gcd_u64 = [](uint64_t a, uint64_t b) {
        while (b) {
          const uint64_t t = a % b;
          a = b;
          b = t;
        }
        return a;
      };
      uint64_t l = 1;
      for (uint64_t k = 2; k <= n; ++k)
        l = l / gcd_u64(l, k) * k;
      return l;
    }

    inline std::vector<double> log_grid(double lo, double hi, int n)
    {
      std::vector<double> g(n);
      for (int i = 0; i < n; ++i)
        g[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
      return g;
    }

    inline double sqrt_factorial(int r)
    {
      return std::exp(0.5 * std::lgamma(r + 1.0));
    }
  } // namespace detail

  // ===================================================================
  // Lemma 1: convolution sums of 1/(l+1)^2 and 1/n^3 weights
  // ===================================================================

  inline CertReport verify_lemma1(int exact_max = 30, int float_max = 200)
  {
    CertReport rep;
    rep.id = "lemma1";
    rep.domain = "exact rationals to " + std::to_string(exact_max) + ", float to " +
                 std::to_string(float_max);

    const BigUInt Q(detail::lcm_range(exact_max + 1));
    const BigUInt Q2 = Q * Q;
    const BigUInt Q4 = Q2 * Q2;
    const BigUInt Q6 = Q4 * Q2;

    bool a_full = true, a_restricted = true, b_full = true, b_restricted = true;
    for (int l = 0; l <= exact_max; ++l) {
      BigUInt s_full(0), s_res(0);
      for (int l1 = 0; l1 <= l; ++l1) {
        const int l2 = l - l1;
        BigUInt q1 = Q;
        q1.divmod_u64(l1 + 1);
        BigUInt q2 = Q;
        q2.divmod_u64(l2 + 1);
        const BigUInt term = (q1 * q1) * (q2 * q2);
        s_full += term;
        if (l1 >= 1 && l2 >= 1) s_res += term;
      }
      BigUInt lhs = s_full;
      lhs *= static_cast<uint64_t>((l + 1)) * (l + 1);
      BigUInt rhs = Q4;
      rhs *= 5;
      a_full = a_full && (lhs <= rhs);
      BigUInt lhs2 = s_res;
      lhs2 *= static_cast<uint64_t>((l + 1)) * (l + 1);
      BigUInt rhs2 = Q4;
      rhs2 *= 3;
      a_restricted = a_restricted && (lhs2 <= rhs2);
    }
    for (int n = 1; n <= exact_max; ++n) {
      BigUInt s_full(0), s_res(0);
      for (int n1 = 1; n1 <= n; ++n1) {
        const int n2 = n + 1 - n1;
        if (n2 < 1) continue;
        BigUInt q1 = Q;
        q1.divmod_u64(n1);
        BigUInt q2 = Q;
        q2.divmod_u64(n2);
        const BigUInt term = (q1 * q1 * q1) * (q2 * q2 * q2);
        s_full += term;
        if (n1 >= 2 && n2 >= 2) s_res += term;
      }
      const uint64_t n3 = uint64_t(n) * n * n;
      BigUInt lhs = s_full;
      lhs *= n3;
      BigUInt rhs = Q6;
      rhs *= 4;
      b_full = b_full && (lhs <= rhs);
      BigUInt lhs2 = s_res;
      lhs2 *= n3;
      BigUInt rhs2 = Q6;
      rhs2 *= 2;
      b_restricted = b_restricted && (lhs2 <= rhs2);
    }
    rep.add({"sum 1/((l1+1)(l2+1))^2 <= 5/(l+1)^2 (exact)", 5.0, 0.0, 0.0, a_full, ""});
    rep.add({"restricted l1,l2>=1 variant <= 3/(l+1)^2 (exact)", 3.0, 0.0, 0.0, a_restricted, ""});
    rep.add({"sum 1/(n1 n2)^3 <= 4/n^3 (exact)", 4.0, 0.0, 0.0, b_full, ""});
    rep.add({"restricted n1,n2>=2 variant <= 2/n^3 (exact)", 2.0, 0.0, 0.0, b_restricted, ""});

    // floating-point sweep to float_max, recording the worst ratio
    double worst_a = 0.0, worst_b = 0.0;
    for (int l = 0; l <= float_max; ++l) {
      double s = 0.0;
      for (int l1 = 0; l1 <= l; ++l1)
        s += 1.0 / ((l1 + 1.0) * (l1 + 1.0) * (l - l1 + 1.0) * (l - l1 + 1.0));
      worst_a = std::max(worst_a, s * (l + 1.0) * (l + 1.0) / 5.0);
    }
    for (int n = 1; n <= float_max; ++n) {
      double s = 0.0;
      for (int n1 = 1; n1 <= n; ++n1) {
        const double n2 = n + 1.0 - n1;
        s += 1.0 / (double(n1) * n1 * n1 * n2 * n2 * n2);
      }
      worst_b = std::max(worst_b, s * double(n) * n * n / 4.0);
    }
    rep.add({"float sweep a) worst LHS/RHS", 1.0, worst_a, worst_a, worst_a <= 1.0, ""});
    rep.add({"float sweep b) worst LHS/RHS", 1.0, worst_b, worst_b, worst_b <= 1.0, ""});
    return rep;
  }

  // ===================================================================
  // Lemma 2: factorial-ratio sums, exact big-integer arithmetic
  // ===================================================================

  inline CertReport verify_lemma2(int n_max = 30, int l_max = 30, int inner_nl_max = 120,
                                  const ConstantRegistry &reg = default_registry())
  {
    CertReport rep;
    rep.id = "lemma2";
    rep.domain = "exact, n <= " + std::to_string(n_max) + ", l <= " + std::to_string(l_max) +
                 "; inner identities to n+l <= " + std::to_string(inner_nl_max);

    const int cap = std::max(n_max, l_max) + 1;
    const BigUInt Q(detail::lcm_range(cap));
    const BigUInt Q2 = Q * Q;
    const BigUInt Q4 = Q2 * Q2;
    const BigUInt Q8 = Q4 * Q4;

    std::vector<BigUInt> fact(n_max + l_max + 2);
    fact[0] = BigUInt(1);
    for (std::size_t k = 1; k < fact.size(); ++k) {
      fact[k] = fact[k - 1];
      fact[k] *= k;
    }

    // binomial prefix sums per lambda row (u64: sums <= 2^l_max)
    std::vector<std::vector<uint64_t>> prefix(l_max + 1);
    for (int lam = 0; lam <= l_max; ++lam) {
      prefix[lam].resize(lam + 2, 0);
      uint64_t c = 1;
      for (int j = 0; j <= lam; ++j) {
        prefix[lam][j + 1] = prefix[lam][j] + c;
        c = c * (lam - j) / (j + 1);
      }
    }
    auto lambda_sum = [&](int lam, int l1, int l2) -> uint64_t {
      const int lo = std::max(0, lam - l2);
      const int hi = std::min(lam, l1);
      if (lo > hi) return 0;
      return prefix[lam][hi + 1] - prefix[lam][lo];
    };
    auto binom_u64 = [](int n, int k) -> uint64_t {
      if (k < 0 || k > n) return 0;
      uint64_t r = 1;
      k = std::min(k, n - k);
      for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
      return r;
    };

    bool pass_a = true, pass_a_half = true, pass_b = true, pass_c = true;
    struct Worst {
      double ratio = 0.0;
    } wa, wah, wb, wc;

    // registry constants as exact fractions for the cross-multiplied compare
    const uint64_t k0_num = static_cast<uint64_t>(std::llround(reg.K0 * 1e6));
    const uint64_t k0pp_num = static_cast<uint64_t>(std::llround(reg.K0_dprime * 1e6));
    const uint64_t k0p_num = 135, k0p_den = 64;

    std::vector<int> ns;
    for (int n = 2; n <= n_max; ++n)
      ns.push_back(n);
    std::vector<std::array<bool, 4>> ok(ns.size(), {true, true, true, true});
    std::vector<std::array<double, 4>> worst(ns.size(), {0, 0, 0, 0});

    parallel_for(ns.size(), [&](std::size_t in) {
      const int n = ns[in];
      for (int l = 0; l <= l_max; ++l) {
        // scaled per-(l1,n1) factors
        struct Entry {
          int l1, n1;
          BigUInt value; // C(n+1,n1) (n1+l1-1)! (n2+l2-1)! Q^8/d
        };
        std::vector<Entry> entries;
        entries.reserve((l + 1) * n);
        for (int l1 = 0; l1 <= l; ++l1) {
          const int l2 = l - l1;
          for (int n1 = 1; n1 <= n; ++n1) {
            const int n2 = n + 1 - n1;
            if (n2 < 1) continue;
            BigUInt v = Q8;
            uint64_t rem = 0;
            rem = v.divmod_u64(uint64_t(l1 + 1) * (l1 + 1));
            rem |= v.divmod_u64(uint64_t(l2 + 1) * (l2 + 1));
            rem |= v.divmod_u64(uint64_t(n1) * n1);
            rem |= v.divmod_u64(uint64_t(n2) * n2);
            if (rem != 0) throw domain_error("lemma2: scaling not exact");
            v = v * fact[n1 + l1 - 1];
            v = v * fact[n2 + l2 - 1];
            v *= binom_u64(n + 1, n1);
            entries.push_back({l1, n1, std::move(v)});
          }
        }
        BigUInt scale = Q8 * fact[n + l - 1];
        scale *= (n + 1);
        const uint64_t lf = uint64_t(l + 1) * (l + 1) * uint64_t(n) * n;

        for (int lam = 0; lam <= l; ++lam) {
          BigUInt s_full(0), s_half(0), s_b(0), s_c(0);
          for (const auto &e : entries) {
            const uint64_t sl = lambda_sum(lam, e.l1, l - e.l1);
            if (sl == 0) continue;
            BigUInt t = e.value;
            t *= sl;
            const int n2 = n + 1 - e.n1;
            if (n >= 3) s_full += t;
            if (n >= 3 && e.n1 >= 2 && n2 >= 2) s_half += t;
            if (n >= 3 && e.n1 == 2) s_b += t;
            if (e.n1 == 1) s_c += t;
          }
          auto check = [&](const BigUInt &lhs, uint64_t num, uint64_t den, bool &flag,
                           double &w) {
            // claimed constants enter the exact compare as num/den
            BigUInt L = lhs;
            L *= lf;
            L *= den;
            BigUInt R = scale;
            R *= num;
            if (!(L <= R)) flag = false;
            const double ratio = L.to_double() / R.to_double();
            w = std::max(w, ratio);
          };
          if (n >= 3) {
            check(s_full, k0_num, 1000000, ok[in][0], worst[in][0]);
            check(s_half, k0_num, 2000000, ok[in][1], worst[in][1]);
            check(s_b, k0p_num, k0p_den, ok[in][2], worst[in][2]);
          }
          check(s_c, k0pp_num, 1000000, ok[in][3], worst[in][3]);
        }
      }
    });
    double wa_r = 0, wah_r = 0, wb_r = 0, wc_r = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      pass_a &= ok[i][0];
      pass_a_half &= ok[i][1];
      pass_b &= ok[i][2];
      pass_c &= ok[i][3];
      wa_r = std::max(wa_r, worst[i][0]);
      wah_r = std::max(wah_r, worst[i][1]);
      wb_r = std::max(wb_r, worst[i][2]);
      wc_r = std::max(wc_r, worst[i][3]);
    }
    (void)wa;
    (void)wah;
    (void)wb;
    (void)wc;
    rep.add({"quadruple sum <= K0/((l+1)^2 n^2), K0 = 20", reg.K0, wa_r * reg.K0, wa_r, pass_a, ""});
    rep.add({"n1,n2 >= 2 variant <= K0/2", reg.K0 / 2, wah_r * reg.K0 / 2, wah_r, pass_a_half, ""});
    rep.add({"n1 = 2 case <= K0' = 135/64", 135.0 / 64.0, wb_r * 135.0 / 64.0, wb_r, pass_b, ""});
    rep.add({"n1 = 1 case <= K0'' = 5", reg.K0_dprime, wc_r * reg.K0_dprime, wc_r, pass_c, ""});

    // inner identity (b): C(n-1,n1-1) C(l,l1) <= C(n+l-1, n1+l1-1), exact
    {
      std::vector<std::vector<BigUInt>> pascal(inner_nl_max + 1);
      for (int r = 0; r <= inner_nl_max; ++r) {
        pascal[r].resize(r + 1);
        pascal[r][0] = BigUInt(1);
        pascal[r][r] = BigUInt(1);
        for (int c = 1; c < r; ++c)
          pascal[r][c] = pascal[r - 1][c - 1] + pascal[r - 1][c];
      }
      bool okb = true;
      for (int n = 1; n <= inner_nl_max && okb; ++n)
        for (int l = 0; n + l <= inner_nl_max && okb; ++l)
          for (int n1 = 1; n1 <= n && okb; ++n1)
            for (int l1 = 0; l1 <= l; ++l1) {
              const BigUInt lhs = pascal[n - 1][n1 - 1] * pascal[l][l1];
              const BigUInt &rhs = pascal[n + l - 1][n1 + l1 - 1];
              if (!(lhs <= rhs)) {
                okb = false;
                break;
              }
            }
      rep.add({"C(n-1,n1-1) C(l,l1) <= C(n+l-1,n1+l1-1), n+l <= " + std::to_string(inner_nl_max),
               1.0, okb ? 1.0 : 0.0, okb ? 1.0 : 0.0, okb, "exact integers"});
    }

    // inner identity (c): sum of binomials <= C(l,l1), exact to l = inner_nl_max
    {
      const int lcap = inner_nl_max;
      std::vector<std::vector<BigUInt>> pas(lcap + 1);
      std::vector<std::vector<BigUInt>> prefix(lcap + 1);
      for (int r = 0; r <= lcap; ++r) {
        pas[r].resize(r + 1, BigUInt(1));
        for (int c = 1; c < r; ++c)
          pas[r][c] = pas[r - 1][c - 1] + pas[r - 1][c];
        prefix[r].resize(r + 2, BigUInt(0));
        for (int c = 0; c <= r; ++c)
          prefix[r][c + 1] = prefix[r][c] + pas[r][c];
      }
      bool okc = true;
      for (int l = 0; l <= lcap && okc; ++l)
        for (int l1 = 0; l1 <= l && okc; ++l1) {
          const int l2 = l - l1;
          for (int lam = 0; lam <= l; ++lam) {
            const int lo = std::max(0, lam - l2);
            const int hi = std::min(lam, l1);
            if (lo > hi) continue;
            const BigUInt s = prefix[lam][hi + 1] - prefix[lam][lo];
            if (!(s <= pas[l][l1])) {
              okc = false;
              break;
            }
          }
        }
      rep.add({"sum_{lam1+lam2=lam} lam!/(lam1! lam2!) <= C(l,l1), l <= " +
                   std::to_string(lcap),
               1.0, okc ? 1.0 : 0.0, okc ? 1.0 : 0.0, okc, "exact integers"});
    }
    return rep;
  }

  // ===================================================================
  // Lemma 3: Gaussian shift inequality, constants c(v)
  // ===================================================================

  inline CertReport verify_lemma3(uint64_t seed = 20260808, std::size_t random_draws = 1000000,
                                  const ConstantRegistry &reg = default_registry())
  {
    CertReport rep;
    rep.id = "lemma3";
    rep.domain = "collinear reduction (separable 1D maximization) + " +
                 std::to_string(random_draws) + " random 4D draws";

    // Collinear reduction. The product over i factorizes at fixed |x|, so the
    // worst collinear configuration is sup_x e^{-x^2/2} M(x)^v with
    // M(x) = sup_alpha sup(1,|alpha|)/sup(1,|x-alpha|).
    auto M = [&](double x) {
      auto h = [&](double alpha) {
        return std::max(1.0, std::abs(alpha)) / std::max(1.0, std::abs(x - alpha));
      };
      return detail::maximize_1d(h, -2.0 * x - 8.0, 2.0 * x + 8.0, 4000).second;
    };
    for (int v = 0; v <= 3; ++v) {
      auto f = [&](double x) { return std::exp(-0.5 * x * x) * std::pow(M(x), v); };
      const auto [xm, sup] = detail::maximize_1d(f, 0.0, 8.0, 2000);
      CertClaim c;
      c.name = "collinear sup e^{-x^2/2} M(x)^" + std::to_string(v);
      c.claimed = reg.c[v];
      c.computed = sup;
      c.ratio = sup / reg.c[v];
      c.pass = sup <= reg.c[v] * (1.0 + 1e-9) && sup >= 0.9 * reg.c[v];
      if (v == 3) c.note = "maximum near |x| = (sqrt(13)-1)/2 = " + std::to_string(xm);
      rep.add(std::move(c));
    }

    // falsification sweep: random x, a_i with mixed scales
    Rng rng(seed);
    bool ok = true;
    double worst = 0.0;
    for (std::size_t d = 0; d < random_draws; ++d) {
      auto draw = [&](Rng &r) {
        const double scale = std::exp(r.uniform(-2.3, 2.3));
        std::array<double, 4> v;
        for (auto &c : v)
          c = scale * r.normal();
        return v;
      };
      const auto xv = draw(rng);
      const int v = 1 + static_cast<int>(rng.uniform() * 3.0);
      const double x2 = xv[0] * xv[0] + xv[1] * xv[1] + xv[2] * xv[2] + xv[3] * xv[3];
      double lhs = std::exp(-0.5 * x2);
      double rhs = reg.c[std::min(v, 3)];
      for (int i = 0; i < v; ++i) {
        const auto av = draw(rng);
        double xa2 = 0.0, a2 = 0.0;
        for (int mu = 0; mu < 4; ++mu) {
          xa2 += (xv[mu] + av[mu]) * (xv[mu] + av[mu]);
          a2 += av[mu] * av[mu];
        }
        lhs /= std::max(1.0, std::sqrt(xa2));
        rhs /= std::max(1.0, std::sqrt(a2));
      }
      worst = std::max(worst, lhs / rhs);
      if (lhs > rhs * (1.0 + 1e-12)) {
        ok = false;
        break;
      }
    }
    rep.add({"random 4D falsification sweep, worst LHS/RHS", 1.0, worst, worst, ok, ""});
    return rep;
  }

  // ===================================================================
  // Lemma 4: Gaussian log-moment bound, measure (2pi)^-4 d^4x
  // ===================================================================

  inline CertReport verify_lemma4(int r_max = 40, const ConstantRegistry & = default_registry())
  {
    CertReport rep;
    rep.id = "lemma4";
    rep.domain = "r <= " + std::to_string(r_max) + ", a in {0} + log grid to 1e4";

    std::vector<double> agrid = {0.0};
    for (double a : detail::log_grid(1e-2, 1e4, 25))
      agrid.push_back(a);

    // radial form of the normalized measure: (1/(8 pi^2)) int rho^3 ... drho
    auto lhs = [&](int r, double a) {
      auto f = [&](double rho) {
        return rho * rho * rho * std::exp(-0.5 * rho * rho) *
               std::pow(std::log(rho + a), double(r));
      };
      // split at the log zero rho + a = 1 to keep panels sign-definite
      const double cut = std::clamp(1.0 - a, 0.0, 1.0);
      double v = 0.0;
      if (cut > 0.0) v += integrate_adaptive(f, 0.0, cut, 1e-11).value;
      v += integrate_adaptive(f, cut, 40.0, 1e-11).value;
      return v / (8.0 * pi * pi);
    };
    auto rhs = [&](int r, double a) {
      const double logp = a > 1.0 ? std::log(a) : 0.0;
      return 0.25 * std::pow(logp, double(r)) + detail::sqrt_factorial(r) / 3.0;
    };

    bool ok = true;
    double worst = 0.0, tightest = std::numeric_limits<double>::infinity();
    std::vector<double> worst_per_r(r_max + 1, 0.0);
    parallel_for(r_max + 1, [&](std::size_t r) {
      double w = 0.0;
      for (double a : agrid) {
        const double L = lhs(static_cast<int>(r), a);
        const double R = rhs(static_cast<int>(r), a);
        w = std::max(w, L / R);
      }
      worst_per_r[r] = w;
    });
    for (double w : worst_per_r) {
      worst = std::max(worst, w);
      tightest = std::min(tightest, 1.0 / w);
      if (w > 1.0 + 1e-9) ok = false;
    }
    rep.add({"int_x e^{-x^2/2} log^r(|x|+a) <= 1/4 log_+^r a + (r!)^{1/2}/3", 1.0, worst, worst,
             ok, "worst LHS/RHS over sweep"});
    rep.add({"bound non-vacuous: min RHS/LHS over sweep (recorded)", 10.0, tightest,
             tightest / 10.0, true, "informational"});

    // sup_r log^r r / sqrt(r!) = 2.75 attained at r = 15
    double best = 0.0;
    int best_r = 0;
    for (int r = 2; r <= 200; ++r) {
      const double v = std::exp(r * std::log(std::log(double(r))) - 0.5 * std::lgamma(r + 1.0));
      if (v > best) {
        best = v;
        best_r = r;
      }
    }
    rep.add({"sup_r log^r r / (r!)^{1/2} <= 2.75", 2.75, best, best / 2.75,
             best <= 2.75 && best_r == 15, "max at r = " + std::to_string(best_r)});

    // composite constant K3 = 1/3 used downstream:
    // int_x e^{-x^2/2} log^lam(sup(|x|+a, b)) <= K3 (log^lam sup(a,b) + sqrt(lam!))
    // via 1/(4 pi^2) + 1/4 <= 1/3 and the lemma itself
    const double meas = 1.0 / (4.0 * pi * pi);
    rep.add({"1/(4 pi^2) + 1/4 <= 1/3", 1.0 / 3.0, meas + 0.25, (meas + 0.25) * 3.0,
             meas + 0.25 <= 1.0 / 3.0, ""});
    {
      bool okc = true;
      double w = 0.0;
      for (int lam : {0, 1, 2, 3, 5, 8, 12, 20}) {
        for (double a : {0.0, 0.5, 2.0, 30.0, 1e3}) {
          for (double b : {1.0, 3.0, 50.0, 1e3}) {
            auto f = [&](double rho) {
              return rho * rho * rho * std::exp(-0.5 * rho * rho) *
                     std::pow(std::log(std::max(rho + a, b)), double(lam));
            };
            const double L = integrate_adaptive(f, 0.0, 40.0, 1e-11).value / (8.0 * pi * pi);
            const double R = (std::pow(std::log(std::max(std::max(a, b), 1.0)), double(lam)) +
                              detail::sqrt_factorial(lam)) /
                             3.0;
            w = std::max(w, L / R);
            okc = okc && L <= R * (1.0 + 1e-9);
          }
        }
      }
      rep.add({"composite K3 bound, worst LHS/RHS", 1.0, w, w, okc, "K3 = 1/3"});
    }
    return rep;
  }

  // ===================================================================
  // Lemma 5: kappa'-integral bound with factor 3
  // ===================================================================

  inline CertReport verify_lemma5()
  {
    CertReport rep;
    rep.id = "lemma5";
    rep.domain = "s in 1..6, grids in a, kappa, M, l <= 20 (m = 1)";

    struct Point {
      int s, l;
      double a, kappa, M;
    };
    std::vector<Point> pts;
    for (int s = 1; s <= 6; ++s)
      for (double a : {0.01, 0.1, 1.0, 5.0, 20.0, 200.0})
        for (double kappa : {1.0, 1.5, 3.0, 10.0, 50.0})
          for (double Mfac : {1.2, 3.0, 30.0})
            for (int l : {0, 1, 2, 5, 20})
              pts.push_back({s, l, a, kappa, kappa * Mfac});

    std::vector<double> ratios(pts.size(), 0.0);
    parallel_for(pts.size(), [&](std::size_t i) {
      const auto &pt = pts[i];
      double lhs = 0.0, rhs_sum = 0.0, fac = 1.0;
      for (int lam = 0; lam <= pt.l; ++lam) {
        if (lam > 0) fac *= 2.0 * lam;
        auto f = [&](double kp) {
          return std::pow(kp, -pt.s - 1.0) *
                 std::pow(std::log(std::max(pt.a / kp, kp)), double(lam));
        };
        // split at the kink kp = sqrt(a) of sup(a/kp, kp) when inside range
        const double kink = std::sqrt(pt.a);
        double I = 0.0;
        if (kink > pt.kappa && kink < pt.M) {
          I = integrate_adaptive(f, pt.kappa, kink, 1e-11).value +
              integrate_adaptive(f, kink, pt.M, 1e-11).value;
        } else {
          I = integrate_adaptive(f, pt.kappa, pt.M, 1e-11).value;
        }
        lhs += I / fac;
        rhs_sum += std::pow(std::log(std::max(pt.a / pt.kappa, pt.kappa)), double(lam)) / fac;
      }
      const double rhs = 3.0 * std::pow(pt.kappa, -double(pt.s)) / pt.s * rhs_sum;
      ratios[i] = lhs / rhs;
    });
    double worst = 0.0;
    for (double r : ratios)
      worst = std::max(worst, r);
    rep.add({"sum_lam int kappa'^{-s-1} log^lam <= 3 kappa^{-s}/s sum_lam log^lam", 1.0, worst,
             worst, worst <= 1.0 + 1e-9, "worst LHS/RHS"});
    return rep;
  }

  // ===================================================================
  // Lemma 6: regulator sup constants
  // ===================================================================

  inline CertReport verify_lemma6_constants(const ConstantRegistry &reg = default_registry())
  {
    CertReport rep;
    rep.id = "lemma6";
    rep.domain = "1D/2D suprema of the defining expressions, grid + golden refinement";

    auto band = [&](const std::string &name, double claimed, double computed,
                    const std::string &note = "") {
      CertClaim c;
      c.name = name;
      c.claimed = claimed;
      c.computed = computed;
      c.ratio = computed / claimed;
      c.pass = computed <= claimed * (1.0 + 1e-9) && computed >= 0.9 * claimed;
      c.note = note;
      rep.add(std::move(c));
    };

    const auto sup_y3 = detail::maximize_1d(
        [](double y) { return std::pow(1.0 + y, 3) * std::exp(-y * y); }, 0.0, 6.0);

    // K2 = 2 sup (1+x)^3 e^{-x^2}
    band("K2 = 2 sup (1+x)^3 e^{-x^2}", reg.K2, 2.0 * sup_y3.second,
         "max at x = " + std::to_string(sup_y3.first) + " ~ (sqrt(7)-1)/2");

    // closed-form sups entering (p) and (astx)
    auto ident = [&](const std::string &name, double claimed, double computed) {
      CertClaim c;
      c.name = name;
      c.claimed = claimed;
      c.computed = computed;
      c.ratio = computed / claimed;
      c.pass = std::abs(computed - claimed) <= 1e-9 * claimed;
      rep.add(std::move(c));
    };
    ident("sup x^2 e^{-x^2/2} = 2/e",
          2.0 / std::exp(1.0),
          detail::maximize_1d([](double x) { return x * x * std::exp(-0.5 * x * x); }, 0.0, 8.0)
              .second);
    ident("sup x e^{-x^2/2} = e^{-1/2}", std::exp(-0.5),
          detail::maximize_1d([](double x) { return x * std::exp(-0.5 * x * x); }, 0.0, 8.0)
              .second);
    ident("sup x^3 e^{-x^2/2} = (3/e)^{3/2}", std::pow(3.0 / std::exp(1.0), 1.5),
          detail::maximize_1d([](double x) { return x * x * x * std::exp(-0.5 * x * x); }, 0.0,
                              8.0)
              .second);

    // momentum-derivative constants from their branch expressions
    band("K^(1) = 2 K2 / e", reg.Kw[1], 2.0 * reg.K2 / std::exp(1.0), "defining identity");
    band("K'^(1) = 4 K2 / e", reg.Kw_prime[1], 4.0 * reg.K2 / std::exp(1.0),
         "defining identity");

    // K^(2): constrained branch sup over the region |p| >= kappa
    {
      auto inner = [&](double y) {
        auto f = [&](double x) {
          return x * x * std::abs(4 * x * x - 2.0) * std::exp(-x * x) * std::pow(1.0 + y, 3) *
                 std::exp(-y * y);
        };
        return detail::maximize_1d(f, 1.0 + y, 12.0, 2000).second;
      };
      const auto sup = detail::maximize_1d(inner, 0.0, 4.0, 800);
      band("K^(2) = 16 sup_{x >= 1+y} x^2|4x^2-2| e^{-x^2} (1+y)^3 e^{-y^2}", reg.Kw[2],
           16.0 * sup.second, "joint sup on the |p| >= kappa branch");
    }
    // K'^(2): triangle-inequality polynomial (x^4 + x^2), decoupled sups
    {
      const double supx =
          detail::maximize_1d(
              [](double x) { return (std::pow(x, 4) + x * x) * std::exp(-0.5 * x * x); }, 0.0,
              12.0)
              .second;
      band("K'^(2) = 16 sup (x^4+x^2) e^{-x^2/2} sup (1+y)^3 e^{-y^2}", reg.Kw_prime[2],
           16.0 * supx * sup_y3.second, "");
    }
    // K^(3), K'^(3): displayed polynomial |x^6 - (3/2) x^4|
    {
      const double sup_full =
          detail::maximize_1d(
              [](double x) { return std::abs(std::pow(x, 6) - 1.5 * std::pow(x, 4)) * std::exp(-x * x); },
              0.0, 12.0)
              .second;
      const double sup_half =
          detail::maximize_1d(
              [](double x) {
                return std::abs(std::pow(x, 6) - 1.5 * std::pow(x, 4)) * std::exp(-0.5 * x * x);
              },
              0.0, 12.0)
              .second;
      band("K^(3) = 16 sup |x^6-1.5x^4| e^{-x^2} sup (1+y)^3 e^{-y^2}", reg.Kw[3],
           16.0 * sup_full * sup_y3.second, "");
      band("K'^(3) = 16 sup |x^6-1.5x^4| e^{-x^2/2} sup (1+y)^3 e^{-y^2}", reg.Kw_prime[3],
           16.0 * sup_half * sup_y3.second, "");
    }

    // direct grid check of part a): (2/L^3) e^{-m^2/L^2} <= K2/kappa^3
    {
      double worst = 0.0;
      for (double L : detail::log_grid(1e-3, 1e3, 4001)) {
        const double kappa = L + 1.0;
        const double lhs = 2.0 / (L * L * L) * std::exp(-1.0 / (L * L));
        worst = std::max(worst, lhs * kappa * kappa * kappa / reg.K2);
      }
      rep.add({"(2/L^3) e^{-m^2/L^2} <= K2/kappa^3 on log grid", 1.0, worst, worst,
               worst <= 1.0, "Lambda/m in [1e-3, 1e3]"});
    }
    return rep;
  }

  // ===================================================================
  // Lemma 7: flow-integral constants K1, K1'
  // ===================================================================

  inline CertReport verify_lemma7(const ConstantRegistry &reg = default_registry())
  {
    CertReport rep;
    rep.id = "lemma7";
    rep.domain = "lambda <= 20, kappa/m log grid (m = 1); sup expressions";

    const double sup3 = detail::maximize_1d(
                            [](double y) { return std::pow(1.0 + y, 3) * std::exp(-y * y); }, 0.0,
                            6.0)
                            .second;
    const double sup5 = detail::maximize_1d(
                            [](double y) { return std::pow(1.0 + y, 5) * std::exp(-y * y); }, 0.0,
                            6.0)
                            .second;
    {
      CertClaim c;
      c.name = "K1 = K2/2, and sup (1+y)^3 e^{-y^2} <= K1";
      c.claimed = reg.K1;
      c.computed = sup3;
      c.ratio = sup3 / reg.K1;
      c.pass = std::abs(reg.K1 - reg.K2 / 2.0) <= 1e-12 && sup3 <= reg.K1 &&
               sup3 >= 0.9 * reg.K1;
      rep.add(std::move(c));
    }
    {
      CertClaim c;
      c.name = "sup (1+y)^5 e^{-y^2} <= K1'";
      c.claimed = reg.K1_prime;
      c.computed = sup5;
      c.ratio = sup5 / reg.K1_prime;
      // the claimed 14.5 carries ~18% slack over the supremum it caps;
      // the anti-typo band for this constant is [0.8, 1.0]
      c.pass = sup5 <= reg.K1_prime && sup5 >= 0.8 * reg.K1_prime;
      c.note = "validity band [0.80, 1.00] for this constant";
      rep.add(std::move(c));
    }

    // quadrature checks of the two displayed integral bounds
    auto run = [&](int spow, double K, const std::string &name) {
      double worst = 0.0;
      std::vector<double> kappas = detail::log_grid(1.0 + 1e-6, 1e3, 25);
      std::vector<double> worst_k(kappas.size(), 0.0);
      parallel_for(kappas.size(), [&](std::size_t ik) {
        const double kappa = kappas[ik];
        const double Lam = kappa - 1.0;
        for (int lam : {0, 1, 2, 3, 5, 8, 12, 20}) {
          auto f = [&](double Lp) {
            const double kp = Lp + 1.0;
            return std::pow(Lp, -double(spow)) * std::exp(-1.0 / (Lp * Lp)) *
                   std::pow(kp, spow - 1.0) * std::pow(std::log(kp), double(lam));
          };
          const double L = integrate_adaptive(f, 0.0, Lam, 1e-11).value;
          const double R = K * std::pow(std::log(kappa), lam + 1.0) / (lam + 1.0);
          if (R > 0.0) worst_k[ik] = std::max(worst_k[ik], L / R);
        }
      });
      for (double w : worst_k)
        worst = std::max(worst, w);
      rep.add({name, 1.0, worst, worst, worst <= 1.0 + 1e-9, "worst LHS/RHS"});
    };
    run(3, reg.K1, "int L'^{-3} e^{-m^2/L'^2} k'^2 log^lam <= K1 log^{lam+1}/(lam+1)");
    run(5, reg.K1_prime, "int L'^{-5} e^{-m^2/L'^2} k'^4 log^lam <= K1' log^{lam+1}/(lam+1)");
    return rep;
  }

  // ===================================================================
  // Lemma 8: scaling inequality for subsums
  // ===================================================================

  inline CertReport verify_lemma8(uint64_t seed = 20260808, std::size_t samples = 100000)
  {
    CertReport rep;
    rep.id = "lemma8";
    rep.domain = std::to_string(samples) + " seeded samples in d = 4";

    Rng rng(seed);
    bool ok = true;
    std::size_t applicable = 0;
    for (std::size_t it = 0; it < samples; ++it) {
      std::array<double, 4> x, y;
      const double sx = std::exp(rng.uniform(-2.0, 2.0));
      const double sy = std::exp(rng.uniform(-2.0, 2.0));
      for (int mu = 0; mu < 4; ++mu) {
        x[mu] = sx * rng.normal();
        y[mu] = sy * rng.normal();
      }
      const double lambda = rng.uniform();
      double nx = 0, nxy = 0, nlxy = 0;
      for (int mu = 0; mu < 4; ++mu) {
        nx += x[mu] * x[mu];
        nxy += (x[mu] + y[mu]) * (x[mu] + y[mu]);
        nlxy += (lambda * x[mu] + y[mu]) * (lambda * x[mu] + y[mu]);
      }
      nx = std::sqrt(nx);
      nxy = std::sqrt(nxy);
      nlxy = std::sqrt(nlxy);
      if (nxy < nx) continue; // hypothesis fails, nothing to check
      ++applicable;
      const double slack = 1e-12 * std::max(1.0, nx);
      // conclusion plus the underlying triangle-inequality chain
      if (!(nlxy >= lambda * nx - slack)) ok = false;
      if (!(nlxy >= nxy - (1.0 - lambda) * nx - slack)) ok = false;
      if (!(nxy - (1.0 - lambda) * nx >= lambda * nx - slack)) ok = false;
    }
    rep.add({"|x+y| >= |x| implies |lambda x + y| >= lambda |x|", 1.0,
             static_cast<double>(applicable), 1.0, ok,
             std::to_string(applicable) + " applicable draws"});
    return rep;
  }

  /// Full suite in lemma order; reports merged deterministically by id.
  inline std::vector<CertReport> certify_all_lemmas(const ConstantRegistry &reg = default_registry(),
                                                    uint64_t seed = 20260808,
                                                    int lemma_filter = 0)
  {
    std::vector<CertReport> out;
    auto want = [&](int id) { return lemma_filter == 0 || lemma_filter == id; };
    if (want(1)) out.push_back(verify_lemma1());
    if (want(2)) out.push_back(verify_lemma2(30, 30, 120, reg));
    if (want(3)) out.push_back(verify_lemma3(seed, 1000000, reg));
    if (want(4)) out.push_back(verify_lemma4(40, reg));
    if (want(5)) out.push_back(verify_lemma5());
    if (want(6)) out.push_back(verify_lemma6_constants(reg));
    if (want(7)) out.push_back(verify_lemma7(reg));
    if (want(8)) out.push_back(verify_lemma8(seed, 100000));
    return out;
  }
} // namespace phi4
