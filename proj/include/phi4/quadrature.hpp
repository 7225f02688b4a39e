#pragma once

// standard library
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include <phi4/common.hpp>

namespace phi4
{
  /// Gauss-Legendre nodes and weights on [-1,1], Newton iteration on the
  /// Legendre recursion.
  struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;

    explicit GaussLegendre(int n)
    {
      x.resize(n);
      w.resize(n);
      const int m = (n + 1) / 2;
      for (int i = 1; i <= m; ++i) {
        double z = std::cos(pi * (i - 0.25) / (n + 0.5));
        double z1, pp;
        do {
          double p1 = 1.0, p2 = 0.0;
          for (int j = 1; j <= n; ++j) {
            const double p3 = p2;
            p2 = p1;
            p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
          }
          pp = n * (z * p1 - p2) / (z * z - 1.0);
          z1 = z;
          z = z1 - p1 / pp;
        } while (std::abs(z - z1) > 1e-15);
        double p1 = 1.0, p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0);
        x[i - 1] = -z;
        x[n - i] = z;
        w[i - 1] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - i] = w[i - 1];
      }
    }
  };

  /// process-wide rule cache
  inline const GaussLegendre &gauss_legendre(int n)
  {
    static std::map<int, GaussLegendre> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, GaussLegendre(n)).first;
    return it->second;
  }

  /// integral over [a,b] with an n-point rule
  template <class F> double integrate_gl(F &&f, double a, double b, int n)
  {
    const auto &rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
      sum += rule.w[i] * f(mid + hw * rule.x[i]);
    return sum * hw;
  }

  /// Adaptive bisection on a 15-point Gauss rule; the error estimate is the
  /// change under one refinement of the worst panel chain.
  struct AdaptiveResult {
    double value = 0.0;
    double error = 0.0;
    int panels = 0;
  };

  namespace detail
  {
    template <class F>
    void adapt_rec(F &f, double a, double b, double whole, double tol_abs, int depth,
                   AdaptiveResult &out)
    {
      const double mid = 0.5 * (a + b);
      const double left = integrate_gl(f, a, mid, 15);
      const double right = integrate_gl(f, mid, b, 15);
      const double delta = left + right - whole;
      if (std::abs(delta) <= tol_abs || depth >= 26) {
        out.value += left + right;
        out.error += std::abs(delta);
        out.panels += 2;
        return;
      }
      adapt_rec(f, a, mid, left, 0.5 * tol_abs, depth + 1, out);
      adapt_rec(f, mid, b, right, 0.5 * tol_abs, depth + 1, out);
    }
  } // namespace detail

  /// Adaptive integral over [a,b]. A coarse composite pass establishes the
  /// tolerance scale (sum of panel magnitudes, immune to cancellation), then
  /// each panel refines adaptively against its share of the budget.
  template <class F>
  AdaptiveResult integrate_adaptive(F &&f, double a, double b, double rel_tol = 1e-12,
                                    double abs_floor = 0.0, int base_panels = 32)
  {
    AdaptiveResult out;
    if (a == b) return out;
    std::vector<double> coarse(base_panels);
    double scale = 0.0;
    for (int i = 0; i < base_panels; ++i) {
      const double x0 = a + (b - a) * i / base_panels;
      const double x1 = a + (b - a) * (i + 1) / base_panels;
      coarse[i] = integrate_gl(f, x0, x1, 15);
      scale += std::abs(coarse[i]);
    }
    const double tol_abs = std::max({abs_floor, rel_tol * scale, 1e-300});
    for (int i = 0; i < base_panels; ++i) {
      const double x0 = a + (b - a) * i / base_panels;
      const double x1 = a + (b - a) * (i + 1) / base_panels;
      detail::adapt_rec(f, x0, x1, coarse[i], tol_abs / base_panels, 0, out);
    }
    return out;
  }
} // namespace phi4
