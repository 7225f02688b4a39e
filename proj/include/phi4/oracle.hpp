#pragma once

// standard library
#include <cmath>
#include <string>
#include <vector>

#include <phi4/model.hpp>
#include <phi4/quadrature.hpp>

namespace phi4
{
  /// Result of an independent diagrammatic evaluation.
  struct OracleResult {
    double value = 0.0;
    std::string method;
    double error_estimate = 0.0;
  };

  // ----------------------------------------------------------- tadpole, l=1

  /// Renormalized one-loop two-point function with flow regulator:
  ///   6 (g/4!) int_0^Lambda dL' (-2/L'^3) e^{-m^2/L'^2} L'^4/(16 pi^2),
  /// adaptive 1D quadrature with refinement error estimate.
  inline OracleResult tadpole_l1(const FlowScales &s, double g)
  {
    OracleResult out;
    out.method = "1D-quadrature";
    if (s.lambda == 0.0) return out;
    const double coeff = -12.0 * (g / 24.0) / (16.0 * pi * pi);
    auto integrand = [&](double lp) { return coeff * lp * std::exp(-s.m * s.m / (lp * lp)); };
    auto r = integrate_adaptive(integrand, 0.0, s.lambda, 1e-13);
    out.value = r.value;
    out.error_estimate = r.error;
    return out;
  }

  // ----------------------------------------------------------- bubble, l=1

  namespace detail
  {
    /// Bub(P) - Bub(0) = int_k C(k) [C(k-P) - C(k)] as an integrand-level
    /// difference; radial x angle product rule, panel-doubling error estimate.
    inline double bubble_difference(double P, const FlowScales &s, int n_radial, int n_angle)
    {
      if (P == 0.0) return 0.0;
      const double kmax = 6.0 * s.lambda0 + 2.0 * P;
      const auto &ang = gauss_legendre(n_angle);
      // log-mapped radial variable keeps resolution at k ~ m and k ~ P
      const double r0 = 1e-4 * s.m;
      auto radial_integrand = [&](double u) {
        const double k = r0 * std::expm1(u) + 1e-300;
        const double jac = r0 * std::exp(u); // dk/du
        const double ck = propagator(k * k, s);
        double asum = 0.0;
        for (int ia = 0; ia < n_angle; ++ia) {
          const double theta = 0.5 * pi * (1.0 + ang.x[ia]);
          const double st = std::sin(theta);
          const double kmP = k * k + P * P - 2.0 * k * P * std::cos(theta);
          asum += 0.5 * pi * ang.w[ia] * st * st * (propagator(kmP, s) - ck);
        }
        return k * k * k * ck * asum * jac;
      };
      const double umax = std::log1p(kmax / r0);
      double coarse = 0.0, fine = 0.0;
      const int panels = 24;
      for (int p = 0; p < panels; ++p) {
        const double a = umax * p / panels, b = umax * (p + 1) / panels;
        coarse += integrate_gl(radial_integrand, a, b, n_radial);
        fine += integrate_gl(radial_integrand, a, 0.5 * (a + b), n_radial) +
                integrate_gl(radial_integrand, 0.5 * (a + b), b, n_radial);
      }
      (void)coarse;
      return fine * fourpi_over_2pi4;
    }

    inline double bubble_difference_err(double P, const FlowScales &s, int n_radial, int n_angle)
    {
      const double a = bubble_difference(P, s, n_radial, n_angle);
      const double b = bubble_difference(P, s, 2 * n_radial, 2 * n_angle);
      return std::abs(a - b);
    }
  } // namespace detail

  /// Renormalized one-loop four-point amplitude on the family (p,-p,q,-q),
  /// subtracted at zero momentum so that L_{4,1}(0,0,0) = 0 at Lambda = 0:
  ///   -12 (g/4!)^2 [ dB(|p+q|) + dB(|p-q|) ],  dB(P) = Bub(P) - Bub(0).
  /// Valid at Lambda = 0 where the tadpole leg insertions vanish with the
  /// renormalized two-point function.
  inline OracleResult bubble_l1(const MomentumConfig &config, const FlowScales &s, double g,
                                int n_radial = 20, int n_angle = 32)
  {
    if (config.two_n() != 4)
      throw domain_error("bubble_l1: expects a four-point configuration");
    const FourMomentum &p = config.momenta[0];
    const FourMomentum &q = config.momenta[2];
    const double Pt = (p + q).norm();
    const double Pu = (p - q).norm();
    const double c2 = (g / 24.0) * (g / 24.0);
    OracleResult out;
    out.method = "2D-quadrature";
    out.value = -12.0 * c2 *
                (detail::bubble_difference(Pt, s, n_radial, n_angle) +
                 detail::bubble_difference(Pu, s, n_radial, n_angle));
    out.error_estimate = 12.0 * c2 *
                         (detail::bubble_difference_err(Pt, s, n_radial, n_angle) +
                          detail::bubble_difference_err(Pu, s, n_radial, n_angle));
    return out;
  }

  // ----------------------------------------------------------- tree graphs

  /// Sum over connected tree topologies with phi^4 vertices and regularized
  /// propagators on internal lines; coefficients follow from the generating
  /// functional normalization of the CAG:
  ///   2n=4:  g/4!
  ///   2n=6:  -(g^2/720)  sum over the 10 three-momentum channels of C(q_ch)
  ///   2n=8:  +(g^3/40320) sum over the 280 unordered pairs of disjoint
  ///          three-momentum channels of C(q_B) C(q_D)
  inline double tree_graph_enumeration(const MomentumConfig &config, const FlowScales &s, double g)
  {
    const int two_n = config.two_n();
    const auto &p = config.momenta;
    if (two_n == 2) return 0.0;
    if (two_n == 4) return g / 24.0;
    if (two_n == 6) {
      // channels = 3-subsets containing leg 0 (complement gives the same C)
      double sum = 0.0;
      for (int a = 1; a < 6; ++a)
        for (int b = a + 1; b < 6; ++b) {
          const FourMomentum qch = p[0] + p[a] + p[b];
          sum += propagator(qch.squared(), s);
        }
      return -(g * g / 720.0) * sum;
    }
    if (two_n == 8) {
      // unordered pairs of disjoint triples {B, D}
      double sum = 0.0;
      std::vector<std::array<int, 3>> triples;
      for (int a = 0; a < 8; ++a)
        for (int b = a + 1; b < 8; ++b)
          for (int c = b + 1; c < 8; ++c)
            triples.push_back({a, b, c});
      for (std::size_t i = 0; i < triples.size(); ++i)
        for (std::size_t j = i + 1; j < triples.size(); ++j) {
          const auto &B = triples[i];
          const auto &D = triples[j];
          bool disjoint = true;
          for (int x : B)
            for (int y : D)
              if (x == y) disjoint = false;
          if (!disjoint) continue;
          const FourMomentum qB = p[B[0]] + p[B[1]] + p[B[2]];
          const FourMomentum qD = p[D[0]] + p[D[1]] + p[D[2]];
          sum += propagator(qB.squared(), s) * propagator(qD.squared(), s);
        }
      return (g * g * g / 40320.0) * sum;
    }
    throw domain_error("tree_graph_enumeration: supported leg counts are 4, 6, 8");
  }
} // namespace phi4
