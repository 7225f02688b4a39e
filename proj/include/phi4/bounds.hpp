#pragma once

// standard library
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <phi4/flow.hpp>
#include <phi4/model.hpp>

namespace phi4
{
  /// Arguments of the Theorem / Proposition right-hand sides.
  struct BoundParams {
    int n = 1;
    int l = 0;
    int w_order = 0;     // |w|
    double K = 0.0;      // K or K-tilde
    double kappa = 1.0;
    double m = 1.0;
    double p_sup = 0.0;  // |p_vec|
    double eta = 0.0;    // sup(kappa, eta)^{-|w|} factor where present
  };

  namespace detail
  {
    inline double log_sum(double x, int lmax)
    {
      // sum_{lambda=0}^{lmax} log^lambda(x) / (2^lambda lambda!)
      if (lmax < 0) return 0.0;
      const double lx = std::log(std::max(1.0, x));
      double term = 1.0, sum = 1.0;
      for (int lam = 1; lam <= lmax; ++lam) {
        term *= lx / (2.0 * lam);
        sum += term;
      }
      return sum;
    }

    inline double factorial_d(int n)
    {
      double f = 1.0;
      for (int k = 2; k <= n; ++k)
        f *= k;
      return f;
    }
  } // namespace detail

  /// sup(|p|/kappa, kappa/m), the argument of every bound logarithm
  inline double bound_log_argument(const BoundParams &p)
  {
    return std::max(p.p_sup / p.kappa, p.kappa / p.m);
  }

  /// Theorem right-hand side:
  ///   2n > 2 : kappa^{4-2n} Kt^{2l+n-2}/n! (n+l)! sum_{lam<=l} log^lam/2^lam lam!
  ///   n == 1 : sup(|p|,kappa)^2 Kt^{2l}/(l+1)^2 l! sum_{lam<=l-1} ...
  inline double theorem_bound(const BoundParams &p)
  {
    const double arg = bound_log_argument(p);
    if (p.n >= 2) {
      return std::pow(p.kappa, 4 - 2 * p.n) * std::pow(p.K, 2 * p.l + p.n - 2) /
             detail::factorial_d(p.n) * detail::factorial_d(p.n + p.l) *
             detail::log_sum(arg, p.l);
    }
    if (p.n == 1 && p.l >= 1) {
      const double pref = std::pow(std::max(p.p_sup, p.kappa), 2);
      return pref * std::pow(p.K, 2 * p.l) / ((p.l + 1.0) * (p.l + 1.0)) *
             detail::factorial_d(p.l) * detail::log_sum(arg, p.l - 1);
    }
    throw domain_error("theorem_bound: invalid (n,l) combination");
  }

  enum class PropositionCase {
    ManyLegs,        // 2n > 4
    FourPointDeriv,  // 2n = 4, |w| >= 1
    FourPoint,       // 2n = 4, |w| = 0
    FourPointAtZero, // 2n = 4, first momentum zero
    TwoPointW3,      // 2n = 2, |w| = 3
    TwoPointLowW,    // 2n = 2, |w| <= 2, l >= 2
    TwoPointAtZero   // 2n = 2 at zero momentum, |w| in {0,2}, l >= 2
  };

  /// Proposition right-hand side for the given case.
  inline double proposition_bound(const BoundParams &p, PropositionCase c)
  {
    const double arg = bound_log_argument(p);
    const double eta_factor =
        std::pow(std::max(p.kappa, p.eta), -static_cast<double>(p.w_order));
    const double lp1sq = (p.l + 1.0) * (p.l + 1.0);
    switch (c) {
    case PropositionCase::ManyLegs: {
      if (!(p.n >= 3)) throw domain_error("proposition_bound: 2n > 4 case needs n >= 3");
      return std::pow(p.kappa, 4 - 2 * p.n) * std::pow(p.K, 2 * p.l + p.n - 2) /
             (lp1sq * detail::factorial_d(p.n) * p.n * p.n * p.n) *
             detail::factorial_d(p.n + p.l - 1) * eta_factor * detail::log_sum(arg, p.l);
    }
    case PropositionCase::FourPointDeriv: {
      if (!(p.n == 2 && p.w_order >= 1))
        throw domain_error("proposition_bound: 2n = 4, |w| >= 1 case");
      return std::pow(p.K, 2 * p.l - 0.25) / (lp1sq * 16.0) * detail::factorial_d(1 + p.l) *
             eta_factor * detail::log_sum(arg, p.l - 1);
    }
    case PropositionCase::FourPoint: {
      if (!(p.n == 2 && p.w_order == 0))
        throw domain_error("proposition_bound: 2n = 4, |w| = 0 case");
      return std::pow(p.K, 2 * p.l) / (lp1sq * 16.0) * detail::factorial_d(1 + p.l) *
             detail::log_sum(arg, p.l - 1) * (1.0 + std::log(std::max(1.0, arg)));
    }
    case PropositionCase::FourPointAtZero: {
      if (!(p.n == 2 && p.w_order == 0))
        throw domain_error("proposition_bound: 2n = 4 at zero case");
      return std::pow(p.K, 2 * p.l) / (lp1sq * 16.0) * detail::factorial_d(1 + p.l) *
             detail::log_sum(arg, p.l);
    }
    case PropositionCase::TwoPointW3: {
      if (!(p.n == 1 && p.w_order == 3))
        throw domain_error("proposition_bound: 2n = 2, |w| = 3 case");
      return std::pow(std::max(p.p_sup, p.kappa), -1.0) * std::pow(p.K, 2 * p.l - 1.25) / lp1sq *
             detail::factorial_d(p.l) * detail::log_sum(arg, p.l - 2);
    }
    case PropositionCase::TwoPointLowW: {
      if (!(p.n == 1 && p.w_order <= 2 && p.l >= 2))
        throw domain_error("proposition_bound: 2n = 2, |w| <= 2, l >= 2 case");
      return std::pow(std::max(p.p_sup, p.kappa), 2.0 - p.w_order) *
             std::pow(p.K, 2 * p.l - 1) / lp1sq * detail::factorial_d(p.l) *
             detail::log_sum(arg, p.l - 2) * (1.0 + std::log(std::max(1.0, arg)));
    }
    case PropositionCase::TwoPointAtZero: {
      if (!(p.n == 1 && (p.w_order == 0 || p.w_order == 2) && p.l >= 2))
        throw domain_error("proposition_bound: 2n = 2 at zero case");
      return std::pow(p.kappa, 2.0 - p.w_order) * std::pow(p.K, 2 * p.l - 1) / lp1sq *
             detail::factorial_d(p.l) * detail::log_sum(p.kappa / p.m, p.l - 1);
    }
    }
    throw domain_error("proposition_bound: unknown case");
  }

  // ------------------------------------------------------- amplitude checks

  /// One verified table node.
  struct BoundViolation {
    int n = 0, l = 0;
    double lambda = 0.0;
    double p_sup = 0.0;
    double value = 0.0;
    double bound = 0.0;
  };

  struct BoundCheckReport {
    int n = 0, l = 0;
    double K = 0.0;
    std::size_t nodes = 0;
    bool pass = true;
    double worst_margin = std::numeric_limits<double>::infinity(); // bound/|value|
    BoundViolation worst;
    std::vector<BoundViolation> violations;
  };

  /// Checks |value| <= theorem bound on every node of a solved table, in the
  /// unit-coupling convention by default (|L| / (g/4!)^{n+l-1}).
  /// `per_node` (optional) receives every checked node for report emission.
  inline BoundCheckReport check_amplitude(const AmplitudeTable &table, const SolverConfig &cfg,
                                          double K, bool unit_coupling = true,
                                          const std::function<void(const BoundViolation &)>
                                              &per_node = {})
  {
    BoundCheckReport rep;
    rep.n = table.n;
    rep.l = table.l;
    rep.K = K;
    const double conv =
        unit_coupling ? std::pow(cfg.vertex(), table.n + table.l - 1) : 1.0;
    const std::size_t np = table.points();
    for (std::size_t il = 0; il < table.lambda_nodes.size(); ++il) {
      const double lambda = table.lambda_nodes[il];
      for (std::size_t i = 0; i < np; ++i) {
        // reconstruct the node's sup momentum from the axes
        double p_sup = 0.0;
        {
          std::size_t rem = i;
          std::vector<double> coord(table.axes.size());
          for (std::size_t d = table.axes.size(); d-- > 0;) {
            coord[d] = table.axes[d][rem % table.axes[d].size()];
            rem /= table.axes[d].size();
          }
          if (table.family == "antipodal-pair") p_sup = coord[0];
          else p_sup = std::max(coord[0], coord[1]);
        }
        BoundParams bp;
        bp.n = table.n;
        bp.l = table.l;
        bp.K = K;
        bp.kappa = lambda + cfg.m;
        bp.m = cfg.m;
        bp.p_sup = p_sup;
        if (bp.n == 1 && bp.l == 0) continue; // identically zero
        const double bound = theorem_bound(bp);
        const double value = std::abs(table.values[il * np + i] / conv);
        ++rep.nodes;
        if (per_node) per_node({table.n, table.l, lambda, p_sup, value, bound});
        const double margin = value > 0.0 ? bound / value : std::numeric_limits<double>::infinity();
        if (margin < rep.worst_margin) {
          rep.worst_margin = margin;
          rep.worst = {table.n, table.l, lambda, p_sup, value, bound};
        }
        if (value > bound) {
          rep.pass = false;
          if (rep.violations.size() < 16)
            rep.violations.push_back({table.n, table.l, lambda, p_sup, value, bound});
        }
      }
    }
    return rep;
  }

  // ------------------------------------------------------------ log growth

  struct LogFit {
    double c0 = 0.0;
    double c1 = 0.0;
    double max_rel_residual = 0.0;
  };

  /// Least-squares fit value ~ c0 + c1 log(|p|/kappa) over samples spanning
  /// at least one decade with |p| > 4 kappa.
  inline LogFit log_growth_fit(const std::vector<std::pair<double, double>> &samples, double kappa)
  {
    if (samples.size() < 8)
      throw domain_error("log_growth_fit: need at least 8 samples");
    double pmin = samples.front().first, pmax = pmin;
    for (const auto &[p, v] : samples) {
      pmin = std::min(pmin, p);
      pmax = std::max(pmax, p);
    }
    if (!(pmin > 4.0 * kappa) || !(pmax >= 10.0 * pmin))
      throw domain_error("log_growth_fit: samples must span a decade with |p| > 4 kappa");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(samples.size());
    for (const auto &[p, v] : samples) {
      const double x = std::log(p / kappa);
      sx += x;
      sy += v;
      sxx += x * x;
      sxy += x * v;
    }
    LogFit fit;
    const double det = n * sxx - sx * sx;
    fit.c1 = (n * sxy - sx * sy) / det;
    fit.c0 = (sy - fit.c1 * sx) / n;
    for (const auto &[p, v] : samples) {
      const double model = fit.c0 + fit.c1 * std::log(p / kappa);
      fit.max_rel_residual =
          std::max(fit.max_rel_residual, std::abs(model - v) / std::max(std::abs(v), 1e-300));
    }
    return fit;
  }
} // namespace phi4
