#pragma once

// standard library
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <phi4/common.hpp>
#include <phi4/constants.hpp>
#include <phi4/model.hpp>

namespace phi4
{
  /// One lower-bound constraint on K in the bound chain.
  struct InequalityRecord {
    std::string id;
    // parameter ranges: n_max / l_max = -1 means "sweep to the cap"
    int n_min = 1, n_max = 1;
    int l_min = 1, l_max = 1;
    int w_min = 0, w_max = 0;
    bool compare_to_K = true; // true: lhs(K) <= K; false: lhs(K) <= 1 (normalized)
    std::function<double(int n, int l, int w, double K)> lhs;
    // n -> infinity limit of lhs for open n ranges whose factors increase
    // towards a finite asymptote (supremum not attained at finite n)
    std::function<double(int l, int w, double K)> lhs_n_limit;
  };

  /// Evaluates the chain of lower bounds on K and computes the minimal
  /// consistent K by fixpoint iteration over all records.
  class ConstantChain
  {
  public:
    explicit ConstantChain(const ConstantRegistry &reg = default_registry()) : reg_(reg)
    {
      build_records();
    }

    ConstantChain(const ConstantChain &) = delete;
    ConstantChain &operator=(const ConstantChain &) = delete;

    const ConstantRegistry &registry() const { return reg_; }
    const std::vector<InequalityRecord> &records() const { return records_; }

    // ------------------------------------------------------------ K-tilde

    /// K~(w) = sum over w1+w2+w3 = w of w!/(w1! w2! w3!) K^(|w3|), by exact
    /// enumeration of the multi-index decompositions.
    double ktilde(const MultiIndex &w, bool primed = false) const
    {
      const auto &Kc = primed ? reg_.Kw_prime : reg_.Kw;
      // per-component split weights; combine by convolution over |w3|
      std::array<double, 4> by_w3 = {0, 0, 0, 0};
      by_w3[0] = 1.0;
      auto fact = [](int k) { return k == 0 ? 1.0 : k == 1 ? 1.0 : k == 2 ? 2.0 : 6.0; };
      for (int mu = 0; mu < 4; ++mu) {
        const int wm = w.w[mu];
        if (wm == 0) continue;
        std::array<double, 4> comp = {0, 0, 0, 0};
        for (int a = 0; a <= wm; ++a)
          for (int b = 0; a + b <= wm; ++b) {
            const int c = wm - a - b;
            comp[c] += fact(wm) / (fact(a) * fact(b) * fact(c));
          }
        std::array<double, 4> next = {0, 0, 0, 0};
        for (int i = 0; i < 4; ++i)
          for (int j = 0; i + j < 4; ++j)
            next[i + j] += by_w3[i] * comp[j];
        by_w3 = next;
      }
      double sum = 0.0;
      for (int k = 0; k <= std::min(3, w.order()); ++k)
        sum += by_w3[k] * Kc[k];
      return sum;
    }

    /// single-axis shorthand K~(|w|); equals ktilde for any w with that order
    double ktilde_order(int w_order, bool primed = false) const
    {
      MultiIndex w(w_order, 0, 0, 0);
      return ktilde(w, primed);
    }

    // ------------------------------------------------------------ records

    const InequalityRecord &record(const std::string &id) const
    {
      for (const auto &r : records_)
        if (r.id == id) return r;
      throw domain_error("ConstantChain: unknown record " + id);
    }

    /// Normalized constraint value at (n, l, w, K); <= 1 means satisfied.
    double evaluate_constraint(const std::string &id, int n, int l, int w, double K) const
    {
      const auto &r = record(id);
      if (n < r.n_min || (r.n_max >= 0 && n > r.n_max) || l < r.l_min ||
          (r.l_max >= 0 && l > r.l_max) || w < r.w_min || w > r.w_max)
        throw domain_error("evaluate_constraint: parameters outside the record range of " + id);
      if (!(K > 0.0)) throw domain_error("evaluate_constraint: K > 0 required");
      const double v = r.lhs(n, l, w, K);
      return r.compare_to_K ? v / K : v;
    }

    struct SupResult {
      double implied = 0.0;
      int n = 0, l = 0, w = 0;
    };

    /// Lower bound on K implied by a record at the current K, together with
    /// the arg-sup over its parameter range. Guards against cap truncation.
    SupResult supremum_over_parameters(const InequalityRecord &r, double K_current, int n_cap,
                                       int l_cap, int fixed_w = -1) const
    {
      SupResult best;
      const int nhi = r.n_max >= 0 ? r.n_max : n_cap;
      const int lhi = r.l_max >= 0 ? r.l_max : l_cap;
      for (int n = r.n_min; n <= nhi; ++n)
        for (int l = r.l_min; l <= lhi; ++l)
          for (int w = r.w_min; w <= r.w_max; ++w) {
            if (fixed_w >= 0 && w != fixed_w) continue;
            const double implied =
                solve_implied([&](double K) { return r.lhs(n, l, w, K); }, r.compare_to_K,
                              K_current, r.id);
            if (implied > best.implied) best = {implied, n, l, w};
          }
      // open n range: the supremum may sit at the n -> infinity asymptote
      double limit_implied = 0.0;
      if (r.n_max < 0 && r.lhs_n_limit) {
        for (int l = r.l_min; l <= lhi; ++l)
          for (int w = r.w_min; w <= r.w_max; ++w) {
            if (fixed_w >= 0 && w != fixed_w) continue;
            limit_implied = std::max(
                limit_implied, solve_implied([&](double K) { return r.lhs_n_limit(l, w, K); },
                                             r.compare_to_K, K_current, r.id));
          }
      }
      if (r.n_max < 0 && best.n == n_cap && best.implied > limit_implied * (1.0 + 1e-9))
        throw convergence_error("record " + r.id +
                                ": supremum attained at the n cap; widen and retry");
      if (r.l_max < 0 && best.l == l_cap)
        throw convergence_error("record " + r.id +
                                ": supremum attained at the l cap; widen and retry");
      if (limit_implied > best.implied) best.implied = limit_implied;
      return best;
    }

    struct Row {
      std::string id;
      double implied = 0.0;
      int n = 0, l = 0, w = 0;
      bool binding = false;
    };

    struct Result {
      double K_star = 0.0;
      std::string binding_id;
      int n = 0, l = 0, w = 0;
      int iterations = 0;
      std::vector<Row> table;
    };

    struct Options {
      int n_cap = 50;
      int l_cap = 50;
      std::vector<std::string> exclude;
      bool reverse_order = false; // registration-order invariance checks
      double rel_tol = 1e-10;
      int max_iterations = 10000;
    };

    Result minimal_K() const
    {
      Options opt;
      return minimal_K(opt);
    }

    /// Fixpoint K <- sup over records of the implied lower bound at the
    /// current K; the fractional self-referential terms make the map
    /// contractive at large K.
    Result minimal_K(const Options &opt) const
    {
      if (opt.n_cap < 10 || opt.l_cap < 10)
        throw convergence_error("minimal_K: caps below the guard minimum of 10");
      auto excluded = [&](const std::string &id) {
        for (const auto &e : opt.exclude)
          if (e == id) return true;
        return false;
      };
      std::vector<const InequalityRecord *> order;
      for (const auto &r : records_)
        order.push_back(&r);
      if (opt.reverse_order) std::reverse(order.begin(), order.end());
      double K = 1000.0;
      Result res;
      for (int it = 1; it <= opt.max_iterations; ++it) {
        double best = 0.0;
        for (const auto *rp : order) {
          const auto &r = *rp;
          if (excluded(r.id)) continue;
          const auto sup = supremum_over_parameters(r, K, opt.n_cap, opt.l_cap);
          best = std::max(best, sup.implied);
        }
        res.iterations = it;
        if (std::abs(best - K) <= opt.rel_tol * std::max(1.0, K)) {
          K = best;
          break;
        }
        K = best;
        if (it == opt.max_iterations)
          throw convergence_error("minimal_K: fixpoint did not converge");
      }
      res.K_star = K;
      double top = 0.0;
      for (const auto &r : records_) {
        if (excluded(r.id)) continue;
        const auto sup = supremum_over_parameters(r, K, opt.n_cap, opt.l_cap);
        res.table.push_back({r.id, sup.implied, sup.n, sup.l, sup.w, false});
        if (sup.implied > top) {
          top = sup.implied;
          res.binding_id = r.id;
          res.n = sup.n;
          res.l = sup.l;
          res.w = sup.w;
        }
      }
      for (auto &row : res.table)
        row.binding = (row.id == res.binding_id);
      return res;
    }

  private:
    /// implied lower bound of one constraint form at the current K
    static double solve_implied(const std::function<double(double)> &lhs, bool compare_to_K,
                                double K_current, const std::string &id)
    {
      if (compare_to_K) return lhs(K_current);
      // normalized form: solve lhs(K') = 1, strictly decreasing in K'
      double lo = 1e-3, hi = 1e12;
      if (lhs(hi) > 1.0)
        throw convergence_error("record " + id + ": constraint unsatisfiable below 1e12");
      if (lhs(lo) <= 1.0) return lo;
      for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (lhs(mid) > 1.0) lo = mid;
        else hi = mid;
      }
      return hi;
    }

    // case-dependent decomposition factors replacing K0 Kt / K0'' Kt
    double case_factor(int n, int w, double K) const
    {
      const double e1 = std::exp(1.0);
      const double ise = 1.0 / std::sqrt(e1);
      const double K14 = std::pow(K, -0.25);
      const double K12 = std::pow(K, -0.5);
      const double Kt = ktilde_order(w, false);
      const double Ktp = ktilde_order(w, true);
      if (n > 3)
        return reg_.K0 / 2 * Kt + 2 * reg_.K0_prime * Kt +
               2 * reg_.K0_prime * (2.0 * ise * K14) * Ktp + 2 * reg_.K0_dprime * Kt +
               reg_.K0_dprime * (ise + 1.0 / e1 + K14) * Ktp;
      if (n == 3)
        return reg_.K0 / 2 * Kt + reg_.K0_prime * Kt +
               reg_.K0_prime * (2.0 * ise * K14 + (2.0 / e1) * K12) * Ktp +
               2 * reg_.K0_dprime * Kt + 2 * reg_.K0_dprime * (ise + 1.0 / e1 + K14) * Ktp;
      if (n == 2)
        return 2 * reg_.K0_dprime * Kt + 2 * reg_.K0_dprime * (ise * K14) * 2.0 * Ktp;
      return reg_.K0_dprime * Kt + reg_.K0_dprime * (ise + 1.0 / e1 + K14) * Ktp;
    }

    static double Rl(int l) { return (l + 1.0) * (l + 1.0) / (double(l) * l); }

    void build_records()
    {

      // --- first flow-equation term, irrelevant cases
      records_.push_back({"bdk0", 3, -1, 1, -1, 0, 3, false,
                          [this](int n, int l, int w, double K) {
                            const double nf = std::pow(double(n) / (n + 1), 3) * (2 * n + 1);
                            return nf * Rl(l) * reg_.K2 * reg_.K3 * reg_.c[w] * 5.0 /
                                   (2 * n + w - 4) / K;
                          },
                          [this](int l, int w, double K) {
                            // (n/(n+1))^3 (2n+1)/(2n+w-4) -> 1
                            (void)w;
                            return Rl(l) * reg_.K2 * reg_.K3 * reg_.c[w] * 5.0 / K;
                          }});
      records_.push_back({"bdk1", 2, 2, 1, -1, 1, 3, true,
                          [this](int, int l, int w, double) {
                            return std::pow(2.0 / 3.0, 3) * 5.0 * Rl(l) * reg_.K2 * reg_.K3 * reg_.c[w] *
                                   5.0 / w;
                          },
                          nullptr});
      records_.push_back({"bdk2", 1, 1, 2, -1, 3, 3, true,
                          [this](int, int l, int, double) {
                            return (3.0 / 8.0) * Rl(l) * reg_.K2 * reg_.K3 * reg_.c[3] * 5.0;
                          },
                          nullptr});

      // --- second flow-equation term, irrelevant cases (flat forms)
      records_.push_back({"bdk3", 3, -1, 1, 1, 0, 3, true,
                          [this](int n, int, int w, double) {
                            return 3.0 * 2.0 * reg_.K2 * (double(n) / (2 * n + w - 4)) * reg_.K0 *
                                   ktilde_order(w, false);
                          },
                          [this](int, int w, double) {
                            // n/(2n+w-4) -> 1/2
                            return 3.0 * reg_.K2 * reg_.K0 * ktilde_order(w, false);
                          }});
      records_.push_back({"bdk34", 2, 2, 1, 1, 1, 3, true,
                          [this](int, int, int w, double K) {
                            return 6.0 * reg_.K2 * case_factor(2, w, K);
                          },
                          nullptr});
      records_.push_back({"bdk32", 1, 1, 1, 1, 3, 3, true,
                          [this](int, int, int w, double K) {
                            return 6.0 * reg_.K2 * case_factor(1, w, K);
                          },
                          nullptr});

      // --- combined bounds with the case decompositions
      records_.push_back({"bdk4", 4, -1, 1, -1, 0, 3, true,
                          [this](int n, int l, int w, double K) {
                            const double s = 2.0 * n + w - 4.0;
                            const double first = 5.0 * reg_.K3 * std::pow(double(n) / (n + 1), 3) *
                                                 reg_.c[w] * (2 * n + 1) * Rl(l) / s;
                            const double second = 6.0 * n / s * case_factor(n, w, K);
                            return reg_.K2 * (first + second);
                          },
                          [this](int l, int w, double K) {
                            const double first = 5.0 * reg_.K3 * reg_.c[w] * Rl(l);
                            const double second = 3.0 * case_factor(4, w, K);
                            return reg_.K2 * (first + second);
                          }});
      records_.push_back({"bdk5", 2, 2, 1, -1, 1, 3, true,
                          [this](int, int l, int w, double K) {
                            const double first =
                                5.0 * 5.0 * std::pow(2.0 / 3.0, 3) * reg_.K3 * reg_.c[w] * Rl(l) / w;
                            const double second = 6.0 * (2.0 / w) * case_factor(2, w, K);
                            return reg_.K2 * (first + second);
                          },
                          nullptr});
      records_.push_back({"bdk6", 1, 1, 2, -1, 3, 3, true,
                          [this](int, int l, int, double K) {
                            const double first = 5.0 * (3.0 / 8.0) * reg_.K3 * reg_.c[3] * Rl(l) *
                                                 std::pow(K, -0.25);
                            const double second = 6.0 * case_factor(1, 3, K);
                            return reg_.K2 * (first + second);
                          },
                          nullptr});
      records_.push_back({"bdke", 3, 3, 1, -1, 0, 3, true,
                          [this](int, int l, int w, double K) {
                            const double first =
                                5.0 * reg_.K3 * std::pow(3.0 / 4.0, 3) * reg_.c[w] * 7.0 * Rl(l);
                            const double second = 18.0 * case_factor(3, w, K);
                            return (first + second) * reg_.K2 / (2.0 + w);
                          },
                          nullptr});

      // --- relevant four-point cases
      const double c62 = 15.0;         // (6 choose 2)
      const double frac = 16.0 / 162.0; // 2^4 / (2 * 3^4)
      records_.push_back({"bdk8", 2, 2, 1, -1, 0, 0, false,
                          [this, c62, frac](int, int l, int, double K) {
                            return 6.0 * reg_.K2 * reg_.K3 * c62 * frac * Rl(l) / K;
                          },
                          nullptr});
      records_.push_back({"bdk9", 2, 2, 1, 1, 0, 0, true, [this](int, int, int, double) {
                            return 16.0 * reg_.K0_dprime * reg_.K1;
                          },
                          nullptr});
      records_.push_back({"bdk10", 2, 2, 1, -1, 0, 0, false,
                          [this, c62, frac](int, int l, int, double K) {
                            return (6.0 * reg_.K2 * reg_.K3 * c62 * frac * Rl(l) +
                                    16.0 * reg_.K0_dprime * reg_.K1) /
                                       K +
                                   6.0 * std::pow(K, -0.25);
                          },
                          nullptr});
      records_.push_back({"bdk11", 2, 2, 1, -1, 0, 0, false,
                          [this, c62, frac](int, int l, int, double K) {
                            return (2.0 * reg_.K2 * reg_.K3 * c62 * frac * Rl(l) +
                                    16.0 * reg_.K0_dprime * reg_.K1) /
                                       K +
                                   4.0 * std::pow(K, -0.25);
                          },
                          nullptr});
      records_.push_back({"bdk12", 2, 2, 1, -1, 0, 0, false,
                          [this, c62, frac](int, int l, int, double K) {
                            return (2.0 * reg_.K2 * reg_.K3 * c62 * frac * Rl(l) +
                                    16.0 * reg_.K0_dprime * reg_.K1) /
                                       K +
                                   5.0 * std::pow(K, -0.25);
                          },
                          nullptr});

      // --- relevant two-point cases
      records_.push_back({"bdk13", 1, 1, 2, -1, 2, 2, false,
                          [this](int, int l, int, double K) {
                            return std::pow(K, -1.25) * reg_.K2 * reg_.K3 * 36.0 * Rl(l);
                          },
                          nullptr});
      records_.push_back({"bdk15", 1, 1, 2, -1, 2, 2, false,
                          [this](int, int l, int, double K) {
                            return std::pow(K, -1.25) * reg_.K2 * reg_.K3 * 36.0 * Rl(l) +
                                   8.0 * (2.0 * reg_.K0_dprime * reg_.K1_prime + reg_.K0_dprime * reg_.K1) /
                                       K;
                          },
                          nullptr});
      records_.push_back({"bdk16", 1, 1, 2, -1, 2, 2, false,
                          [this](int, int l, int, double K) {
                            return 2.0 * std::pow(K, -0.25) +
                                   std::pow(K, -1.25) * reg_.K2 * reg_.K3 * 12.0 * Rl(l) +
                                   8.0 * (2.0 * reg_.K0_dprime * reg_.K1_prime + reg_.K0_dprime * reg_.K1) /
                                       K;
                          },
                          nullptr});
      records_.push_back({"bdk17", 1, 1, 1, 1, 0, 0, true, [this](int, int, int, double) {
                            return 4.0 * reg_.K0_dprime * reg_.K1;
                          },
                          nullptr});
      records_.push_back({"bdk18", 1, 1, 2, -1, 0, 0, false,
                          [this](int, int l, int, double K) {
                            return std::pow(K, -0.25) +
                                   std::pow(K, -1.25) * 6.0 * reg_.K2 * reg_.K3 * Rl(l) +
                                   (0.5 * (9.0 / 16.0) * Rl(l) * reg_.K2 * reg_.K3 +
                                    6.0 * reg_.K0_dprime * reg_.K1 + 8.0 * reg_.K0_dprime * reg_.K1_prime) /
                                       K;
                          },
                          nullptr});
      records_.push_back({"kal", 1, 1, 2, -1, 0, 0, true, [this](int, int l, int, double) {
                            return (9.0 / 16.0) * Rl(l) * reg_.K2 * reg_.K3;
                          },
                          nullptr});
    }

    ConstantRegistry reg_;
    std::vector<InequalityRecord> records_;
  };
} // namespace phi4
