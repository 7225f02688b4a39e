#pragma once

// standard library
#include <cmath>
#include <vector>

#include <phi4/model.hpp>

namespace phi4
{
  namespace detail
  {
    /// mean over ordered splits of `momenta` into a block of size `k` and its
    /// complement of body(selected, rest)
    template <class Body>
    double mean_over_splits(const std::vector<FourMomentum> &momenta, int k, Body &&body)
    {
      const int n = static_cast<int>(momenta.size());
      std::vector<int> idx(k);
      for (int i = 0; i < k; ++i)
        idx[i] = i;
      double sum = 0.0;
      long count = 0;
      while (true) {
        std::vector<FourMomentum> sel, rest;
        sel.reserve(k);
        rest.reserve(n - k);
        int t = 0;
        for (int i = 0; i < n; ++i) {
          if (t < k && idx[t] == i) {
            sel.push_back(momenta[i]);
            ++t;
          } else {
            rest.push_back(momenta[i]);
          }
        }
        sum += body(sel, rest);
        ++count;
        // next combination
        int j = k - 1;
        while (j >= 0 && idx[j] == n - k + j)
          --j;
        if (j < 0) break;
        ++idx[j];
        for (int t2 = j + 1; t2 < k; ++t2)
          idx[t2] = idx[t2 - 1] + 1;
      }
      return sum / static_cast<double>(count);
    }

    inline double tree_rec(const std::vector<FourMomentum> &momenta, const FlowScales &s, double g);

    /// one bilinear channel: mean over splits of T(sel+q) C(q) T(-q+rest)
    inline double tree_channel(const std::vector<FourMomentum> &momenta, int n1,
                               const FlowScales &s, double g)
    {
      return mean_over_splits(momenta, 2 * n1 - 1,
                              [&](const std::vector<FourMomentum> &sel,
                                  const std::vector<FourMomentum> &rest) {
                                FourMomentum q;
                                for (const auto &p : sel)
                                  q = q - p;
                                std::vector<FourMomentum> left = sel;
                                left.push_back(q);
                                std::vector<FourMomentum> right;
                                right.reserve(rest.size() + 1);
                                right.push_back(-q);
                                for (const auto &p : rest)
                                  right.push_back(p);
                                const double tl = tree_rec(left, s, g);
                                if (tl == 0.0) return 0.0;
                                const double tr = tree_rec(right, s, g);
                                if (tr == 0.0) return 0.0;
                                return tl * propagator(q.squared(), s) * tr;
                              });
    }

    inline double tree_rec(const std::vector<FourMomentum> &momenta, const FlowScales &s, double g)
    {
      const int n = static_cast<int>(momenta.size()) / 2;
      if (n <= 1) return 0.0; // L_{2,0} == 0
      if (n == 2) return g / 24.0;
      // Each tree graph at order n carries n-2 internal lines; summing the
      // flow-equation channels with a full propagator on the cut line counts
      // every graph once per line.
      double sum = 0.0;
      for (int n1 = 2; n1 <= n - 1; ++n1) {
        const int n2 = n + 1 - n1;
        sum += 2.0 * n1 * n2 * tree_channel(momenta, n1, s, g);
      }
      return -sum / static_cast<double>(n - 2);
    }
  } // namespace detail

  /// Connected tree-level CAG L_{2n,0} from the flow-equation recursion with
  /// zero boundary data at Lambda0; closed form, no quadrature.
  inline double tree_cag(const MomentumConfig &config, const FlowScales &s, double g)
  {
    return detail::tree_rec(config.momenta, s, g);
  }
} // namespace phi4
