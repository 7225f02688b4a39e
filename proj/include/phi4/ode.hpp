#pragma once

// standard library
#include <cmath>
#include <functional>
#include <vector>

#include <phi4/common.hpp>

namespace phi4
{
  /// Adaptive Dormand-Prince 5(4) on a flat state vector. Steps are truncated
  /// at requested checkpoints so tables can be recorded without dense output.
  class DormandPrince
  {
  public:
    using Rhs = std::function<void(double, const std::vector<double> &, std::vector<double> &)>;

    double rtol = 1e-8;
    double atol = 1e-14;
    double h_init = 1e-3;
    double h_min = 1e-12;
    long max_steps = 2000000;

    /// integrate from t0 to t1 (t1 > t0); on_checkpoint(t, y) is invoked at
    /// every t in `checkpoints` (ascending, within [t0,t1]).
    void integrate(const Rhs &rhs, double t0, double t1, std::vector<double> &y,
                   const std::vector<double> &checkpoints = {},
                   const std::function<void(double, const std::vector<double> &)> &on_checkpoint = {})
    {
      const std::size_t dim = y.size();
      std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);
      std::vector<double> ytmp(dim), y5(dim), err(dim);

      std::size_t next_cp = 0;
      while (next_cp < checkpoints.size() && checkpoints[next_cp] <= t0 + 1e-300) {
        if (on_checkpoint) on_checkpoint(checkpoints[next_cp], y);
        ++next_cp;
      }

      double t = t0;
      double h = h_init;
      rhs(t, y, k1);
      long steps = 0;
      while (t < t1 - 1e-14 * std::max(1.0, std::abs(t1))) {
        if (++steps > max_steps)
          throw convergence_error("ode: step budget exhausted at t = " + std::to_string(t));
        bool hit_cp = false;
        double t_target = t1;
        if (next_cp < checkpoints.size()) t_target = std::min(t_target, checkpoints[next_cp]);
        if (t + h >= t_target) {
          h = t_target - t;
          hit_cp = true;
        }

        stage(rhs, t, h, y, k1, k2, k3, k4, k5, k6, k7, ytmp, y5);

        // embedded error estimate
        double err_norm = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
          const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                e7 * k7[i]);
          const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
          err_norm += (e / sc) * (e / sc);
        }
        err_norm = std::sqrt(err_norm / std::max<std::size_t>(1, dim));

        if (err_norm <= 1.0) {
          t += h;
          y.swap(y5);
          k1.swap(k7); // FSAL
          if (hit_cp && next_cp < checkpoints.size() &&
              std::abs(t - checkpoints[next_cp]) <= 1e-12 * std::max(1.0, std::abs(t))) {
            if (on_checkpoint) on_checkpoint(checkpoints[next_cp], y);
            ++next_cp;
          }
          const double fac = std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err_norm, 1e-10), -0.2)));
          h = std::min(h * fac, (t1 - t0));
        } else {
          const double fac = std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
          h *= fac;
          if (h < h_min)
            throw convergence_error("ode: step size underflow at t = " + std::to_string(t));
        }
        if (h <= 0.0) h = h_min;
      }
      while (next_cp < checkpoints.size()) {
        if (on_checkpoint) on_checkpoint(checkpoints[next_cp], y);
        ++next_cp;
      }
    }

  private:
    // Dormand-Prince coefficients
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    static void axpy(std::vector<double> &out, const std::vector<double> &y, double h,
                     std::initializer_list<std::pair<double, const std::vector<double> *>> terms)
    {
      const std::size_t dim = y.size();
      for (std::size_t i = 0; i < dim; ++i) {
        double acc = y[i];
        for (const auto &[coef, v] : terms)
          acc += h * coef * (*v)[i];
        out[i] = acc;
      }
    }

    void stage(const Rhs &rhs, double t, double h, const std::vector<double> &y,
               const std::vector<double> &k1, std::vector<double> &k2, std::vector<double> &k3,
               std::vector<double> &k4, std::vector<double> &k5, std::vector<double> &k6,
               std::vector<double> &k7, std::vector<double> &ytmp, std::vector<double> &y5) const
    {
      axpy(ytmp, y, h, {{a21, &k1}});
      rhs(t + c2 * h, ytmp, k2);
      axpy(ytmp, y, h, {{a31, &k1}, {a32, &k2}});
      rhs(t + c3 * h, ytmp, k3);
      axpy(ytmp, y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
      rhs(t + c4 * h, ytmp, k4);
      axpy(ytmp, y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
      rhs(t + c5 * h, ytmp, k5);
      axpy(ytmp, y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
      rhs(t + h, ytmp, k6);
      axpy(y5, y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      rhs(t + h, y5, k7);
    }
  };
} // namespace phi4
