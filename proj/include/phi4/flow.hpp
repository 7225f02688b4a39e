#pragma once

// standard library
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <phi4/model.hpp>
#include <phi4/ode.hpp>
#include <phi4/quadrature.hpp>
#include <phi4/trees.hpp>

namespace phi4
{
  /// Gridded values of a CAG over a kinematic family and the Lambda grid.
  struct AmplitudeTable {
    int l = 0;
    int n = 1;
    std::string family;                    // "antipodal-pair" or "four-point"
    std::vector<std::vector<double>> axes; // family parameter axes
    std::vector<double> lambda_nodes;      // ascending, first node is 0
    std::vector<double> values;            // [ilam * npoints + inode]
    std::vector<double> rhs_values;        // flow RHS recorded at the nodes

    std::size_t points() const
    {
      std::size_t p = 1;
      for (const auto &a : axes)
        p *= a.size();
      return p;
    }

    std::size_t node_index(const std::vector<std::size_t> &idx) const
    {
      std::size_t flat = 0;
      for (std::size_t d = 0; d < axes.size(); ++d)
        flat = flat * axes[d].size() + idx[d];
      return flat;
    }

    double at(const std::vector<std::size_t> &idx, std::size_t ilam) const
    {
      return values[ilam * points() + node_index(idx)];
    }
  };

  /// Mass, wave-function and coupling counterterms at Lambda0 for one order.
  struct CountertermSet {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
  };

  struct SolverConfig {
    double g = 1.0;
    double m = 1.0;
    double lambda0 = 100.0;
    int l_max = 1;

    // family grids (absolute units; defaults sized for m = 1)
    std::vector<double> p_grid_l1;  // two-point grid at l = 1 (covers loop-leg radii)
    std::vector<double> p_grid_l2;  // two-point grid at l = 2
    std::vector<double> r1_grid;    // four-point loop-leg radius
    std::vector<double> r2_grid;    // four-point external radius
    std::vector<double> cos_grid;   // |cos| nodes

    int n_lambda = 128;             // geometric kappa intervals above the freeze scale
    double freeze_ratio = 6.0;      // flow frozen below Lambda = m / freeze_ratio

    // loop-momentum quadrature
    int n_radial = 48;
    int n_angle = 24;
    double kmax_over_lambda = 8.0;
    int g_nodes = 192;              // |v| nodes of the per-stage convolution spline
    int refine = 1;                 // node multiplier for reference runs

    double ode_rtol = 3e-9;
    bool unit_coupling_output = false;

    static SolverConfig defaults()
    {
      SolverConfig c;
      c.p_grid_l1 = {0,    0.05, 0.1, 0.2, 0.4, 0.7, 1.0, 1.5, 2.5, 4.0, 6.5,
                     10.0, 16,   25,  40,  65,  110, 190, 330, 560, 810};
      c.p_grid_l2 = {0, 0.05, 0.1, 0.2, 0.35, 0.55, 0.8, 1.2, 1.8, 2.7, 4.0, 6.0, 8.0, 10.0};
      c.r1_grid = {0,    0.1, 0.25, 0.5, 0.8, 1.2, 1.8, 2.7, 4.0, 6.0, 9.0,
                   13.5, 20,  30,   45,  68,  100, 150, 225, 340, 510, 810};
      c.r2_grid = c.p_grid_l2;
      c.cos_grid = {0.0, 0.25, 0.5, 0.7, 0.85, 0.95, 1.0};
      return c;
    }

    double lambda_stop() const { return m / freeze_ratio; }
    double vertex() const { return g / 24.0; }
  };

  namespace detail
  {
    inline std::pair<std::size_t, double> bracket(const std::vector<double> &axis, double x)
    {
      if (x < axis.front() - 1e-12 || x > axis.back() * (1.0 + 1e-9) + 1e-12)
        throw range_error("interpolation: coordinate outside table hull");
      x = std::clamp(x, axis.front(), axis.back());
      auto it = std::upper_bound(axis.begin(), axis.end(), x);
      std::size_t hi = std::min<std::size_t>(axis.size() - 1, static_cast<std::size_t>(it - axis.begin()));
      if (hi == 0) hi = 1;
      const std::size_t lo = hi - 1;
      return {lo, (x - axis[lo]) / (axis[hi] - axis[lo])};
    }

    /// position on a {0} + geometric grid, precomputed once per Lambda
    struct GeoPos {
      std::size_t i = 0; // left node index
      double t = 0.0;    // fraction in [node_i, node_{i+1}]
      bool cubic = false;
    };

    inline GeoPos locate_geometric(const std::vector<double> &nodes, double x)
    {
      GeoPos pos;
      const std::size_t nl = nodes.size();
      if (x <= nodes[1]) {
        pos.i = 0;
        pos.t = x <= 0.0 ? 0.0 : x / nodes[1];
        return pos;
      }
      if (x >= nodes[nl - 1]) {
        pos.i = nl - 2;
        pos.t = 1.0;
        return pos;
      }
      const double u0 = std::log(nodes[1]);
      const double du = std::log(nodes[2]) - u0;
      const double s = (std::log(x) - u0) / du;
      std::size_t i = 1 + static_cast<std::size_t>(std::max(0.0, s));
      i = std::min(i, nl - 2);
      pos.i = i;
      pos.t = std::clamp(s - double(i - 1), 0.0, 1.0);
      pos.cubic = (i >= 2 && i + 2 <= nl - 1);
      return pos;
    }

    inline double geo_interp(const double *col, std::size_t stride, const GeoPos &pos)
    {
      auto v = [&](std::size_t j) { return col[j * stride]; };
      if (!pos.cubic) return v(pos.i) + pos.t * (v(pos.i + 1) - v(pos.i));
      const double p0 = v(pos.i - 1), p1 = v(pos.i), p2 = v(pos.i + 1), p3 = v(pos.i + 2);
      const double t = pos.t;
      return p1 + 0.5 * t *
                      (p2 - p0 +
                       t * (2 * p0 - 5 * p1 + 4 * p2 - p3 + t * (3 * (p1 - p2) + p3 - p0)));
    }
  } // namespace detail

  /// Perturbative flow solver for the CAG: inductive in n + l (descending n),
  /// irrelevant parts integrated down from Lambda0 with zero boundary data,
  /// relevant couplings fixed at Lambda = 0 by affine counterterm shooting.
  class FlowSolver
  {
  public:
    explicit FlowSolver(SolverConfig cfg) : cfg_(std::move(cfg))
    {
      if (cfg_.l_max < 0 || cfg_.l_max > 2)
        throw domain_error("FlowSolver: l_max must be 0, 1 or 2");
      build_lambda_nodes();
    }

    const SolverConfig &config() const { return cfg_; }
    const std::vector<double> &lambda_nodes() const { return lambda_nodes_; }

    void solve()
    {
      solve_order0();
      if (cfg_.l_max >= 1) solve_order1();
      if (cfg_.l_max >= 2) solve_order2();
    }

    bool solved(int n, int l) const { return tables_.count(key(n, l)) > 0; }

    const AmplitudeTable &table(int n, int l) const
    {
      auto it = tables_.find(key(n, l));
      if (it == tables_.end()) throw domain_error("FlowSolver: table not solved");
      return it->second;
    }

    std::vector<std::pair<int, int>> solved_tables() const
    {
      std::vector<std::pair<int, int>> out;
      for (const auto &[k, t] : tables_)
        out.push_back(k);
      return out;
    }

    const CountertermSet &counterterms(int l) const
    {
      auto it = counterterms_.find(l);
      if (it == counterterms_.end()) throw domain_error("FlowSolver: order not solved");
      return it->second;
    }

    const std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> &access_log() const
    {
      return access_log_;
    }

    /// recorded loop-quadrature tail bound exp(-(kmax/Lambda)^2)
    double quadrature_tail_bound() const
    {
      return std::exp(-cfg_.kmax_over_lambda * cfg_.kmax_over_lambda);
    }
    /// recorded freeze bound exp(-(m/Lambda_stop)^2)
    double freeze_bound() const { return std::exp(-cfg_.freeze_ratio * cfg_.freeze_ratio); }

    FlowScales scales(double lambda) const { return FlowScales(lambda, cfg_.lambda0, cfg_.m); }

    // ------------------------------------------------------------ evaluation

    /// Interpolating front end; exact for l = 0 and at grid nodes.
    double evaluate(int l, int n, const MomentumConfig &config, double lambda) const
    {
      if (lambda < 0.0 || lambda > cfg_.lambda0)
        throw range_error("evaluate: lambda outside [0, lambda0]");
      if (l == 0) return tree_cag(config, scales(lambda), cfg_.g);
      log_access(n, l);
      if (n == 1) {
        if (config.two_n() != 2) throw domain_error("evaluate: two-point config expected");
        return eval_two_point(table(1, l), config.momenta[0].norm(), lambda);
      }
      if (n == 2 && l == 1) {
        double ra, rb, cab;
        pairing_params(config, ra, rb, cab);
        return eval_four_point(table(2, 1), ra, rb, cab,
                               detail::locate_geometric(lambda_nodes_, lambda));
      }
      throw domain_error("evaluate: (n,l) outside the solved scope");
    }

    // ------------------------------------------------------- flow RHS terms

    /// First flow-equation term, (2n+2 choose 2) int_k dC/dL(k) L_{2n+2,l-1}:
    /// 4D quadrature reduced by O(4) symmetry to radial x one polar angle,
    /// applied per momentum channel of the analytic tree source.
    double rhs_loop_term(int l, int n, const MomentumConfig &config, double lambda) const
    {
      if (l < 1) throw domain_error("rhs_loop_term: l >= 1 required");
      if (lambda <= 0.0) return 0.0;
      const int nr = cfg_.n_radial * cfg_.refine;
      const int na = cfg_.n_angle * cfg_.refine;
      if (l == 1 && n == 1) {
        if (config.two_n() != 2) throw domain_error("rhs_loop_term: two-point config expected");
        return 6.0 * cfg_.vertex() * gaussian_moment(lambda, nr);
      }
      if (l == 1 && n == 2) {
        if (config.two_n() != 4) throw domain_error("rhs_loop_term: four-point config expected");
        const auto &p = config.momenta;
        const FlowScales s = scales(lambda);
        double ext = 0.0;
        for (const auto &pi : p)
          ext += propagator(pi.squared(), s);
        double conv = 0.0;
        for (int i = 0; i < 4; ++i)
          for (int j = i + 1; j < 4; ++j)
            conv += convolution(lambda, (p[i] + p[j]).norm(), nr, na);
        return 15.0 * (-cfg_.g * cfg_.g / 720.0) * (ext * gaussian_moment(lambda, nr) + conv);
      }
      if (l == 2 && n == 1) {
        if (config.two_n() != 2) throw domain_error("rhs_loop_term: two-point config expected");
        log_access(2, 1);
        const auto &t4 = table(2, 1);
        const double pnorm = config.momenta[0].norm();
        const auto &rule_r = gauss_legendre(nr);
        const auto &rule_a = gauss_legendre(na);
        const double kmax = cfg_.kmax_over_lambda * lambda;
        const auto lpos = detail::locate_geometric(lambda_nodes_, lambda);
        const FlowScales s = scales(lambda);
        double sum = 0.0;
        for (int ir = 0; ir < nr; ++ir) {
          const double k = 0.5 * kmax * (1.0 + rule_r.x[ir]);
          const double radial = k * k * k * propagator_lambda_derivative(k * k, s);
          double asum = 0.0;
          for (int ia = 0; ia < na; ++ia) {
            const double theta = 0.5 * pi * (1.0 + rule_a.x[ia]);
            const double st = std::sin(theta);
            asum += 0.5 * pi * rule_a.w[ia] * st * st *
                    eval_four_point(t4, k, pnorm, std::abs(std::cos(theta)), lpos);
          }
          sum += rule_r.w[ir] * radial * asum;
        }
        return 6.0 * 0.5 * kmax * sum * fourpi_over_2pi4;
      }
      throw domain_error("rhs_loop_term: (n,l) outside the solved scope");
    }

    /// Second flow-equation term: mean over the ordered momentum splits and
    /// sum over (l1,l2,n1,n2) of products of lower CAG linked by dC/dL(q).
    double rhs_bilinear_term(int l, int n, const MomentumConfig &config, double lambda) const
    {
      if (lambda <= 0.0) return 0.0;
      const FlowScales s = scales(lambda);
      double total = 0.0;
      for (int l1 = 0; l1 <= l; ++l1) {
        const int l2 = l - l1;
        for (int n1 = 1; n1 <= n; ++n1) {
          const int n2 = n + 1 - n1;
          if (n2 < 1) continue;
          if (factor_is_zero(n1, l1) || factor_is_zero(n2, l2)) continue;
          const double channel = detail::mean_over_splits(
              config.momenta, 2 * n1 - 1,
              [&](const std::vector<FourMomentum> &sel, const std::vector<FourMomentum> &rest) {
                FourMomentum q;
                for (const auto &pm : sel)
                  q = q - pm;
                std::vector<FourMomentum> left = sel;
                left.push_back(q);
                std::vector<FourMomentum> right;
                right.reserve(rest.size() + 1);
                right.push_back(-q);
                for (const auto &pm : rest)
                  right.push_back(pm);
                const double f1 = factor_value(n1, l1, left, lambda);
                if (f1 == 0.0) return 0.0;
                const double f2 = factor_value(n2, l2, right, lambda);
                if (f2 == 0.0) return 0.0;
                return f1 * propagator_lambda_derivative(q.squared(), s) * f2;
              });
          total += 2.0 * n1 * n2 * channel;
        }
      }
      return -total;
    }

    /// Tree-level CAG (closed recursion).
    double tree(const MomentumConfig &config, double lambda) const
    {
      return tree_cag(config, scales(lambda), cfg_.g);
    }

    // ------------------------------------------------ renormalization probes

    double two_point_at_zero(int l) const { return table(1, l).values[0]; }

    /// d/dp^2 at zero momentum, Richardson-extrapolated central differences
    /// on the stored momentum grid
    double two_point_p2_derivative_at_zero(int l) const
    {
      const auto &t = table(1, l);
      return p2_derivative(t.axes[0], t.values.data());
    }

    double four_point_at_zero(int l) const
    {
      const auto &t = table(2, l);
      return t.values[0]; // node (0,0,0), lambda node 0
    }

  private:
    static std::pair<int, int> key(int n, int l) { return {n, l}; }

    static double p2_derivative(const std::vector<double> &pg, const double *row)
    {
      const double h1 = pg[1], h2 = pg[2];
      const double d1 = (row[1] - row[0]) / (h1 * h1);
      const double d2 = (row[2] - row[0]) / (h2 * h2);
      const double r = (h2 * h2) / (h1 * h1);
      return (r * d1 - d2) / (r - 1.0);
    }

    void build_lambda_nodes()
    {
      lambda_nodes_.clear();
      lambda_nodes_.push_back(0.0);
      const double lo = cfg_.lambda_stop(), hi = cfg_.lambda0;
      for (int i = 0; i <= cfg_.n_lambda; ++i)
        lambda_nodes_.push_back(lo * std::pow(hi / lo, double(i) / cfg_.n_lambda));
      lambda_nodes_.back() = hi;
    }

    // -------------------------------------------------------- quadratures

    /// int_k dC/dL(k), radial cutoff k <= kmax_over_lambda * Lambda
    double gaussian_moment(double lambda, int nr) const
    {
      const auto &rule = gauss_legendre(nr);
      const double kmax = cfg_.kmax_over_lambda * lambda;
      const FlowScales s = scales(lambda);
      double sum = 0.0;
      for (int i = 0; i < nr; ++i) {
        const double k = 0.5 * kmax * (1.0 + rule.x[i]);
        sum += rule.w[i] * k * k * k * propagator_lambda_derivative(k * k, s);
      }
      // the angular integral of sin^2 is pi/2
      return 0.5 * kmax * sum * fourpi_over_2pi4 * 0.5 * pi;
    }

    /// G(v) = int_k dC/dL(k) C(|k - v|), radial x polar-angle quadrature
    double convolution(double lambda, double v, int nr, int na) const
    {
      const auto &rule_r = gauss_legendre(nr);
      const auto &rule_a = gauss_legendre(na);
      const double kmax = cfg_.kmax_over_lambda * lambda;
      const FlowScales s = scales(lambda);
      double sum = 0.0;
      for (int ir = 0; ir < nr; ++ir) {
        const double k = 0.5 * kmax * (1.0 + rule_r.x[ir]);
        const double radial = k * k * k * propagator_lambda_derivative(k * k, s);
        double asum = 0.0;
        for (int ia = 0; ia < na; ++ia) {
          // theta-space nodes: the sin^2 weight is analytic, unlike the
          // square-root endpoints of the cos variable
          const double theta = 0.5 * pi * (1.0 + rule_a.x[ia]);
          const double st = std::sin(theta);
          asum += 0.5 * pi * rule_a.w[ia] * st * st *
                  propagator(k * k + v * v - 2.0 * k * v * std::cos(theta), s);
        }
        sum += rule_r.w[ir] * radial * asum;
      }
      return 0.5 * kmax * sum * fourpi_over_2pi4;
    }

    /// G(|v|) sampled on a {0} + log grid and interpolated; built once per
    /// ODE stage and shared by every four-point node
    struct ConvolutionSpline {
      std::vector<double> grid;
      std::vector<double> vals;
      double operator()(double v) const
      {
        const auto pos = detail::locate_geometric(grid, v);
        return detail::geo_interp(vals.data(), 1, pos);
      }
    };

    ConvolutionSpline build_convolution_spline(double lambda, int nr, int na) const
    {
      ConvolutionSpline sp;
      const int nv = cfg_.g_nodes * cfg_.refine;
      const double vmax = 1.02 * (cfg_.r1_grid.back() + cfg_.r2_grid.back());
      const double v1 = 1e-3 * cfg_.m;
      sp.grid.push_back(0.0);
      for (int i = 0; i <= nv; ++i)
        sp.grid.push_back(v1 * std::pow(vmax / v1, double(i) / nv));
      sp.vals.assign(sp.grid.size(), 0.0);
      parallel_for(sp.grid.size(),
                   [&](std::size_t i) { sp.vals[i] = convolution(lambda, sp.grid[i], nr, na); });
      return sp;
    }

    // ------------------------------------------------------ factor dispatch

    bool factor_is_zero(int n, int l) const
    {
      if (l < 0) return true;
      if (n == 1 && l == 0) return true; // L_{2,0} == 0
      return false;
    }

    double factor_value(int n, int l, const std::vector<FourMomentum> &momenta,
                        double lambda) const
    {
      if (l == 0) return detail::tree_rec(momenta, scales(lambda), cfg_.g);
      if (n == 1) {
        log_access(1, l);
        return eval_two_point(table(1, l), momenta[0].norm(), lambda);
      }
      throw domain_error("rhs_bilinear_term: factor outside the solved scope");
    }

    // ---------------------------------------------------- table evaluation

    /// two-point tables interpolate linearly in p^2 (exact for the boundary
    /// wave-function term) and cubically in log Lambda
    double eval_two_point(const AmplitudeTable &t, double pnorm, double lambda) const
    {
      const auto lpos = detail::locate_geometric(t.lambda_nodes, lambda);
      return eval_two_point(t, pnorm, lpos);
    }

    double eval_two_point(const AmplitudeTable &t, double pnorm, const detail::GeoPos &lpos) const
    {
      const auto &axis = t.axes[0];
      if (pnorm > axis.back() * (1.0 + 1e-9))
        throw range_error("two-point evaluation outside the momentum hull");
      const double p = std::clamp(pnorm, axis.front(), axis.back());
      auto it = std::upper_bound(axis.begin(), axis.end(), p);
      std::size_t hi = std::min<std::size_t>(axis.size() - 1, static_cast<std::size_t>(it - axis.begin()));
      if (hi == 0) hi = 1;
      const std::size_t lo = hi - 1;
      const double u =
          (p * p - axis[lo] * axis[lo]) / (axis[hi] * axis[hi] - axis[lo] * axis[lo]);
      const std::size_t np = t.points();
      const double v0 = detail::geo_interp(&t.values[lo], np, lpos);
      const double v1 = detail::geo_interp(&t.values[hi], np, lpos);
      return v0 + u * (v1 - v0);
    }

    double eval_four_point(const AmplitudeTable &t, double ra, double rb, double cab,
                           const detail::GeoPos &lpos) const
    {
      const auto &a1 = t.axes[0];
      const auto &a2 = t.axes[1];
      const auto &a3 = t.axes[2];
      // canonical orientation: the pair roles are symmetric, store/evaluate
      // with the larger radius on the first (longer) axis
      if (rb > ra) std::swap(ra, rb);
      const auto [i1, u1] = detail::bracket(a1, ra);
      const auto [i2, u2] = detail::bracket(a2, rb);
      const auto [i3, u3] = detail::bracket(a3, std::min(1.0, std::abs(cab)));
      const std::size_t np = t.points();
      double acc = 0.0;
      for (int d1 = 0; d1 < 2; ++d1)
        for (int d2 = 0; d2 < 2; ++d2)
          for (int d3 = 0; d3 < 2; ++d3) {
            const double w = (d1 ? u1 : 1 - u1) * (d2 ? u2 : 1 - u2) * (d3 ? u3 : 1 - u3);
            if (w == 0.0) continue;
            const std::size_t flat = ((i1 + d1) * a2.size() + (i2 + d2)) * a3.size() + (i3 + d3);
            acc += w * detail::geo_interp(&t.values[flat], np, lpos);
          }
      return acc;
    }

    /// config -> (ra, rb, |cos|) for the family (a,-a,b,-b)
    static void pairing_params(const MomentumConfig &config, double &ra, double &rb, double &cab)
    {
      if (config.two_n() != 4) throw domain_error("evaluate: four-point config expected");
      const auto &p = config.momenta;
      const double tol = 1e-9 * std::max(1.0, sup_momentum(config));
      static const int pairings[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
      for (const auto &pr : pairings) {
        if ((p[pr[0]] + p[pr[1]]).norm() <= tol && (p[pr[2]] + p[pr[3]]).norm() <= tol) {
          const FourMomentum &a = p[pr[0]];
          const FourMomentum &b = p[pr[2]];
          ra = a.norm();
          rb = b.norm();
          cab = (ra > 0 && rb > 0) ? std::abs(a.dot(b)) / (ra * rb) : 0.0;
          return;
        }
      }
      throw domain_error("evaluate: config is not in the four-point family (a,-a,b,-b)");
    }

    void log_access(int n, int l) const
    {
      if (current_.first < 0) return;
      std::lock_guard<std::mutex> lock(log_mutex_);
      access_log_.push_back({current_, {n, l}});
    }

    // ------------------------------------------------------------- order 0

    void solve_order0()
    {
      current_ = {1, 0};
      AmplitudeTable t2;
      t2.l = 0;
      t2.n = 1;
      t2.family = "antipodal-pair";
      t2.axes = {cfg_.p_grid_l2};
      t2.lambda_nodes = lambda_nodes_;
      t2.values.assign(t2.points() * lambda_nodes_.size(), 0.0);
      t2.rhs_values = t2.values;
      tables_[key(1, 0)] = std::move(t2);

      current_ = {2, 0};
      AmplitudeTable t4;
      t4.l = 0;
      t4.n = 2;
      t4.family = "four-point";
      t4.axes = {cfg_.r1_grid, cfg_.r2_grid, cfg_.cos_grid};
      t4.lambda_nodes = lambda_nodes_;
      t4.values.assign(t4.points() * lambda_nodes_.size(), cfg_.vertex());
      t4.rhs_values.assign(t4.points() * lambda_nodes_.size(), 0.0);
      tables_[key(2, 0)] = std::move(t4);

      counterterms_[0] = CountertermSet{};
      current_ = {-1, -1};
    }

    // ----------------------------------------------------- generic ODE pass

    void integrate_blocks(
        int n, int l, std::vector<double> &state,
        const std::function<void(double, const std::vector<double> &, std::vector<double> &)>
            &rhs_lambda,
        std::vector<std::vector<double>> &snapshots,
        std::vector<std::vector<double>> &rhs_snapshots)
    {
      const double lam_hi = cfg_.lambda0, lam_lo = cfg_.lambda_stop();
      const double u_end = std::log(lam_hi / lam_lo);
      std::vector<double> checkpoints;
      for (std::size_t i = lambda_nodes_.size(); i-- > 1;)
        checkpoints.push_back(std::log(lam_hi / lambda_nodes_[i]));
      checkpoints.front() = 0.0;
      checkpoints.back() = u_end;

      snapshots.assign(lambda_nodes_.size(), {});
      rhs_snapshots.assign(lambda_nodes_.size(), {});
      std::size_t cp_count = 0;

      DormandPrince ode;
      ode.rtol = cfg_.ode_rtol;
      ode.atol = 1e-18;
      ode.h_init = 1e-4;
      std::vector<double> scratch(state.size());
      auto rhs_u = [&](double u, const std::vector<double> &y, std::vector<double> &dy) {
        const double lambda = lam_hi * std::exp(-u);
        rhs_lambda(lambda, y, dy);
        for (auto &d : dy)
          d *= -lambda; // dLambda = -Lambda du
      };
      try {
        ode.integrate(rhs_u, 0.0, u_end, state, checkpoints,
                      [&](double u, const std::vector<double> &y) {
                        const double lambda = lam_hi * std::exp(-u);
                        const std::size_t ilam = lambda_nodes_.size() - 1 - cp_count;
                        snapshots[ilam] = y;
                        rhs_lambda(lambda, y, scratch);
                        rhs_snapshots[ilam] = scratch;
                        ++cp_count;
                      });
      } catch (const convergence_error &e) {
        throw convergence_error("flow (n=" + std::to_string(n) + ", l=" + std::to_string(l) +
                                ", lambda grid " + std::to_string(lambda_nodes_.size()) +
                                " nodes): " + e.what());
      }
      if (cp_count != lambda_nodes_.size() - 1)
        throw convergence_error("flow: missed lambda checkpoints");
      snapshots[0] = state; // frozen below lambda_stop
      rhs_snapshots[0].assign(state.size(), 0.0);
    }

    /// theta-assembled table from block snapshots
    template <std::size_t NB>
    AmplitudeTable assemble_table(int n, int l, const std::string &family,
                                  std::vector<std::vector<double>> axes, std::size_t np,
                                  const std::vector<std::vector<double>> &snap,
                                  const std::vector<std::vector<double>> &rhs,
                                  const std::array<double, NB> &theta,
                                  const std::array<double, NB> &scale) const
    {
      AmplitudeTable t;
      t.l = l;
      t.n = n;
      t.family = family;
      t.axes = std::move(axes);
      t.lambda_nodes = lambda_nodes_;
      t.values.resize(np * lambda_nodes_.size());
      t.rhs_values.resize(np * lambda_nodes_.size());
      for (std::size_t il = 0; il < lambda_nodes_.size(); ++il)
        for (std::size_t i = 0; i < np; ++i) {
          double val = snap[il][i];
          double rval = rhs[il][i];
          for (std::size_t j = 0; j < NB; ++j) {
            val += theta[j] * (snap[il][(j + 1) * np + i] - snap[il][i]) / scale[j];
            rval += theta[j] * (rhs[il][(j + 1) * np + i] - rhs[il][i]) / scale[j];
          }
          t.values[il * np + i] = val;
          t.rhs_values[il * np + i] = rval;
        }
      return t;
    }

    // ------------------------------------------------------------- order 1

    void solve_order1()
    {
      const double s_a = cfg_.vertex() * cfg_.m * cfg_.m * 1e-2;
      const double s_b = cfg_.vertex() * 1e-2;
      const double s_c = cfg_.vertex() * 1e-2;

      // ---- (n,l) = (1,1): base + three probe blocks in one pass
      current_ = {1, 1};
      const auto &pg = cfg_.p_grid_l1;
      const std::size_t np1 = pg.size();
      std::vector<double> state(4 * np1, 0.0);
      for (std::size_t i = 0; i < np1; ++i) {
        state[1 * np1 + i] = s_a;
        state[2 * np1 + i] = s_b * pg[i] * pg[i];
      }
      auto rhs_2pt = [&](double lambda, const std::vector<double> &, std::vector<double> &dy) {
        // bilinear term vanishes with L_{2,0}; loop source is p independent
        const double loop =
            6.0 * cfg_.vertex() * gaussian_moment(lambda, cfg_.n_radial * cfg_.refine);
        std::fill(dy.begin(), dy.end(), loop);
      };
      std::vector<std::vector<double>> snap2, rhs2;
      integrate_blocks(1, 1, state, rhs_2pt, snap2, rhs2);

      // per-block two-point tables feed the (2,1) bilinear term
      std::vector<AmplitudeTable> blocks(4);
      for (int blk = 0; blk < 4; ++blk) {
        AmplitudeTable t;
        t.l = 1;
        t.n = 1;
        t.family = "antipodal-pair";
        t.axes = {pg};
        t.lambda_nodes = lambda_nodes_;
        t.values.resize(np1 * lambda_nodes_.size());
        for (std::size_t il = 0; il < lambda_nodes_.size(); ++il)
          for (std::size_t i = 0; i < np1; ++i)
            t.values[il * np1 + i] = snap2[il][blk * np1 + i];
        blocks[blk] = std::move(t);
      }

      // ---- (n,l) = (2,1): base + three probe blocks in one pass
      current_ = {2, 1};
      const auto &r1 = cfg_.r1_grid;
      const auto &r2 = cfg_.r2_grid;
      const auto &cg = cfg_.cos_grid;
      const std::size_t np4 = r1.size() * r2.size() * cg.size();
      std::vector<double> state4(4 * np4, 0.0);
      for (std::size_t i = 0; i < np4; ++i)
        state4[3 * np4 + i] = s_c;

      std::vector<double> vplus(np4), vminus(np4), na_(np4), nb_(np4);
      {
        std::size_t idx = 0;
        for (double a : r1)
          for (double b : r2)
            for (double c : cg) {
              vplus[idx] = std::sqrt(std::max(0.0, a * a + b * b + 2 * a * b * c));
              vminus[idx] = std::sqrt(std::max(0.0, a * a + b * b - 2 * a * b * c));
              na_[idx] = a;
              nb_[idx] = b;
              ++idx;
            }
      }

      const double tree6_coeff = -cfg_.g * cfg_.g / 720.0;
      auto rhs_4pt = [&](double lambda, const std::vector<double> &, std::vector<double> &dy) {
        log_access(1, 1); // bilinear term reads the order-(1,1) block tables
        const int nr = cfg_.n_radial * cfg_.refine;
        const int na = cfg_.n_angle * cfg_.refine;
        const double T = gaussian_moment(lambda, nr);
        const auto spline = build_convolution_spline(lambda, nr, na);
        const FlowScales s = scales(lambda);
        const auto lpos = detail::locate_geometric(lambda_nodes_, lambda);
        parallel_for(np4, [&](std::size_t i) {
          const double Ca = propagator(na_[i] * na_[i], s);
          const double Cb = propagator(nb_[i] * nb_[i], s);
          // ten tree channels: 4 external C's, the two zero pairs, |a+b|, |a-b|
          const double loop = 15.0 * tree6_coeff *
                              ((2 * Ca + 2 * Cb) * T + 2 * spline(0.0) + 2 * spline(vplus[i]) +
                               2 * spline(vminus[i]));
          const double dCa = propagator_lambda_derivative(na_[i] * na_[i], s);
          const double dCb = propagator_lambda_derivative(nb_[i] * nb_[i], s);
          for (int blk = 0; blk < 4; ++blk) {
            const double L21a = eval_two_point(blocks[blk], na_[i], lpos);
            const double L21b = eval_two_point(blocks[blk], nb_[i], lpos);
            const double bilinear = -2.0 * cfg_.vertex() * (2 * L21a * dCa + 2 * L21b * dCb);
            dy[blk * np4 + i] = loop + bilinear;
          }
        });
      };
      std::vector<std::vector<double>> snap4, rhs4;
      integrate_blocks(2, 1, state4, rhs_4pt, snap4, rhs4);

      // ---- affine shooting at Lambda = 0
      auto observables = [&](int blk) {
        std::array<double, 3> y{};
        const double *row = &snap2[0][blk * np1];
        y[0] = row[0];
        y[1] = p2_derivative(pg, row);
        y[2] = snap4[0][blk * np4 + 0];
        return y;
      };
      const auto y0 = observables(0);
      const std::array<double, 3> scale = {s_a, s_b, s_c};
      double M[3][3];
      for (int j = 0; j < 3; ++j) {
        const auto yj = observables(j + 1);
        for (int i = 0; i < 3; ++i)
          M[i][j] = (yj[i] - y0[i]) / scale[j];
      }
      std::array<double, 3> target = {-y0[0], -y0[1], -y0[2]};
      const auto theta = solve3(M, target);
      counterterms_[1] = CountertermSet{theta[0], theta[1], theta[2]};

      current_ = {1, 1};
      tables_[key(1, 1)] =
          assemble_table<3>(1, 1, "antipodal-pair", {pg}, np1, snap2, rhs2, theta, scale);
      current_ = {2, 1};
      tables_[key(2, 1)] =
          assemble_table<3>(2, 1, "four-point", {r1, r2, cg}, np4, snap4, rhs4, theta, scale);
      current_ = {-1, -1};
    }

    // ------------------------------------------------------------- order 2

    void solve_order2()
    {
      const double s_a = cfg_.vertex() * cfg_.m * cfg_.m * 1e-2;
      const double s_b = cfg_.vertex() * 1e-2;

      current_ = {1, 2};
      const auto &pg = cfg_.p_grid_l2;
      const std::size_t np = pg.size();
      std::vector<double> state(3 * np, 0.0);
      for (std::size_t i = 0; i < np; ++i) {
        state[1 * np + i] = s_a;
        state[2 * np + i] = s_b * pg[i] * pg[i];
      }
      auto rhs_l2 = [&](double lambda, const std::vector<double> &, std::vector<double> &dy) {
        const FlowScales s = scales(lambda);
        log_access(1, 1);
        std::vector<double> node_rhs(np);
        parallel_for(np, [&](std::size_t i) {
          FourMomentum p{{pg[i], 0, 0, 0}};
          MomentumConfig cfg2({p, -p});
          const double loop = rhs_loop_term(2, 1, cfg2, lambda);
          const double L21 = eval_two_point(table(1, 1), pg[i], lambda);
          const double bil = -2.0 * L21 * L21 * propagator_lambda_derivative(p.squared(), s);
          node_rhs[i] = loop + bil;
        });
        for (int blk = 0; blk < 3; ++blk)
          for (std::size_t i = 0; i < np; ++i)
            dy[blk * np + i] = node_rhs[i];
      };
      std::vector<std::vector<double>> snap, rhs;
      integrate_blocks(1, 2, state, rhs_l2, snap, rhs);

      // affine 2x2 solve; no coupling counterterm at this order (the l = 2
      // four-point function is outside the solved scope)
      auto observables = [&](int blk) {
        std::array<double, 2> y{};
        const double *row = &snap[0][blk * np];
        y[0] = row[0];
        y[1] = p2_derivative(pg, row);
        return y;
      };
      const auto y0 = observables(0);
      const auto ya = observables(1);
      const auto yb = observables(2);
      const double a11 = (ya[0] - y0[0]) / s_a, a12 = (yb[0] - y0[0]) / s_b;
      const double a21 = (ya[1] - y0[1]) / s_a, a22 = (yb[1] - y0[1]) / s_b;
      const double det = a11 * a22 - a12 * a21;
      if (std::abs(det) < 1e-300) throw convergence_error("order 2 shooting: singular system");
      const std::array<double, 2> theta = {(-y0[0] * a22 + y0[1] * a12) / det,
                                           (-a11 * y0[1] + a21 * y0[0]) / det};
      counterterms_[2] = CountertermSet{theta[0], theta[1], 0.0};

      tables_[key(1, 2)] = assemble_table<2>(1, 2, "antipodal-pair", {pg}, np, snap, rhs, theta,
                                             {s_a, s_b});
      current_ = {-1, -1};
    }

    // ----------------------------------------------------------- utilities

    static std::array<double, 3> solve3(double M[3][3], std::array<double, 3> b)
    {
      int piv[3] = {0, 1, 2};
      for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int r = col + 1; r < 3; ++r)
          if (std::abs(M[piv[r]][col]) > std::abs(M[piv[best]][col])) best = r;
        std::swap(piv[col], piv[best]);
        const double d = M[piv[col]][col];
        if (std::abs(d) < 1e-300) throw convergence_error("shooting: singular system");
        for (int r = col + 1; r < 3; ++r) {
          const double f = M[piv[r]][col] / d;
          for (int c = col; c < 3; ++c)
            M[piv[r]][c] -= f * M[piv[col]][c];
          b[piv[r]] -= f * b[piv[col]];
        }
      }
      std::array<double, 3> x{};
      for (int row = 2; row >= 0; --row) {
        double acc = b[piv[row]];
        for (int c = row + 1; c < 3; ++c)
          acc -= M[piv[row]][c] * x[c];
        x[row] = acc / M[piv[row]][row];
      }
      return x;
    }

    SolverConfig cfg_;
    std::vector<double> lambda_nodes_;
    std::map<std::pair<int, int>, AmplitudeTable> tables_;
    std::map<int, CountertermSet> counterterms_;
    mutable std::pair<int, int> current_ = {-1, -1};
    mutable std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> access_log_;
    mutable std::mutex log_mutex_;
  };
} // namespace phi4
