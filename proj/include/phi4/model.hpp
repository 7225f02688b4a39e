#pragma once

// standard library
#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <phi4/common.hpp>

namespace phi4
{
  // ---------------------------------------------------------------- kinematics

  /// Euclidean four-momentum.
  struct FourMomentum {
    std::array<double, 4> c = {0, 0, 0, 0};

    double &operator[](int mu) { return c[mu]; }
    double operator[](int mu) const { return c[mu]; }

    double squared() const { return c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3]; }
    double norm() const { return std::sqrt(squared()); }

    FourMomentum operator+(const FourMomentum &o) const
    {
      return {{c[0] + o.c[0], c[1] + o.c[1], c[2] + o.c[2], c[3] + o.c[3]}};
    }
    FourMomentum operator-(const FourMomentum &o) const
    {
      return {{c[0] - o.c[0], c[1] - o.c[1], c[2] - o.c[2], c[3] - o.c[3]}};
    }
    FourMomentum operator-() const { return {{-c[0], -c[1], -c[2], -c[3]}}; }
    FourMomentum operator*(double s) const { return {{s * c[0], s * c[1], s * c[2], s * c[3]}}; }

    double dot(const FourMomentum &o) const
    {
      return c[0] * o.c[0] + c[1] * o.c[1] + c[2] * o.c[2] + c[3] * o.c[3];
    }
  };

  /// Ordered list of 2n external momenta summing to zero.
  struct MomentumConfig {
    std::vector<FourMomentum> momenta;

    explicit MomentumConfig(std::vector<FourMomentum> p) : momenta(std::move(p))
    {
      if (momenta.size() < 2 || momenta.size() % 2 != 0)
        throw domain_error("MomentumConfig: need an even number 2n >= 2 of momenta");
      FourMomentum sum;
      double supnorm = 0.0;
      for (const auto &q : momenta) {
        sum = sum + q;
        supnorm = std::max(supnorm, q.norm());
      }
      if (sum.norm() > 1e-12 * std::max(1.0, supnorm))
        throw domain_error("MomentumConfig: momenta do not sum to zero");
    }

    int two_n() const { return static_cast<int>(momenta.size()); }
    int n() const { return two_n() / 2; }
  };

  /// |p_vec| = sup_i |p_i|
  inline double sup_momentum(const MomentumConfig &config)
  {
    double s = 0.0;
    for (const auto &p : config.momenta)
      s = std::max(s, p.norm());
    return s;
  }

  /// Modulus of the smallest subsum of external momenta containing p_i but not
  /// p_j, by exhaustive enumeration of the 2^(2n-2) subsets.
  /// Indices are 1-based as in the bound formulas.
  inline double eta(const MomentumConfig &config, int i, int j)
  {
    const int two_n = config.two_n();
    if (i < 1 || i > two_n || j < 1 || j > two_n || i == j)
      throw domain_error("eta: indices must satisfy 1 <= i,j <= 2n, i != j");
    std::vector<int> rest;
    for (int k = 1; k <= two_n; ++k)
      if (k != i && k != j) rest.push_back(k);
    const int nrest = static_cast<int>(rest.size());
    double best = std::numeric_limits<double>::infinity();
    for (uint64_t mask = 0; mask < (uint64_t(1) << nrest); ++mask) {
      FourMomentum s = config.momenta[i - 1];
      for (int b = 0; b < nrest; ++b)
        if (mask & (uint64_t(1) << b)) s = s + config.momenta[rest[b] - 1];
      best = std::min(best, s.norm());
    }
    return best;
  }

  /// eta at the best admissible partner: the bound factor 1/sup(kappa,eta)^|w|
  /// is minimized over j, so the sharpest choice is the largest eta_{i,j}
  inline double eta_best_partner(const MomentumConfig &config, int i)
  {
    double best = 0.0;
    for (int j = 1; j <= config.two_n(); ++j)
      if (j != i) best = std::max(best, eta(config, i, j));
    return best;
  }

  // ---------------------------------------------------------------- multi-indices

  /// Derivative multi-index w.r.t. the components of a single momentum.
  struct MultiIndex {
    std::array<int, 4> w = {0, 0, 0, 0};

    MultiIndex() = default;
    MultiIndex(int w0, int w1, int w2, int w3) : w{w0, w1, w2, w3}
    {
      for (int v : w)
        if (v < 0) throw domain_error("MultiIndex: negative entry");
      if (order() > 3) throw domain_error("MultiIndex: |w| <= 3 required");
    }

    int order() const { return w[0] + w[1] + w[2] + w[3]; }

    /// derivative axes listed with repetition, e.g. (2,1,0,0) -> {0,0,1}
    std::vector<int> axes() const
    {
      std::vector<int> a;
      for (int mu = 0; mu < 4; ++mu)
        for (int r = 0; r < w[mu]; ++r)
          a.push_back(mu);
      return a;
    }
  };

  // ---------------------------------------------------------------- scales

  /// (Lambda, Lambda0, m) with kappa = Lambda + m.
  struct FlowScales {
    double lambda;
    double lambda0;
    double m;

    FlowScales(double lam, double lam0, double mass) : lambda(lam), lambda0(lam0), m(mass)
    {
      if (!(m > 0.0)) throw domain_error("FlowScales: m > 0 required");
      if (!(lambda >= 0.0 && lambda <= lambda0))
        throw domain_error("FlowScales: need 0 <= Lambda <= Lambda0");
    }

    double kappa() const { return lambda + m; }
  };

  // ---------------------------------------------------------------- propagator

  /// Regularized propagator C(p) = (exp(-(p^2+m^2)/L0^2) - exp(-(p^2+m^2)/L^2)) / (p^2+m^2).
  /// The IR endpoint Lambda = 0 uses exp(-z/0) := 0.
  inline double propagator(double p_sq, const FlowScales &s)
  {
    const double z = p_sq + s.m * s.m;
    const double uv = std::exp(-z / (s.lambda0 * s.lambda0));
    const double ir = s.lambda > 0.0 ? std::exp(-z / (s.lambda * s.lambda)) : 0.0;
    return (uv - ir) / z;
  }

  /// dC/dLambda = -(2/Lambda^3) exp(-(p^2+m^2)/Lambda^2)
  inline double propagator_lambda_derivative(double p_sq, const FlowScales &s)
  {
    if (!(s.lambda > 0.0))
      throw domain_error("propagator_lambda_derivative: Lambda > 0 required");
    const double L2 = s.lambda * s.lambda;
    return -2.0 / (L2 * s.lambda) * std::exp(-(p_sq + s.m * s.m) / L2);
  }

  /// d^w of exp(-p^2/(c Lambda^2)) * exp(-m^2/Lambda^2), c = 1 (full width) or
  /// c = 2 (half width). The mass factor keeps the full width in both cases.
  /// Closed polynomial-times-Gaussian forms, |w| <= 3.
  inline double regulator_momentum_derivative(const FourMomentum &p, const FlowScales &s,
                                              const MultiIndex &w, bool half_width = false)
  {
    if (!(s.lambda > 0.0))
      throw domain_error("regulator_momentum_derivative: Lambda > 0 required");
    const int order = w.order();
    if (order > 3) throw domain_error("regulator_momentum_derivative: |w| <= 3");

    const double L2 = s.lambda * s.lambda;
    const double c = half_width ? 2.0 : 1.0;
    const double beta = 2.0 / (c * L2);
    const double gauss = std::exp(-p.squared() / (c * L2) - s.m * s.m / L2);

    const auto axes = w.axes();
    auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };

    double poly = 1.0;
    switch (order) {
    case 0:
      poly = 1.0;
      break;
    case 1:
      poly = -beta * p[axes[0]];
      break;
    case 2: {
      const int mu = axes[0], nu = axes[1];
      poly = beta * beta * p[mu] * p[nu] - beta * delta(mu, nu);
      break;
    }
    case 3: {
      const int mu = axes[0], nu = axes[1], rho = axes[2];
      poly = -beta * beta * beta * p[mu] * p[nu] * p[rho] +
             beta * beta *
                 (delta(mu, nu) * p[rho] + delta(mu, rho) * p[nu] + delta(nu, rho) * p[mu]);
      break;
    }
    default:
      throw domain_error("regulator_momentum_derivative: unsupported |w|");
    }
    return poly * gauss;
  }

  // ---------------------------------------------------------------- families

  /// Kinematic families used for gridded amplitudes:
  ///   zero(2n)                     -> 2n null momenta
  ///   antipodal-pair(|p|)          -> (p, -p) along axis 0
  ///   four-point(|p|, |q|, cos t)  -> (p, -p, q, -q), angle t between p and q
  inline MomentumConfig make_family(const std::string &name, const std::vector<double> &params)
  {
    if (name == "zero") {
      if (params.size() != 1 || params[0] < 2 || std::fmod(params[0], 2.0) != 0.0)
        throw domain_error("make_family: zero(2n) needs one even parameter >= 2");
      return MomentumConfig(std::vector<FourMomentum>(static_cast<std::size_t>(params[0])));
    }
    if (name == "antipodal-pair") {
      if (params.size() != 1 || params[0] < 0)
        throw domain_error("make_family: antipodal-pair(|p|) needs one parameter >= 0");
      FourMomentum p{{params[0], 0, 0, 0}};
      return MomentumConfig({p, -p});
    }
    if (name == "four-point") {
      if (params.size() != 3 || params[0] < 0 || params[1] < 0 || std::abs(params[2]) > 1.0)
        throw domain_error("make_family: four-point(|p|,|q|,cos) needs |cos| <= 1");
      const double ct = params[2];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      FourMomentum p{{params[0], 0, 0, 0}};
      FourMomentum q{{params[1] * ct, params[1] * st, 0, 0}};
      return MomentumConfig({p, -p, q, -q});
    }
    throw domain_error("make_family: unknown family '" + name + "'");
  }
} // namespace phi4
