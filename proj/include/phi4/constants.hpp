#pragma once

// standard library
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include <phi4/common.hpp>

namespace phi4
{
  /// Single registry for every numerical constant of the bound chain.
  /// Both the lemma certifier and the K-chain read from here, so a value can
  /// only be perturbed in one place (the perturbation hooks use `set`).
  struct ConstantRegistry {
    // combinatorial sums
    double K0 = 20.0;
    double K0_prime = 135.0 / 64.0; // (3/4)^3 * 5
    double K0_dprime = 5.0;

    // Gaussian shift constants c(v)
    std::array<double, 4> c = {1.0, 1.4, 2.5, 5.25};

    // regulator sups
    double K2 = 6.2;
    double K3 = 1.0 / 3.0;

    // momentum-derivative constants, full width and half width
    std::array<double, 4> Kw = {6.2, 4.6, 77.5, 37.0};
    std::array<double, 4> Kw_prime = {6.2, 9.2, 135.0, 407.0};

    // flow-integral constants
    double K1 = 3.1; // = K2/2
    double K1_prime = 14.5;

    double get(const std::string &name) const
    {
      const auto m = as_map();
      auto it = m.find(name);
      if (it == m.end()) throw domain_error("ConstantRegistry: unknown constant " + name);
      return *it->second;
    }

    void set(const std::string &name, double value)
    {
      auto m = as_map();
      auto it = m.find(name);
      if (it == m.end()) throw domain_error("ConstantRegistry: unknown constant " + name);
      *const_cast<double *>(it->second) = value;
    }

    /// multiply a constant, e.g. scale("K2", 1.1) for a +10% perturbation
    void scale(const std::string &name, double factor) { set(name, get(name) * factor); }

    std::map<std::string, const double *> as_map() const
    {
      return {
          {"K0", &K0},           {"K0p", &K0_prime},   {"K0pp", &K0_dprime},
          {"c0", &c[0]},         {"c1", &c[1]},        {"c2", &c[2]},
          {"c3", &c[3]},         {"K2", &K2},          {"K3", &K3},
          {"Kw0", &Kw[0]},       {"Kw1", &Kw[1]},      {"Kw2", &Kw[2]},
          {"Kw3", &Kw[3]},       {"Kpw0", &Kw_prime[0]}, {"Kpw1", &Kw_prime[1]},
          {"Kpw2", &Kw_prime[2]}, {"Kpw3", &Kw_prime[3]}, {"K1", &K1},
          {"K1p", &K1_prime},
      };
    }
  };

  inline const ConstantRegistry &default_registry()
  {
    static ConstantRegistry reg;
    return reg;
  }
} // namespace phi4
