#pragma once

// standard library
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace phi4
{
  inline constexpr double pi = 3.14159265358979323846;

  /// (2pi)^-4 d^4k volume factor of a radial x polar-angle integral:
  /// int d^4k f(|k|,cos t) = 4 pi int k^3 dk int_0^pi sin^2 t f dt.
  inline constexpr double fourpi_over_2pi4 = 4.0 * pi / (16.0 * pi * pi * pi * pi);

  struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
  };
  struct range_error : std::runtime_error {
    using std::runtime_error::runtime_error;
  };
  struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
  };

  // ---------------------------------------------------------------- RNG

  /// splitmix64; used to seed and to decorrelate per-index streams.
  inline uint64_t splitmix64(uint64_t &state)
  {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// xoshiro256** with deterministic seeding. Distributions are hand-rolled so
  /// that streams are bit-stable across platforms and thread counts.
  class Rng
  {
  public:
    explicit Rng(uint64_t seed)
    {
      uint64_t sm = seed;
      for (auto &w : s)
        w = splitmix64(sm);
    }

    /// independent substream for item `index` of a sweep
    Rng substream(uint64_t index) const
    {
      uint64_t mix = s[0] ^ (0x9e3779b97f4a7c15ull * (index + 1));
      return Rng(mix);
    }

    uint64_t next_u64()
    {
      const uint64_t result = rotl(s[1] * 5, 7) * 9;
      const uint64_t t = s[1] << 17;
      s[2] ^= s[0];
      s[3] ^= s[1];
      s[1] ^= s[2];
      s[0] ^= s[3];
      s[2] ^= t;
      s[3] = rotl(s[3], 45);
      return result;
    }

    /// uniform in [0,1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// standard normal (polar Marsaglia, deterministic)
    double normal()
    {
      if (have_spare) {
        have_spare = false;
        return spare;
      }
      double u, v, q;
      do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        q = u * u + v * v;
      } while (q >= 1.0 || q == 0.0);
      const double f = std::sqrt(-2.0 * std::log(q) / q);
      spare = v * f;
      have_spare = true;
      return u * f;
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s[4] = {};
    double spare = 0.0;
    bool have_spare = false;
  };

  // ---------------------------------------------------------------- threading

  inline int &global_thread_count()
  {
    static int n = static_cast<int>(std::thread::hardware_concurrency());
    return n;
  }

  /// Deterministic parallel map: body(i) writes only to slot i of its output,
  /// reductions happen sequentially in the caller.
  inline void parallel_for(std::size_t count, const std::function<void(std::size_t)> &body)
  {
    int nthreads = global_thread_count();
    if (nthreads < 1) nthreads = 1;
    if (nthreads == 1 || count < 2) {
      for (std::size_t i = 0; i < count; ++i)
        body(i);
      return;
    }
    std::vector<std::thread> pool;
    std::size_t nt = std::min<std::size_t>(nthreads, count);
    std::vector<std::exception_ptr> errors(nt);
    for (std::size_t t = 0; t < nt; ++t) {
      pool.emplace_back([&, t]() {
        try {
          for (std::size_t i = t; i < count; i += nt)
            body(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto &th : pool)
      th.join();
    for (auto &e : errors)
      if (e) std::rethrow_exception(e);
  }

  inline bool rel_close(double a, double b, double tol)
  {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) return true;
    return std::abs(a - b) <= tol * scale;
  }
} // namespace phi4
