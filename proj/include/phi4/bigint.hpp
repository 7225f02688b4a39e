#pragma once

// standard library
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <phi4/common.hpp>

namespace phi4
{
  /// Arbitrary-precision unsigned integer, little-endian 64-bit limbs.
  /// Covers the exact combinatorics (factorials to ~120!, binomial products).
  class BigUInt
  {
  public:
    BigUInt() = default;
    BigUInt(uint64_t v)
    {
      if (v) limbs.push_back(v);
    }

    bool is_zero() const { return limbs.empty(); }

    static int compare(const BigUInt &a, const BigUInt &b)
    {
      if (a.limbs.size() != b.limbs.size())
        return a.limbs.size() < b.limbs.size() ? -1 : 1;
      for (std::size_t i = a.limbs.size(); i-- > 0;)
        if (a.limbs[i] != b.limbs[i]) return a.limbs[i] < b.limbs[i] ? -1 : 1;
      return 0;
    }

    bool operator==(const BigUInt &o) const { return compare(*this, o) == 0; }
    bool operator<(const BigUInt &o) const { return compare(*this, o) < 0; }
    bool operator<=(const BigUInt &o) const { return compare(*this, o) <= 0; }

    BigUInt &operator+=(const BigUInt &o)
    {
      const std::size_t n = std::max(limbs.size(), o.limbs.size());
      limbs.resize(n, 0);
      unsigned __int128 carry = 0;
      for (std::size_t i = 0; i < n; ++i) {
        unsigned __int128 s = carry + limbs[i];
        if (i < o.limbs.size()) s += o.limbs[i];
        limbs[i] = static_cast<uint64_t>(s);
        carry = s >> 64;
      }
      if (carry) limbs.push_back(static_cast<uint64_t>(carry));
      return *this;
    }

    /// requires *this >= o
    BigUInt &operator-=(const BigUInt &o)
    {
      if (compare(*this, o) < 0) throw domain_error("BigUInt: negative subtraction");
      uint64_t borrow = 0;
      for (std::size_t i = 0; i < limbs.size(); ++i) {
        unsigned __int128 sub = borrow;
        if (i < o.limbs.size()) sub += o.limbs[i];
        if (limbs[i] >= sub) {
          limbs[i] = static_cast<uint64_t>(limbs[i] - sub);
          borrow = 0;
        } else {
          limbs[i] = static_cast<uint64_t>(((unsigned __int128)1 << 64) + limbs[i] - sub);
          borrow = 1;
        }
      }
      trim();
      return *this;
    }

    BigUInt operator+(const BigUInt &o) const
    {
      BigUInt r = *this;
      r += o;
      return r;
    }
    BigUInt operator-(const BigUInt &o) const
    {
      BigUInt r = *this;
      r -= o;
      return r;
    }

    BigUInt operator*(const BigUInt &o) const
    {
      if (is_zero() || o.is_zero()) return BigUInt();
      BigUInt r;
      r.limbs.assign(limbs.size() + o.limbs.size(), 0);
      for (std::size_t i = 0; i < limbs.size(); ++i) {
        unsigned __int128 carry = 0;
        for (std::size_t j = 0; j < o.limbs.size(); ++j) {
          unsigned __int128 cur =
              r.limbs[i + j] + carry + (unsigned __int128)limbs[i] * o.limbs[j];
          r.limbs[i + j] = static_cast<uint64_t>(cur);
          carry = cur >> 64;
        }
        std::size_t k = i + o.limbs.size();
        while (carry) {
          unsigned __int128 cur = r.limbs[k] + carry;
          r.limbs[k] = static_cast<uint64_t>(cur);
          carry = cur >> 64;
          ++k;
        }
      }
      r.trim();
      return r;
    }

    BigUInt &operator*=(uint64_t m)
    {
      if (m == 0) {
        limbs.clear();
        return *this;
      }
      unsigned __int128 carry = 0;
      for (auto &l : limbs) {
        unsigned __int128 cur = (unsigned __int128)l * m + carry;
        l = static_cast<uint64_t>(cur);
        carry = cur >> 64;
      }
      if (carry) limbs.push_back(static_cast<uint64_t>(carry));
      return *this;
    }

    /// divide by a 64-bit value, return remainder
    uint64_t divmod_u64(uint64_t d)
    {
      if (d == 0) throw domain_error("BigUInt: division by zero");
      unsigned __int128 rem = 0;
      for (std::size_t i = limbs.size(); i-- > 0;) {
        unsigned __int128 cur = (rem << 64) | limbs[i];
        limbs[i] = static_cast<uint64_t>(cur / d);
        rem = cur % d;
      }
      trim();
      return static_cast<uint64_t>(rem);
    }

    bool is_even() const { return limbs.empty() || (limbs[0] & 1u) == 0; }

    BigUInt &shr1()
    {
      uint64_t carry = 0;
      for (std::size_t i = limbs.size(); i-- > 0;) {
        const uint64_t next = limbs[i] & 1u;
        limbs[i] = (limbs[i] >> 1) | (carry << 63);
        carry = next;
      }
      trim();
      return *this;
    }

    BigUInt &shl1()
    {
      uint64_t carry = 0;
      for (auto &l : limbs) {
        const uint64_t next = l >> 63;
        l = (l << 1) | carry;
        carry = next;
      }
      if (carry) limbs.push_back(carry);
      return *this;
    }

    /// binary GCD (division-free)
    static BigUInt gcd(BigUInt a, BigUInt b)
    {
      if (a.is_zero()) return b;
      if (b.is_zero()) return a;
      int shift = 0;
      while (a.is_even() && b.is_even()) {
        a.shr1();
        b.shr1();
        ++shift;
      }
      while (a.is_even())
        a.shr1();
      while (!b.is_zero()) {
        while (b.is_even())
          b.shr1();
        if (compare(a, b) > 0) std::swap(a, b);
        b -= a;
      }
      for (int i = 0; i < shift; ++i)
        a.shl1();
      return a;
    }

    double to_double() const
    {
      double v = 0.0;
      for (std::size_t i = limbs.size(); i-- > 0;)
        v = v * 18446744073709551616.0 + static_cast<double>(limbs[i]);
      return v;
    }

    std::string to_string() const
    {
      if (is_zero()) return "0";
      BigUInt tmp = *this;
      std::string s;
      while (!tmp.is_zero())
        s += static_cast<char>('0' + tmp.divmod_u64(10));
      return std::string(s.rbegin(), s.rend());
    }

  private:
    void trim()
    {
      while (!limbs.empty() && limbs.back() == 0)
        limbs.pop_back();
    }
    std::vector<uint64_t> limbs;
  };

  inline BigUInt big_factorial(unsigned n)
  {
    BigUInt r(1);
    for (unsigned k = 2; k <= n; ++k)
      r *= k;
    return r;
  }

  inline BigUInt big_binomial(unsigned n, unsigned k)
  {
    if (k > n) return BigUInt(0);
    k = std::min(k, n - k);
    BigUInt r(1);
    for (unsigned i = 1; i <= k; ++i) {
      r *= (n - k + i);
      r.divmod_u64(i);
    }
    return r;
  }

  /// Exact rational with BigUInt magnitude and explicit sign.
  class BigRat
  {
  public:
    BigRat() : neg(false), num(0), den(1) {}
    BigRat(int64_t v) : neg(v < 0), num(static_cast<uint64_t>(v < 0 ? -v : v)), den(1) {}
    BigRat(BigUInt n, BigUInt d, bool negative = false) : neg(negative), num(std::move(n)), den(std::move(d))
    {
      if (den.is_zero()) throw domain_error("BigRat: zero denominator");
      normalize();
    }

    static BigRat ratio(const BigUInt &n, const BigUInt &d) { return BigRat(n, d, false); }

    BigRat operator+(const BigRat &o) const
    {
      // a/b + c/d with signs
      BigUInt ad = num * o.den;
      BigUInt cb = o.num * den;
      BigUInt d = den * o.den;
      if (neg == o.neg) return BigRat(ad + cb, std::move(d), neg);
      if (BigUInt::compare(ad, cb) >= 0) return BigRat(ad - cb, std::move(d), neg);
      return BigRat(cb - ad, std::move(d), o.neg);
    }

    BigRat operator*(const BigRat &o) const
    {
      return BigRat(num * o.num, den * o.den, neg != o.neg);
    }

    /// sign of (*this - o)
    int compare(const BigRat &o) const
    {
      if (neg != o.neg) {
        if (num.is_zero() && o.num.is_zero()) return 0;
        return neg ? -1 : 1;
      }
      const int c = BigUInt::compare(num * o.den, o.num * den);
      return neg ? -c : c;
    }

    bool operator<=(const BigRat &o) const { return compare(o) <= 0; }

    double to_double() const
    {
      const double v = num.to_double() / den.to_double();
      return neg ? -v : v;
    }

    const BigUInt &numerator() const { return num; }
    const BigUInt &denominator() const { return den; }
    bool negative() const { return neg; }

  private:
    void normalize()
    {
      if (num.is_zero()) {
        den = BigUInt(1);
        neg = false;
        return;
      }
      BigUInt g = BigUInt::gcd(num, den);
      if (!(g == BigUInt(1))) {
        num = divide_exact(num, g);
        den = divide_exact(den, g);
      }
    }

    /// exact division via repeated limb-wise long division by g is not
    /// available directly; use the classical schoolbook remainder-free path:
    /// since g | a, compute a/g by binary long division.
    static BigUInt divide_exact(const BigUInt &a, const BigUInt &g)
    {
      // binary long division, exact by construction
      BigUInt quotient(0), remainder(0);
      // collect bits of a from most significant
      std::vector<bool> bits;
      {
        BigUInt tmp = a;
        while (!tmp.is_zero()) {
          bits.push_back(!tmp.is_even());
          tmp.shr1();
        }
      }
      for (std::size_t i = bits.size(); i-- > 0;) {
        remainder.shl1();
        if (bits[i]) remainder += BigUInt(1);
        quotient.shl1();
        if (BigUInt::compare(remainder, g) >= 0) {
          remainder -= g;
          quotient += BigUInt(1);
        }
      }
      return quotient;
    }

    bool neg;
    BigUInt num;
    BigUInt den;
  };
} // namespace phi4
