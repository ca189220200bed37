#pragma once
// Exact arbitrary-precision integers and rationals plus the handful of
// small number-theoretic helpers the rest of the library leans on.
#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace thetaver {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

using IntVec = std::vector<Int>;
using RatVec = std::vector<Rat>;

// mpq_rational keeps values canonical (lowest terms, positive denominator)
// as long as construction goes through Int operands.
inline Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) throw std::domain_error("make_rat: zero denominator");
  return Rat(num, den);
}

inline const Int num_of(const Rat& x) { return numerator(x); }
inline const Int den_of(const Rat& x) { return denominator(x); }

inline bool is_integer(const Rat& x) { return denominator(x) == 1; }

inline Int floor_rat(const Rat& x) {
  Int n = numerator(x), d = denominator(x);  // d > 0
  Int q = n / d;                             // truncates toward zero
  if (n < 0 && q * d != n) --q;
  return q;
}

inline Int int_gcd(Int a, Int b) { return gcd(a, b); }
inline Int int_lcm(Int a, Int b) {
  if (a == 0 || b == 0) return 0;
  return abs(a * b) / gcd(a, b);
}

// Least positive rational that is an integer multiple of both arguments.
inline Rat rat_lcm(const Rat& a, const Rat& b) {
  Rat aa = abs(a), ab = abs(b);
  if (aa == 0) return ab;
  if (ab == 0) return aa;
  return make_rat(int_lcm(numerator(aa), numerator(ab)),
                  int_gcd(denominator(aa), denominator(ab)));
}

// n*(n-1)/2, valid for negative n as well: binom2(-1) == 1.
inline Int binom2(const Int& n) { return n * (n - 1) / 2; }

inline Rat rat_pow(const Rat& base, const Int& e) {
  if (e < 0) {
    if (base == 0) throw std::domain_error("rat_pow: zero to negative power");
    return Rat(1) / rat_pow(base, -e);
  }
  Rat acc(1), b = base;
  Int n = e;
  while (n > 0) {
    if (n % 2 == 1) acc *= b;
    b *= b;
    n /= 2;
  }
  return acc;
}

inline std::string rat_str(const Rat& x) { return x.str(); }
inline std::string int_str(const Int& x) { return x.str(); }

template <class V>
std::string vec_str(const V& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i].str();
  }
  return out + ")";
}

inline Rat rat_of(const Int& x) { return Rat(x); }
inline Rat rat_of(long x) { return Rat(Int(x)); }

// Scaled-exponent conversion used by the series layer: x*D must be integral.
inline std::int64_t scale_to_int(const Rat& x, const Int& denom_scale) {
  Rat scaled = x * Rat(denom_scale);
  if (!is_integer(scaled))
    throw std::domain_error("exponent " + x.str() +
                            " not representable at denominator scale " +
                            denom_scale.str());
  Int v = numerator(scaled);
  if (v > std::numeric_limits<std::int64_t>::max() / 4 ||
      v < std::numeric_limits<std::int64_t>::min() / 4)
    throw std::overflow_error("scaled exponent out of range: " + v.str());
  return static_cast<std::int64_t>(v);
}

}  // namespace thetaver
