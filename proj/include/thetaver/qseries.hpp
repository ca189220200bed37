#pragma once
// Truncated formal series in q^(1/D) with exact rational coefficients.
//
// A QSeries stores coefficients at scaled exponents k (meaning q^(k/D))
// together with `ord`: coefficients at scaled exponents <= ord are exact,
// anything beyond is unknown. Ring operations propagate the tightest
// validity order, so truncation loss is tracked instead of guessed.
#include "thetaver/rational.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace thetaver {

struct BadDenominator : std::domain_error {
  using std::domain_error::domain_error;
};
struct NonUnitLeadingTerm : std::domain_error {
  using std::domain_error::domain_error;
};

// Sentinel order for series that are exact at every exponent.
inline constexpr std::int64_t kExactOrder = std::numeric_limits<std::int64_t>::max() / 4;

struct QSeries {
  Int denom = 1;                        // D
  std::int64_t ord = kExactOrder;      // valid through scaled exponent <= ord
  std::map<std::int64_t, Rat> coeffs;  // scaled exponent -> coefficient, no zeros

  bool is_zero() const { return coeffs.empty(); }
  // Lowest populated scaled exponent; for an (empty) zero series the first
  // exponent that could still be nonzero is ord + 1, which is the sound
  // lower bound for order propagation.
  std::int64_t low() const { return coeffs.empty() ? ord : coeffs.begin()->first; }

  Rat coeff_at(std::int64_t k) const {
    auto it = coeffs.find(k);
    return it == coeffs.end() ? Rat(0) : it->second;
  }
};

inline QSeries qs_zero(const Int& d, std::int64_t ord = kExactOrder) {
  QSeries s;
  s.denom = d;
  s.ord = ord;
  return s;
}

inline QSeries qs_monomial(const Int& d, const Rat& c, const Rat& e) {
  QSeries s;
  s.denom = d;
  if (c != 0) s.coeffs[scale_to_int(e, d)] = c;
  return s;
}

inline void qs_check_compatible(const QSeries& a, const QSeries& b) {
  if (a.denom != b.denom)
    throw BadDenominator("series denominators differ: " + a.denom.str() + " vs " +
                         b.denom.str());
}

inline QSeries series_add(const QSeries& a, const QSeries& b) {
  qs_check_compatible(a, b);
  QSeries r = qs_zero(a.denom, std::min(a.ord, b.ord));
  for (const auto& [k, c] : a.coeffs) {
    if (k > r.ord) break;
    r.coeffs[k] = c;
  }
  for (const auto& [k, c] : b.coeffs) {
    if (k > r.ord) break;
    auto [it, fresh] = r.coeffs.emplace(k, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) r.coeffs.erase(it);
    }
  }
  return r;
}

inline QSeries series_neg(const QSeries& a) {
  QSeries r = a;
  for (auto& [k, c] : r.coeffs) c = -c;
  return r;
}

inline QSeries series_scale(const QSeries& a, const Rat& f) {
  if (f == 0) return qs_zero(a.denom, a.ord);
  QSeries r = a;
  for (auto& [k, c] : r.coeffs) c *= f;
  return r;
}

// Multiply by q^e.
inline QSeries series_shift(const QSeries& a, const Rat& e) {
  std::int64_t k0 = scale_to_int(e, a.denom);
  QSeries r = qs_zero(a.denom, a.ord >= kExactOrder ? kExactOrder : a.ord + k0);
  for (const auto& [k, c] : a.coeffs) r.coeffs[k + k0] = c;
  return r;
}

inline QSeries series_truncate(const QSeries& a, std::int64_t ord) {
  QSeries r = a;
  if (ord < r.ord) {
    r.ord = ord;
    r.coeffs.erase(r.coeffs.upper_bound(ord), r.coeffs.end());
  }
  return r;
}

// Product valid through min(a.ord + b.low, b.ord + a.low), optionally
// capped by `cap` to keep intermediate results small.
inline QSeries series_mul(const QSeries& a, const QSeries& b,
                          std::int64_t cap = kExactOrder) {
  qs_check_compatible(a, b);
  auto clamp = [](std::int64_t x) { return std::min(x, kExactOrder); };
  std::int64_t ord = std::min({clamp(a.ord == kExactOrder ? kExactOrder : a.ord + b.low()),
                               clamp(b.ord == kExactOrder ? kExactOrder : b.ord + a.low()),
                               cap});
  QSeries r = qs_zero(a.denom, ord);
  for (const auto& [ka, ca] : a.coeffs) {
    for (const auto& [kb, cb] : b.coeffs) {
      std::int64_t k = ka + kb;
      if (k > ord) break;  // b sorted ascending
      Rat& dst = r.coeffs[k];
      dst += ca * cb;
    }
  }
  for (auto it = r.coeffs.begin(); it != r.coeffs.end();)
    it = (it->second == 0) ? r.coeffs.erase(it) : std::next(it);
  return r;
}

// Reciprocal, computed through scaled order `ord_target` (or as far as the
// operand's own validity allows).
inline QSeries series_inv(const QSeries& a, std::int64_t ord_target) {
  if (a.is_zero()) throw NonUnitLeadingTerm("series_inv: zero series");
  std::int64_t l = a.low();
  std::int64_t ord = ord_target;
  if (a.ord != kExactOrder) ord = std::min(ord, a.ord - 2 * l);
  if (ord >= kExactOrder)
    throw std::domain_error("series_inv: unbounded target order");
  std::int64_t rel = ord + l;  // relative order of the unit part's inverse
  if (rel < 0) return qs_zero(a.denom, ord);
  const Rat lead = a.coeffs.begin()->second;
  // b_n = -(1/u_0) * sum_{k>=1} u_k b_{n-k}
  std::vector<Rat> b(static_cast<std::size_t>(rel) + 1);
  b[0] = Rat(1) / lead;
  for (std::int64_t n = 1; n <= rel; ++n) {
    Rat acc;
    for (auto it = std::next(a.coeffs.begin()); it != a.coeffs.end(); ++it) {
      std::int64_t k = it->first - l;
      if (k > n) break;
      acc += it->second * b[static_cast<std::size_t>(n - k)];
    }
    b[static_cast<std::size_t>(n)] = -acc / lead;
  }
  QSeries r = qs_zero(a.denom, ord);
  for (std::int64_t n = 0; n <= rel; ++n)
    if (b[static_cast<std::size_t>(n)] != 0) r.coeffs[n - l] = b[static_cast<std::size_t>(n)];
  return r;
}

inline QSeries series_pow(const QSeries& a, const Int& e, std::int64_t ord_target) {
  if (e == 0) {
    QSeries one = qs_monomial(a.denom, Rat(1), Rat(0));
    return series_truncate(one, ord_target);
  }
  QSeries base = e > 0 ? series_truncate(a, ord_target) : series_inv(a, ord_target);
  Int n = abs(e);
  QSeries acc = qs_monomial(a.denom, Rat(1), Rat(0));
  while (n > 0) {
    if (n % 2 == 1) acc = series_mul(acc, base, ord_target);
    base = (n > 1) ? series_mul(base, base, ord_target) : base;
    n /= 2;
  }
  return acc;
}

// Truncation of (q^s; q^t)_inf = prod_{k>=0} (1 - q^(s+kt)) through q^(N).
inline QSeries euler_expand(const Rat& s, const Rat& t, const Rat& n_order, const Int& d) {
  if (s <= 0 || t <= 0)
    throw std::domain_error("euler_expand: requires s > 0 and t > 0");
  std::int64_t s_scaled, t_scaled, ord;
  try {
    s_scaled = scale_to_int(s, d);
    t_scaled = scale_to_int(t, d);
    ord = scale_to_int(n_order, d);
  } catch (const std::domain_error& ex) {
    throw BadDenominator(ex.what());
  }
  QSeries r = qs_monomial(d, Rat(1), Rat(0));
  r.ord = ord;
  for (std::int64_t e = s_scaled; e <= ord; e += t_scaled) {
    QSeries f = qs_zero(d, ord);
    f.coeffs[0] = 1;
    f.coeffs[e] = -1;
    r = series_mul(r, f, ord);
  }
  return r;
}

// Equality of the overlap: identical coefficients through min(ord).
inline bool series_agree(const QSeries& a, const QSeries& b) {
  if (a.denom != b.denom) return false;
  std::int64_t ord = std::min(a.ord, b.ord);
  auto ia = a.coeffs.begin(), ib = b.coeffs.begin();
  while (true) {
    while (ia != a.coeffs.end() && ia->first > ord) ia = a.coeffs.end();
    while (ib != b.coeffs.end() && ib->first > ord) ib = b.coeffs.end();
    bool ea = (ia == a.coeffs.end()), eb = (ib == b.coeffs.end());
    if (ea && eb) return true;
    if (ea != eb) return false;
    if (ia->first != ib->first || ia->second != ib->second) return false;
    ++ia;
    ++ib;
  }
}

inline std::string series_str(const QSeries& a) {
  if (a.coeffs.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [k, c] : a.coeffs) {
    Rat e = make_rat(Int(k), a.denom);
    std::string mag;
    Rat ac = abs(c);
    if (e == 0) {
      mag = ac.str();
    } else {
      std::string qp = (e == 1) ? "q"
                                : (is_integer(e) ? "q^" + e.str() : "q^(" + e.str() + ")");
      mag = (ac == 1) ? qp : ac.str() + "*" + qp;
    }
    if (first) {
      out += (c < 0 ? "-" : "") + mag;
      first = false;
    } else {
      out += (c < 0 ? " - " : " + ") + mag;
    }
  }
  return out;
}

}  // namespace thetaver
