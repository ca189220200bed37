#pragma once
// Brute-force multivariate expansion of theta terms: every bracket factor
// [(-1)^delta a^gamma q^z; q^t] expands through the triple product into
//     (1/(q^t;q^t)) sum_n (-1)^((1+delta) n) q^(t C(n,2) + z n) a^(gamma n),
// and a term is the product of those windows times its a-free part. The
// result is a map from a-exponent vectors to truncated q-series; summing
// the expansions of all terms of an identity gives the residual map, empty
// exactly when the identity holds through the cutoff order.
#include "thetaver/coeff_form.hpp"
#include "thetaver/qseries.hpp"
#include "thetaver/theta.hpp"

#include <map>
#include <string>
#include <vector>

namespace thetaver {

using LaurentMap = std::map<IntVec, QSeries>;

// Least denominator scale covering every exponent of the identity.
inline Int identity_denominator(const Identity& id) {
  Int d(1);
  for (const ThetaTerm& t : id.terms) {
    d = int_lcm(d, denominator(t.mono.qexp));
    for (const ThetaFactor& f : t.factors) {
      d = int_lcm(d, denominator(f.z));
      d = int_lcm(d, denominator(f.t));
    }
    for (const auto& [key, e] : t.poch.entries) {
      d = int_lcm(d, denominator(key.first));
      d = int_lcm(d, denominator(key.second));
    }
  }
  return d;
}

namespace laurent_detail {

// q-exponent of the n-th triple-product summand of a factor.
inline Rat window_exponent(const ThetaFactor& f, const Int& n) {
  return f.t * Rat(binom2(n)) + f.z * Rat(n);
}

// All n with window exponent <= bound (exact; the exponent is an upward
// parabola in n so scanning stops once past the vertex with the bound
// exceeded).
inline std::vector<Int> window(const ThetaFactor& f, const Rat& bound) {
  std::vector<Int> ns;
  Rat vertex = make_rat(1, 2) - f.z / f.t;  // stationary point of t C(n,2) + z n
  for (Int n = 0;; ++n) {
    if (window_exponent(f, n) <= bound)
      ns.push_back(n);
    else if (Rat(n) > vertex)
      break;
  }
  for (Int n = -1;; --n) {
    if (window_exponent(f, n) <= bound)
      ns.push_back(n);
    else if (Rat(n) < vertex)
      break;
  }
  return ns;
}

// Smallest window exponent of a factor (the parabola minimum over Z).
inline Rat window_min(const ThetaFactor& f) {
  Rat vertex = make_rat(1, 2) - f.z / f.t;
  Int lo = floor_rat(vertex);
  Rat best = window_exponent(f, lo);
  Rat up = window_exponent(f, lo + 1);
  return up < best ? up : best;
}

inline void accumulate(LaurentMap& acc, const IntVec& eta, const QSeries& ser) {
  auto it = acc.find(eta);
  if (it == acc.end()) {
    if (!ser.is_zero()) acc.emplace(eta, ser);
    return;
  }
  it->second = series_add(it->second, ser);
  if (it->second.is_zero()) acc.erase(it);
}

// Numerator-only window map of one factor: single q-power entries.
inline LaurentMap factor_numerator(const ThetaFactor& f, const Rat& bound, const Int& d,
                                   std::size_t r) {
  LaurentMap out;
  for (const Int& n : window(f, bound)) {
    IntVec eta(r, Int(0));
    for (std::size_t j = 0; j < r; ++j) eta[j] = f.gamma[j] * n;
    Rat sign = ((1 + f.delta) * n) % 2 == 0 ? Rat(1) : Rat(-1);
    QSeries mono = qs_monomial(d, sign, window_exponent(f, n));
    accumulate(out, eta, mono);
  }
  return out;
}

inline LaurentMap laurent_mul(const LaurentMap& a, const LaurentMap& b, std::int64_t cap) {
  LaurentMap out;
  for (const auto& [ea, fa] : a) {
    for (const auto& [eb, fb] : b) {
      if (fa.low() + fb.low() > cap) continue;
      IntVec eta(ea.size());
      for (std::size_t j = 0; j < ea.size(); ++j) eta[j] = ea[j] + eb[j];
      accumulate(out, eta, series_mul(fa, fb, cap));
    }
  }
  return out;
}

}  // namespace laurent_detail

// Triple-product expansion of a single factor through q^N, denominator
// division included.
inline LaurentMap jtp_expand(const ThetaFactor& f, const Rat& n_order, const Int& d) {
  if (f.t <= 0) throw std::domain_error("jtp_expand: factor modulus must be positive");
  std::size_t r = f.gamma.size();
  std::int64_t ord = scale_to_int(n_order, d);
  // denominator 1/(q^t;q^t) starts at q^0, so the numerator window may stop
  // at the same bound
  QSeries inv_euler = series_inv(euler_expand(f.t, f.t, n_order, d), ord);
  LaurentMap num = laurent_detail::factor_numerator(f, n_order, d, r);
  LaurentMap out;
  for (const auto& [eta, ser] : num)
    laurent_detail::accumulate(out, eta, series_truncate(series_mul(ser, inv_euler, ord), ord));
  return out;
}

// Full expansion of a term through q^N: product of the factor windows, the
// a-free series multiplied in once at the end.
inline LaurentMap expand_term(const ThetaTerm& term, const Rat& n_order, const Int& d) {
  std::size_t r = term.mono.aexp.size();
  if (term.coeff == 0) return {};

  // The factor windows must run far enough that products still reach q^N
  // after the other factors contribute their (possibly negative) minima.
  Rat slack = term.mono.qexp > 0 ? Rat(0) : term.mono.qexp;
  std::vector<Rat> mins;
  for (const ThetaFactor& f : term.factors) {
    Rat mn = laurent_detail::window_min(f);
    if (mn > 0) mn = 0;
    mins.push_back(mn);
    slack += mn;
  }
  std::int64_t ord = scale_to_int(n_order, d);

  LaurentMap acc;
  {
    IntVec kappa = term.mono.aexp;
    QSeries mono = qs_monomial(d, term.coeff, term.mono.qexp);
    acc.emplace(std::move(kappa), std::move(mono));
  }
  for (std::size_t i = 0; i < term.factors.size(); ++i) {
    // window: e_i(n) + sigma^- + sum_{j != i} min_j^- must be able to reach N
    Rat bound = n_order - slack + mins[i];
    // intermediate entries survive while later factors can still pull them
    // back under N
    Rat rem;
    for (std::size_t j = i + 1; j < term.factors.size(); ++j) rem += mins[j];
    std::int64_t cap = scale_to_int(n_order - rem, d);
    LaurentMap fnum = laurent_detail::factor_numerator(term.factors[i], bound, d, r);
    acc = laurent_detail::laurent_mul(acc, fnum, cap);
  }

  // a-free multiplier: Pochhammer quotient and the per-factor Euler inverses
  Rat lowest = term.mono.qexp;
  for (const auto& [eta, ser] : acc)
    if (!ser.is_zero()) lowest = std::min(lowest, make_rat(Int(ser.low()), d));
  Rat mult_order = n_order - (lowest < 0 ? lowest : Rat(0));
  std::int64_t mult_ord = scale_to_int(mult_order, d);
  QSeries mult = qs_monomial(d, Rat(1), Rat(0));
  mult.ord = mult_ord;
  for (const auto& [key, e] : term.poch.entries) {
    QSeries base = euler_expand(key.first, key.second, mult_order, d);
    mult = series_mul(mult, series_pow(base, e, mult_ord), mult_ord);
  }
  for (const ThetaFactor& f : term.factors) {
    QSeries inv = series_inv(euler_expand(f.t, f.t, mult_order, d), mult_ord);
    mult = series_mul(mult, inv, mult_ord);
  }

  LaurentMap out;
  for (const auto& [eta, ser] : acc) {
    QSeries full = series_mul(ser, mult);
    if (full.ord < ord)
      throw std::logic_error("expand_term: truncation fell short of the target order");
    laurent_detail::accumulate(out, eta, series_truncate(full, ord));
  }
  return out;
}

// Residual of the whole identity through q^N; empty iff the identity holds
// at that truncation.
inline LaurentMap expand_identity_residual(const Identity& id, const Rat& n_order,
                                           const Int& d) {
  LaurentMap acc;
  for (const ThetaTerm& term : id.terms)
    for (const auto& [eta, ser] : expand_term(term, n_order, d))
      laurent_detail::accumulate(acc, eta, ser);
  return acc;
}

inline std::string laurent_str(const LaurentMap& m) {
  std::string out;
  for (const auto& [eta, ser] : m) out += vec_str(eta) + " : " + series_str(ser) + "\n";
  return out;
}

}  // namespace thetaver
