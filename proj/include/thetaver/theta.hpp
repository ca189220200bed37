#pragma once
// Domain model for multiple theta functions: a term is a rational
// coefficient, a monomial prefactor a^kappa q^sigma, an a-free Pochhammer
// quotient, and a product of theta brackets [(-1)^delta a^gamma q^z ; q^t].
#include "thetaver/expected.hpp"
#include "thetaver/linalg.hpp"
#include "thetaver/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace thetaver {

struct QMonomial {
  int sign = +1;  // +1 or -1
  Rat qexp;
  IntVec aexp;

  bool a_free() const {
    return std::all_of(aexp.begin(), aexp.end(), [](const Int& e) { return e == 0; });
  }
  bool operator==(const QMonomial&) const = default;
};

struct ThetaFactor {
  int delta = 0;  // inner sign is (-1)^delta
  IntVec gamma;
  Rat z;
  Rat t;  // > 0
  bool operator==(const ThetaFactor&) const = default;
};

using PochKey = std::pair<Rat, Rat>;  // (s, t) for (q^s; q^t)_inf

// Product of a-free factors (q^s; q^t)_inf^e. Exact value only; zero
// exponents are never stored.
struct PochQuotient {
  std::map<PochKey, Int> entries;

  void mul(const Rat& s, const Rat& t, const Int& e) {
    if (e == 0) return;
    auto [it, fresh] = entries.emplace(PochKey{s, t}, e);
    if (!fresh) {
      it->second += e;
      if (it->second == 0) entries.erase(it);
    }
  }
  void mul(const PochQuotient& o, const Int& e = Int(1)) {
    for (const auto& [k, v] : o.entries) mul(k.first, k.second, v * e);
  }
  bool empty() const { return entries.empty(); }
  bool operator==(const PochQuotient&) const = default;
};

struct ThetaTerm {
  Rat coeff = 1;
  QMonomial mono;  // sign always +1 here; sign lives in coeff
  PochQuotient poch;
  std::vector<ThetaFactor> factors;
  bool operator==(const ThetaTerm&) const = default;
};

struct Identity {
  std::vector<std::string> vars;
  std::vector<ThetaTerm> terms;  // asserts sum == 0
  bool operator==(const Identity&) const = default;
};

struct DependentGammas : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Pochhammer pairing: reconstruct brackets [x; q^t] = (x, q^t/x; q^t) from a
// flat symbol list. Leftover a-free symbols land in the PochQuotient.

enum class PairErrorKind { UnpairedVariableFactor, UnsupportedAFree, NonUnitCoefficient };

struct PairError {
  PairErrorKind kind;
  std::size_t symbol_index = 0;
  std::string message;
};

struct PairResult {
  std::vector<ThetaFactor> factors;
  PochQuotient poch;
  Rat coeff_scale = 1;  // e.g. (-1; q^t) = 2 (-q^t; q^t) contributes a 2
};

// (-q^s; q^t)_inf = (q^(2s); q^(2t))_inf / (q^s; q^t)_inf for s > 0;
// (-1; q^t)_inf = 2 (q^(2t); q^(2t))_inf / (q^t; q^t)_inf.
inline bool poch_accumulate_a_free(PairResult& out, const QMonomial& sym, const Rat& t,
                                   const Int& mult) {
  Rat s = sym.qexp;
  if (sym.sign > 0) {
    if (s <= 0) return false;  // contains the factor (1 - q^0) or diverges
    out.poch.mul(s, t, mult);
    return true;
  }
  if (s < 0) return false;
  if (s == 0) {
    out.coeff_scale *= rat_pow(Rat(2), mult);
    s = t;
  }
  out.poch.mul(2 * s, 2 * t, mult);
  out.poch.mul(s, t, -mult);
  return true;
}

// Pair symbols sharing one modulus t. Greedy left-to-right: partner of x is
// the first unmatched symbol equal to q^t/x.
inline Expected<PairResult, PairError> pair_pochhammers(const std::vector<QMonomial>& symbols,
                                                        const Rat& modulus) {
  PairResult out;
  std::vector<bool> used(symbols.size(), false);
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (used[i]) continue;
    const QMonomial& x = symbols[i];
    if (x.a_free()) {
      if (!poch_accumulate_a_free(out, x, modulus, Int(1)))
        return PairError{PairErrorKind::UnsupportedAFree, i,
                         "a-free Pochhammer entry with nonpositive q-power"};
      used[i] = true;
      continue;
    }
    // partner q^t/x: same sign, negated exponents, q-power t - z
    QMonomial partner;
    partner.sign = x.sign;
    partner.qexp = modulus - x.qexp;
    partner.aexp.reserve(x.aexp.size());
    for (const Int& e : x.aexp) partner.aexp.push_back(-e);
    std::size_t j = i + 1;
    for (; j < symbols.size(); ++j)
      if (!used[j] && symbols[j] == partner) break;
    if (j == symbols.size())
      return PairError{PairErrorKind::UnpairedVariableFactor, i,
                       "no matching partner q^t/x for this Pochhammer entry"};
    used[i] = used[j] = true;
    ThetaFactor f;
    f.delta = x.sign < 0 ? 1 : 0;
    f.gamma = x.aexp;
    f.z = x.qexp;
    f.t = modulus;
    out.factors.push_back(std::move(f));
  }
  return out;
}

// Term-level pairing across Pochhammer groups: symbols pair with a later
// unmatched symbol of the same modulus, scanning in input order, so the
// factor order follows the input stream.
inline Expected<PairResult, PairError> pair_all(
    const std::vector<std::pair<QMonomial, Rat>>& symbols) {
  PairResult out;
  std::vector<bool> used(symbols.size(), false);
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (used[i]) continue;
    const auto& [x, t] = symbols[i];
    if (x.a_free()) {
      if (!poch_accumulate_a_free(out, x, t, Int(1)))
        return PairError{PairErrorKind::UnsupportedAFree, i,
                         "a-free Pochhammer entry with nonpositive q-power"};
      used[i] = true;
      continue;
    }
    QMonomial partner;
    partner.sign = x.sign;
    partner.qexp = t - x.qexp;
    partner.aexp.reserve(x.aexp.size());
    for (const Int& e : x.aexp) partner.aexp.push_back(-e);
    std::size_t j = i + 1;
    for (; j < symbols.size(); ++j)
      if (!used[j] && symbols[j].second == t && symbols[j].first == partner) break;
    if (j == symbols.size())
      return PairError{PairErrorKind::UnpairedVariableFactor, i,
                       "no matching partner q^t/x for this Pochhammer entry"};
    used[i] = used[j] = true;
    ThetaFactor f;
    f.delta = x.sign < 0 ? 1 : 0;
    f.gamma = x.aexp;
    f.z = x.qexp;
    f.t = t;
    out.factors.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exponent space U_theta and the exactness hypotheses.

// Basis of the span of the factor exponent vectors, by exact row reduction.
inline std::vector<IntVec> exponent_space(const ThetaTerm& term) {
  if (term.factors.empty()) return {};
  std::size_t r = term.factors.front().gamma.size();
  RatMat m(term.factors.size(), r);
  for (std::size_t i = 0; i < term.factors.size(); ++i)
    for (std::size_t j = 0; j < r; ++j) m(i, j) = Rat(term.factors[i].gamma[j]);
  auto pivots = rref(m);
  std::vector<IntVec> basis;
  for (std::size_t i = 0; i < pivots.size(); ++i) basis.push_back(clear_denominators(m.row(i)));
  return basis;
}

inline bool spans_equal(const std::vector<IntVec>& a, const std::vector<IntVec>& b) {
  auto stack = [](const std::vector<IntVec>& rows) {
    return rows.empty() ? RatMat(0, 0)
                        : rat_mat(IntMat::from_rows(
                              std::vector<std::vector<Int>>(rows.begin(), rows.end())));
  };
  std::vector<IntVec> joined = a;
  joined.insert(joined.end(), b.begin(), b.end());
  std::size_t ra = rank(stack(a)), rb = rank(stack(b)), rj = rank(stack(joined));
  return ra == rb && rb == rj;
}

struct ValidationReport {
  bool gammas_independent = false;
  bool m_in_range = false;  // 1 < m <= r
  bool exact_mode_eligible = false;
};

inline ValidationReport validate_term(const ThetaTerm& term, std::size_t r) {
  ValidationReport rep;
  std::size_t m = term.factors.size();
  rep.m_in_range = (m > 1 && m <= r);
  if (m == 0) {
    rep.gammas_independent = true;
  } else {
    RatMat g(m, r);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < r; ++j) g(i, j) = Rat(term.factors[i].gamma[j]);
    rep.gammas_independent = (rank(g) == m);
  }
  rep.exact_mode_eligible = rep.gammas_independent && rep.m_in_range;
  return rep;
}

}  // namespace thetaver
