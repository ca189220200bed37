#pragma once
// Exact closed forms for single Laurent coefficients of theta terms: finite
// sums of atoms c * q^e * prod (q^s; q^t)_inf^k. Extraction inverts the
// factor exponent map: the coefficient of a^beta in
//     coeff a^kappa q^sigma poch prod_i [(-1)^delta_i a^gamma_i q^z_i; q^t_i]
// is supported on the unique integral solution of sum n_i gamma_i =
// beta - kappa, where it equals
//     coeff (-1)^(sum (1+delta_i) n_i) q^(sigma + sum t_i C(n_i,2) + z_i n_i)
//       * poch * prod (q^t_i; q^t_i)^-1 .
#include "thetaver/expected.hpp"
#include "thetaver/linalg.hpp"
#include "thetaver/qseries.hpp"
#include "thetaver/theta.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace thetaver {

using Signature = std::map<PochKey, Int>;

struct CoeffAtom {
  Rat c;  // nonzero
  Rat e;
  Signature sig;
  bool operator==(const CoeffAtom&) const = default;
};

struct CoefficientForm {
  std::vector<CoeffAtom> atoms;  // merged on (e, sig), sorted, no zero c
  bool is_zero_form() const { return atoms.empty(); }
  bool operator==(const CoefficientForm&) const = default;
};

namespace cf_detail {

inline bool sig_less(const Signature& a, const Signature& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline bool atom_less(const CoeffAtom& a, const CoeffAtom& b) {
  if (a.e != b.e) return a.e < b.e;
  if (a.sig != b.sig) return sig_less(a.sig, b.sig);
  return false;
}

}  // namespace cf_detail

// Merge atoms sharing (e, sig); no signature rewriting.
inline CoefficientForm cf_merge(std::vector<CoeffAtom> atoms) {
  std::sort(atoms.begin(), atoms.end(), cf_detail::atom_less);
  CoefficientForm out;
  for (CoeffAtom& a : atoms) {
    if (a.c == 0) continue;
    if (!out.atoms.empty() && out.atoms.back().e == a.e && out.atoms.back().sig == a.sig) {
      out.atoms.back().c += a.c;
      if (out.atoms.back().c == 0) out.atoms.pop_back();
    } else {
      out.atoms.push_back(std::move(a));
    }
  }
  return out;
}

// Coefficient of a^beta as an exact form; the zero form when beta is not hit.
inline CoefficientForm extract_exact(const ThetaTerm& term, const IntVec& beta) {
  std::size_t r = beta.size();
  std::size_t m = term.factors.size();
  if (term.coeff == 0) return {};

  RatVec target(r);
  for (std::size_t j = 0; j < r; ++j) target[j] = Rat(beta[j] - term.mono.aexp[j]);

  IntVec n(m, Int(0));
  if (m > 0) {
    RatMat gt(r, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < r; ++j) gt(j, i) = Rat(term.factors[i].gamma[j]);
    std::optional<RatVec> sol;
    try {
      sol = solve_exact(gt, target);
    } catch (const ColumnRankDeficient&) {
      throw DependentGammas("extract_exact: factor exponents are dependent");
    }
    if (!sol) return {};
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_integer((*sol)[i])) return {};
      n[i] = numerator((*sol)[i]);
    }
  } else {
    for (std::size_t j = 0; j < r; ++j)
      if (target[j] != 0) return {};
  }

  CoeffAtom atom;
  Int sign_acc(0);
  atom.e = term.mono.qexp;
  Signature sig = term.poch.entries;
  for (std::size_t i = 0; i < m; ++i) {
    const ThetaFactor& f = term.factors[i];
    sign_acc += (1 + f.delta) * n[i];
    atom.e += f.t * Rat(binom2(n[i])) + f.z * Rat(n[i]);
    auto [it, fresh] = sig.emplace(PochKey{f.t, f.t}, Int(-1));
    if (!fresh) {
      it->second -= 1;
      if (it->second == 0) sig.erase(it);
    }
  }
  atom.c = term.coeff * (sign_acc % 2 == 0 ? Rat(1) : Rat(-1));
  atom.sig = std::move(sig);
  return cf_merge({atom});
}

struct UnnormalizableSignature {
  PochKey offending;
};

// Split every signature entry along the common refined modulus
//     (q^s; q^t) = prod_{j=0}^{T/t - 1} (q^(s + j t); q^T),
// then merge. Entries whose s exceeds the refined modulus after splitting
// (only possible for inputs with s > t) cannot be normalized this way.
inline Expected<CoefficientForm, UnnormalizableSignature> cf_canonicalize(
    const CoefficientForm& form, std::optional<Rat> modulus_override = std::nullopt) {
  if (form.atoms.empty()) return CoefficientForm{};
  Rat t_all;
  bool any = false;
  for (const CoeffAtom& a : form.atoms)
    for (const auto& [key, e] : a.sig) {
      t_all = any ? rat_lcm(t_all, key.second) : key.second;
      any = true;
    }
  if (!any) return cf_merge(form.atoms);
  Rat big = modulus_override.value_or(t_all);

  std::vector<CoeffAtom> out;
  for (const CoeffAtom& a : form.atoms) {
    CoeffAtom na;
    na.c = a.c;
    na.e = a.e;
    for (const auto& [key, e] : a.sig) {
      const auto& [s, t] = key;
      Rat steps_r = big / t;
      if (!is_integer(steps_r) || steps_r < 1)
        return UnnormalizableSignature{key};  // not a common multiple of the moduli
      Int steps = numerator(steps_r);
      for (Int j = 0; j < steps; ++j) {
        Rat ns = s + Rat(j) * t;
        if (ns > big) return UnnormalizableSignature{key};
        auto [it, fresh] = na.sig.emplace(PochKey{ns, big}, e);
        if (!fresh) {
          it->second += e;
          if (it->second == 0) na.sig.erase(it);
        }
      }
    }
    out.push_back(std::move(na));
  }
  return cf_merge(std::move(out));
}

// Sum of forms: canonicalize the concatenation when the rewrite applies,
// fall back to a plain merge otherwise.
inline CoefficientForm cf_sum(const std::vector<CoefficientForm>& forms) {
  std::vector<CoeffAtom> all;
  for (const CoefficientForm& f : forms)
    all.insert(all.end(), f.atoms.begin(), f.atoms.end());
  CoefficientForm merged = cf_merge(std::move(all));
  auto canon = cf_canonicalize(merged);
  return canon.ok() ? canon.value() : merged;
}

// Multiply a form by c * q^e; signatures are untouched.
inline CoefficientForm cf_scale(const CoefficientForm& form, const Rat& c, const Rat& e) {
  if (c == 0) return {};
  CoefficientForm out = form;
  for (CoeffAtom& a : out.atoms) {
    a.c *= c;
    a.e += e;
  }
  return cf_merge(std::move(out.atoms));
}

inline Int cf_denominator(const CoefficientForm& form) {
  Int d(1);
  for (const CoeffAtom& a : form.atoms) {
    d = int_lcm(d, denominator(a.e));
    for (const auto& [key, e] : a.sig) {
      d = int_lcm(d, denominator(key.first));
      d = int_lcm(d, denominator(key.second));
    }
  }
  return d;
}

inline QSeries cf_to_series(const CoefficientForm& form, const Rat& n_order, const Int& d) {
  QSeries acc = qs_zero(d, scale_to_int(n_order, d));
  for (const CoeffAtom& a : form.atoms) {
    Rat rel = n_order - a.e;
    if (rel < 0) continue;  // atom starts beyond the cutoff
    std::int64_t rel_ord = scale_to_int(rel, d);
    QSeries sig_ser = qs_monomial(d, Rat(1), Rat(0));
    sig_ser.ord = rel_ord;
    for (const auto& [key, e] : a.sig) {
      QSeries base = euler_expand(key.first, key.second, rel, d);
      sig_ser = series_mul(sig_ser, series_pow(base, e, rel_ord), rel_ord);
    }
    QSeries part = series_mul(qs_monomial(d, a.c, a.e), sig_ser);
    acc = series_add(acc, series_truncate(part, acc.ord));
  }
  return acc;
}

enum class ZeroVerdict { Zero, NonZero, UnknownToOrder };

struct ZeroCheck {
  ZeroVerdict verdict;
  Rat order;  // meaningful for UnknownToOrder
};

// Decide whether the exact value of the form is zero. A canonical empty
// form is Zero; a single shared signature factors out, leaving a nonzero
// q-polynomial (NonZero); otherwise compare as series through q^N, where a
// nonzero truncation certifies NonZero and a zero one leaves the verdict
// open at that order.
inline ZeroCheck cf_is_zero(const CoefficientForm& form, const Rat& n_order = Rat(100),
                            bool canonicalize = true) {
  CoefficientForm f = cf_merge(form.atoms);
  if (canonicalize) {
    auto canon = cf_canonicalize(f);
    if (canon.ok()) f = canon.value();
  }
  if (f.atoms.empty()) return {ZeroVerdict::Zero, 0};
  bool one_sig = true;
  for (const CoeffAtom& a : f.atoms)
    if (a.sig != f.atoms.front().sig) {
      one_sig = false;
      break;
    }
  if (one_sig) return {ZeroVerdict::NonZero, 0};
  QSeries ser = cf_to_series(f, n_order, cf_denominator(f));
  if (!ser.is_zero()) return {ZeroVerdict::NonZero, 0};
  return {ZeroVerdict::UnknownToOrder, n_order};
}

// Display form: "-q/(q;q)^4", "1/2*q^(3/2)*(q;q^2)^2/(q^2;q^2)^3", "0".
inline std::string cf_str(const CoefficientForm& form) {
  if (form.atoms.empty()) return "0";
  std::string out;
  bool first = true;
  for (const CoeffAtom& a : form.atoms) {
    std::vector<std::string> num, den;
    Rat ac = abs(a.c);
    if (a.e != 0) {
      if (a.e > 0)
        num.push_back(a.e == 1 ? "q" : (is_integer(a.e) ? "q^" + a.e.str()
                                                        : "q^(" + a.e.str() + ")"));
      else {
        Rat p = -a.e;
        den.push_back(p == 1 ? "q" : (is_integer(p) ? "q^" + p.str() : "q^(" + p.str() + ")"));
      }
    }
    auto qpow = [](const Rat& x) {
      if (x == 1) return std::string("q");
      return is_integer(x) ? "q^" + x.str() : "q^(" + x.str() + ")";
    };
    for (const auto& [key, e] : a.sig) {
      std::string base = "(" + qpow(key.first) + ";" + qpow(key.second) + ")";
      Int mag = abs(e);
      std::string piece = mag == 1 ? base : base + "^" + mag.str();
      (e > 0 ? num : den).push_back(piece);
    }
    std::string body;
    if (ac != 1 || num.empty()) body = ac.str();
    for (const std::string& p : num) body += (body.empty() ? "" : "*") + p;
    if (!den.empty()) {
      body += "/";
      if (den.size() == 1) {
        body += den[0];
      } else {
        body += "(";
        for (std::size_t i = 0; i < den.size(); ++i) body += (i ? "*" : "") + den[i];
        body += ")";
      }
    }
    if (first) {
      out += (a.c < 0 ? "-" : "") + body;
      first = false;
    } else {
      out += (a.c < 0 ? " - " : " + ") + body;
    }
  }
  return out;
}

}  // namespace thetaver
