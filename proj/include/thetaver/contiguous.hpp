#pragma once
// Contiguous relations: exact ratio laws theta(a o q^alpha) / theta(a)
// = (-1)^rho / (a^w q^s). Shifting a_j -> a_j q^(alpha_j) moves each
// factor's inner q-power by mu_i = alpha . gamma_i; the shift is contiguous
// iff every mu_i is an integer multiple upsilon_i of the factor modulus t_i,
// and then
//     w  = sum upsilon_i gamma_i
//     s  = sum (z_i upsilon_i + C(upsilon_i, 2) t_i) - alpha . kappa
//     rho = parity of sum (delta_i + 1) upsilon_i .
#include "thetaver/expected.hpp"
#include "thetaver/linalg.hpp"
#include "thetaver/theta.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace thetaver {

struct ContiguousRelation {
  RatVec alpha;
  int rho = 0;
  IntVec w;
  Rat s;

  bool alpha_integral() const {
    return std::all_of(alpha.begin(), alpha.end(), [](const Rat& a) { return is_integer(a); });
  }
  bool same_law(const ContiguousRelation& o) const {
    return rho == o.rho && w == o.w && s == o.s;
  }
  bool operator==(const ContiguousRelation&) const = default;
};

struct RelationSystem {
  std::vector<ContiguousRelation> relations;  // w vectors linearly independent
};

enum class ShiftErrorKind { NotContiguous, DegenerateShift };

struct ShiftError {
  ShiftErrorKind kind;
  std::size_t factor_index = 0;
};

struct NoNonzeroEpsilon : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace contig_detail {

// Shift law without the degeneracy check; w may come out zero.
inline Expected<ContiguousRelation, ShiftError> raw_shift(const ThetaTerm& term,
                                                          const RatVec& alpha) {
  std::size_t r = alpha.size();
  ContiguousRelation rel;
  rel.alpha = alpha;
  rel.w.assign(r, Int(0));
  Int rho_acc(0);
  for (std::size_t i = 0; i < term.factors.size(); ++i) {
    const ThetaFactor& f = term.factors[i];
    Rat mu = dot_mixed(alpha, f.gamma);
    Rat ups = mu / f.t;
    if (!is_integer(ups)) return ShiftError{ShiftErrorKind::NotContiguous, i};
    Int u = numerator(ups);
    for (std::size_t j = 0; j < r; ++j) rel.w[j] += u * f.gamma[j];
    rel.s += f.z * Rat(u) + Rat(binom2(u)) * f.t;
    rho_acc += (f.delta + 1) * u;
  }
  rel.s -= dot_mixed(alpha, term.mono.aexp);
  rel.rho = static_cast<int>(((rho_acc % 2) + 2) % 2);
  return rel;
}

inline bool is_zero_vec(const IntVec& v) {
  return std::all_of(v.begin(), v.end(), [](const Int& x) { return x == 0; });
}

}  // namespace contig_detail

inline Expected<ContiguousRelation, ShiftError> apply_shift(const ThetaTerm& term,
                                                            const RatVec& alpha) {
  auto rel = contig_detail::raw_shift(term, alpha);
  if (!rel.ok()) return rel;
  if (contig_detail::is_zero_vec(rel.value().w))
    return ShiftError{ShiftErrorKind::DegenerateShift, 0};
  return rel;
}

// Lemma-style derivation: given combination weights k over the factors,
// solve x . gamma_i = k_i t_i (and x . gamma_j = 0 where k_j = 0), then
// scale by the least positive integer c with every c k_i integral. The
// resulting relation has w = c * sum k_i gamma_i.
inline ContiguousRelation derive_relation(const ThetaTerm& term, const RatVec& k) {
  std::size_t m = term.factors.size();
  if (k.size() != m) throw std::invalid_argument("derive_relation: one weight per factor");
  if (std::all_of(k.begin(), k.end(), [](const Rat& x) { return x == 0; }))
    throw std::invalid_argument("derive_relation: k must be nonzero");
  std::size_t r = term.factors.front().gamma.size();
  RatMat aug(m, r + 1);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < r; ++j) aug(i, j) = Rat(term.factors[i].gamma[j]);
    aug(i, r) = k[i] * term.factors[i].t;
  }
  auto pivots = rref(aug);
  for (auto p : pivots)
    if (p == r)
      throw NoNonzeroEpsilon("derive_relation: shift system is inconsistent");
  RatVec x(r);
  for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = aug(i, r);
  Int c(1);
  for (const Rat& ki : k) c = int_lcm(c, denominator(ki));
  for (Rat& xi : x) xi *= Rat(c);
  auto rel = apply_shift(term, x);
  if (!rel.ok()) throw std::logic_error("derive_relation: derived shift is not contiguous");
  return rel.value();
}

// Lattice of shifts, inside the span of all factor exponents, that are
// contiguous for every listed term. Basis size equals the span dimension.
inline std::vector<RatVec> shared_shift_lattice(const std::vector<const ThetaTerm*>& terms,
                                                std::size_t r) {
  std::vector<IntVec> gammas;
  std::vector<Rat> moduli;
  for (const ThetaTerm* t : terms)
    for (const ThetaFactor& f : t->factors) {
      gammas.push_back(f.gamma);
      moduli.push_back(f.t);
    }
  if (gammas.empty()) return {};

  // basis B of the common exponent span
  RatMat g(gammas.size(), r);
  for (std::size_t i = 0; i < gammas.size(); ++i)
    for (std::size_t j = 0; j < r; ++j) g(i, j) = Rat(gammas[i][j]);
  auto pivots = rref(g);
  std::size_t d = pivots.size();
  RatMat b(d, r);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < r; ++j) b(i, j) = g(i, j);

  // constraints: (B gamma / t) . y integral, alpha = y B
  RatMat p(gammas.size(), d);
  Int c(1);
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      Rat acc;
      for (std::size_t j = 0; j < r; ++j) acc += b(k, j) * Rat(gammas[i][j]);
      p(i, k) = acc / moduli[i];
      c = int_lcm(c, denominator(p(i, k)));
    }
  }
  IntMat pi(gammas.size(), d);
  for (std::size_t i = 0; i < gammas.size(); ++i)
    for (std::size_t k = 0; k < d; ++k) {
      Rat scaled = p(i, k) * Rat(c);
      pi(i, k) = numerator(scaled);
    }
  auto [s, u, v] = snf(pi);
  // P y in c Z^M  <=>  y = V z with z_j in (c / d_j) Z
  std::vector<RatVec> alphas;
  for (std::size_t j = 0; j < d; ++j) {
    if (s(j, j) == 0)
      throw std::logic_error("shared_shift_lattice: constraint matrix lost rank");
    Rat scale = make_rat(c, s(j, j));
    RatVec y(d);
    for (std::size_t i = 0; i < d; ++i) y[i] = Rat(v(i, j)) * scale;
    RatVec alpha(r);
    for (std::size_t col = 0; col < r; ++col) {
      Rat acc;
      for (std::size_t i = 0; i < d; ++i) acc += y[i] * b(i, col);
      alpha[col] = acc;
    }
    alphas.push_back(std::move(alpha));
  }
  return alphas;
}

enum class RelationBasisErrorKind {
  NotContiguous,
  DegenerateShift,
  DependentRelations,
};

struct RelationBasisError {
  RelationBasisErrorKind kind;
  std::size_t index = 0;  // offending shift / relation
};

namespace contig_detail {

inline bool w_rows_independent(const std::vector<ContiguousRelation>& rels) {
  if (rels.empty()) return true;
  RatMat m(rels.size(), rels.front().w.size());
  for (std::size_t i = 0; i < rels.size(); ++i)
    for (std::size_t j = 0; j < rels.front().w.size(); ++j) m(i, j) = Rat(rels[i].w[j]);
  return rank(m) == rels.size();
}

}  // namespace contig_detail

inline Expected<RelationSystem, RelationBasisError> relation_basis(
    const ThetaTerm& term, const std::optional<std::vector<RatVec>>& shifts = std::nullopt) {
  RelationSystem sys;
  if (shifts) {
    for (std::size_t i = 0; i < shifts->size(); ++i) {
      auto rel = apply_shift(term, (*shifts)[i]);
      if (!rel.ok())
        return RelationBasisError{rel.error().kind == ShiftErrorKind::NotContiguous
                                      ? RelationBasisErrorKind::NotContiguous
                                      : RelationBasisErrorKind::DegenerateShift,
                                  i};
      sys.relations.push_back(rel.value());
    }
    if (!contig_detail::w_rows_independent(sys.relations))
      return RelationBasisError{RelationBasisErrorKind::DependentRelations, 0};
    return sys;
  }
  if (term.factors.empty()) return sys;
  std::size_t r = term.factors.front().gamma.size();
  if (validate_term(term, r).gammas_independent) {
    for (std::size_t j = 0; j < term.factors.size(); ++j) {
      RatVec k(term.factors.size());
      k[j] = 1;
      sys.relations.push_back(derive_relation(term, k));
    }
    return sys;
  }
  // dependent exponents: derive from this term's own shift lattice
  for (const RatVec& alpha : shared_shift_lattice({&term}, r)) {
    auto rel = apply_shift(term, alpha);
    if (rel.ok()) sys.relations.push_back(rel.value());
  }
  if (!contig_detail::w_rows_independent(sys.relations))
    return RelationBasisError{RelationBasisErrorKind::DependentRelations, 0};
  return sys;
}

struct MismatchReport {
  std::size_t term_index = 0;
  std::size_t relation_index = 0;
  std::string detail;
};

struct CommonRelationsResult {
  RelationSystem system;                       // laws read off the first term
  std::vector<std::vector<bool>> per_term_ok;  // [relation][term]
  std::optional<MismatchReport> mismatch;      // first disagreement
};

// Shared relation system of all terms of an identity. With explicit shifts
// each one must be contiguous for every term with an identical law. In auto
// mode candidate shifts come from the shared shift lattice of all terms;
// the laws are read off the first term and then checked against the rest.
inline CommonRelationsResult common_relation_system(
    const Identity& id, const std::optional<std::vector<RatVec>>& shifts = std::nullopt) {
  CommonRelationsResult out;
  if (id.terms.empty()) {
    out.mismatch = MismatchReport{0, 0, "identity has no terms"};
    return out;
  }
  const ThetaTerm& first = id.terms.front();
  std::size_t r = id.vars.size();

  std::vector<RatVec> candidate_shifts;
  if (shifts) {
    for (std::size_t i = 0; i < shifts->size(); ++i)
      if ((*shifts)[i].size() != r) {
        out.mismatch = MismatchReport{0, i, "shift vector length differs from the variable count"};
        return out;
      }
    candidate_shifts = *shifts;
  } else {
    std::vector<const ThetaTerm*> ptrs;
    for (const ThetaTerm& t : id.terms) ptrs.push_back(&t);
    candidate_shifts = shared_shift_lattice(ptrs, r);
  }

  for (std::size_t i = 0; i < candidate_shifts.size(); ++i) {
    auto rel = contig_detail::raw_shift(first, candidate_shifts[i]);
    if (!rel.ok()) {
      if (!out.mismatch)
        out.mismatch = MismatchReport{0, i, "shift is not contiguous for term 1"};
      continue;
    }
    if (contig_detail::is_zero_vec(rel.value().w)) {
      if (shifts && !out.mismatch)
        out.mismatch = MismatchReport{0, i, "shift degenerates (w = 0) on term 1"};
      continue;  // auto mode: silently skip directions outside the first term's span
    }
    // keep only relations that extend the independent set
    std::vector<ContiguousRelation> trial = out.system.relations;
    trial.push_back(rel.value());
    if (!contig_detail::w_rows_independent(trial)) {
      if (shifts && !out.mismatch)
        out.mismatch = MismatchReport{0, i, "relation exponent vectors are dependent"};
      continue;
    }
    out.system.relations.push_back(rel.value());
  }

  out.per_term_ok.assign(out.system.relations.size(),
                         std::vector<bool>(id.terms.size(), false));
  for (std::size_t ri = 0; ri < out.system.relations.size(); ++ri) {
    const ContiguousRelation& want = out.system.relations[ri];
    out.per_term_ok[ri][0] = true;
    for (std::size_t ti = 1; ti < id.terms.size(); ++ti) {
      auto got = contig_detail::raw_shift(id.terms[ti], want.alpha);
      bool ok = got.ok() && got.value().same_law(want);
      out.per_term_ok[ri][ti] = ok;
      if (!ok && !out.mismatch) {
        std::string why = !got.ok() ? "shift is not contiguous for this term"
                                    : "relation law differs on this term";
        out.mismatch = MismatchReport{ti, ri, why};
      }
    }
  }
  return out;
}

}  // namespace thetaver
