#pragma once
// The verification pipeline: establish a shared system of contiguous
// relations, enumerate the integer points of their fundamental
// parallelepiped, and compare exact coefficients there. When a term falls
// outside the exactness hypotheses (dependent factor exponents or a factor
// count outside 1 < m <= r) the run downgrades to truncated series
// comparison and can at best report "verified to order N".
#include "thetaver/coeff_form.hpp"
#include "thetaver/contiguous.hpp"
#include "thetaver/laurent.hpp"
#include "thetaver/parallelepiped.hpp"
#include "thetaver/parser.hpp"

#include <optional>
#include <string>
#include <vector>

namespace thetaver {

enum class ProofMode { Exact, Series };

struct GateReport {
  std::vector<ValidationReport> terms;
  bool spans_match = true;
  std::size_t span_mismatch_term = 0;  // vs term 0, when !spans_match
  bool exact_ok = false;
  std::string reason;
};

inline GateReport soundness_gate(const Identity& id) {
  GateReport rep;
  std::size_t r = id.vars.size();
  bool all_eligible = true;
  for (std::size_t i = 0; i < id.terms.size(); ++i) {
    rep.terms.push_back(validate_term(id.terms[i], r));
    if (!rep.terms.back().exact_mode_eligible) {
      all_eligible = false;
      if (rep.reason.empty())
        rep.reason = "term " + std::to_string(i + 1) +
                     (rep.terms.back().gammas_independent
                          ? " has a factor count outside 1 < m <= r"
                          : " has dependent factor exponent vectors");
    }
  }
  if (!id.terms.empty()) {
    auto base = exponent_space(id.terms.front());
    for (std::size_t i = 1; i < id.terms.size(); ++i) {
      if (!spans_equal(base, exponent_space(id.terms[i]))) {
        rep.spans_match = false;
        rep.span_mismatch_term = i;
        if (rep.reason.empty())
          rep.reason = "terms 1 and " + std::to_string(i + 1) +
                       " span different exponent spaces";
        break;
      }
    }
  }
  rep.exact_ok = all_eligible && rep.spans_match;
  return rep;
}

struct CheckRow {
  IntVec beta;
  std::vector<CoefficientForm> term_forms;  // per term; empty in series mode
  CoefficientForm residual;
  ZeroVerdict verdict = ZeroVerdict::UnknownToOrder;
  Rat order;  // order backing an UnknownToOrder verdict
};

enum class StatusKind { Proved, VerifiedToOrder, Failed, Unsupported };

struct Status {
  StatusKind kind = StatusKind::Unsupported;
  Rat order;
  std::string detail;
};

struct Certificate {
  std::string identity_text;
  std::vector<std::string> vars;
  ProofMode mode = ProofMode::Exact;
  Rat series_order;  // N for series mode
  RelationSystem relations;
  std::vector<std::vector<bool>> per_term_ok;  // [relation][term]
  std::vector<IntVec> w;
  std::vector<IntVec> pi;
  Int saturation_index = 0;
  std::vector<CheckRow> checks;
  Status status;
};

struct VerifyOptions {
  Rat order = 100;
  std::optional<std::vector<RatVec>> shifts;
  std::optional<ProofMode> mode_override;
};

inline Certificate verify(const Identity& id, const VerifyOptions& opt = {}) {
  Certificate cert;
  cert.identity_text = format_identity(id);
  cert.vars = id.vars;
  cert.series_order = opt.order;

  if (id.terms.size() < 2) {
    cert.status = {StatusKind::Unsupported, 0, "identity needs at least two terms"};
    return cert;
  }

  GateReport gate = soundness_gate(id);
  bool exact = gate.exact_ok;
  if (opt.mode_override == ProofMode::Series) exact = false;
  if (opt.mode_override == ProofMode::Exact && !gate.exact_ok) {
    cert.status = {StatusKind::Unsupported, 0,
                   "exact mode requested but unavailable: " + gate.reason};
    return cert;
  }
  cert.mode = exact ? ProofMode::Exact : ProofMode::Series;

  auto rel = common_relation_system(id, opt.shifts);
  cert.relations = rel.system;
  cert.per_term_ok = rel.per_term_ok;
  if (rel.mismatch) {
    cert.status = {StatusKind::Failed, 0,
                   "relation mismatch at term " + std::to_string(rel.mismatch->term_index + 1) +
                       ", relation " + std::to_string(rel.mismatch->relation_index + 1) + ": " +
                       rel.mismatch->detail};
    return cert;
  }
  if (cert.relations.relations.empty()) {
    cert.status = {StatusKind::Unsupported, 0, "no contiguous relations available"};
    return cert;
  }

  for (const ContiguousRelation& cr : cert.relations.relations) cert.w.push_back(cr.w);
  PiSet pi = pi_points(cert.w);
  cert.pi = pi.points;
  cert.saturation_index = pi.saturation_index;

  if (exact) {
    bool any_unknown = false;
    std::optional<IntVec> failed_at;
    for (const IntVec& beta : pi.points) {
      CheckRow row;
      row.beta = beta;
      for (const ThetaTerm& term : id.terms)
        row.term_forms.push_back(extract_exact(term, beta));
      row.residual = cf_sum(row.term_forms);
      ZeroCheck zc = cf_is_zero(row.residual, opt.order);
      row.verdict = zc.verdict;
      row.order = zc.order;
      if (zc.verdict == ZeroVerdict::NonZero && !failed_at) failed_at = beta;
      if (zc.verdict == ZeroVerdict::UnknownToOrder) any_unknown = true;
      cert.checks.push_back(std::move(row));
    }
    if (failed_at) {
      cert.status = {StatusKind::Failed, 0,
                     "nonzero residual at beta = " + vec_str(*failed_at)};
    } else if (any_unknown) {
      cert.status = {StatusKind::VerifiedToOrder, opt.order,
                     "some residuals verified only as series"};
    } else {
      cert.status = {StatusKind::Proved, 0, ""};
    }
    return cert;
  }

  // series mode: full residual expansion through q^N
  Int d = identity_denominator(id);
  LaurentMap residual = expand_identity_residual(id, opt.order, d);
  if (!residual.empty()) {
    const auto& [eta, ser] = *residual.begin();
    CheckRow row;
    auto dec = decompose(eta, cert.w);
    row.beta = dec.ok() ? dec.value().beta : eta;
    CoeffAtom evidence;
    evidence.c = ser.coeffs.begin()->second;
    evidence.e = make_rat(Int(ser.coeffs.begin()->first), d);
    row.residual = cf_merge({evidence});
    row.verdict = ZeroVerdict::NonZero;
    cert.checks.push_back(std::move(row));
    cert.status = {StatusKind::Failed, 0,
                   "nonzero series residual at a-exponent " + vec_str(eta)};
    return cert;
  }
  for (const IntVec& beta : pi.points) {
    CheckRow row;
    row.beta = beta;
    row.verdict = ZeroVerdict::UnknownToOrder;
    row.order = opt.order;
    cert.checks.push_back(std::move(row));
  }
  cert.status = {StatusKind::VerifiedToOrder, opt.order, ""};
  return cert;
}

// ---------------------------------------------------------------------------
// Discovery: filter candidate terms by a set of relation laws, then find the
// exact rational dependencies among the survivors' coefficient columns on
// Pi_W, and re-verify every dependency before reporting it.

struct DiscoveryDependency {
  RatVec coeffs;  // over the surviving candidates
  Certificate certificate;
};

struct DiscoveryResult {
  std::vector<ThetaTerm> survivors;
  std::vector<std::size_t> survivor_index;  // positions in the input list
  PiSet pi;
  std::vector<DiscoveryDependency> dependencies;
};

struct NoCandidatesSurvive {
  std::vector<std::string> rejections;
};

struct DiscoverOptions {
  Rat order = 60;       // matrix truncation order; doubled once automatically
  Rat verify_order = 100;
};

namespace prover_detail {

inline QSeries candidate_beta_series(const ThetaTerm& term, const IntVec& beta,
                                     const Rat& n_order, const Int& d) {
  try {
    return cf_to_series(extract_exact(term, beta), n_order, d);
  } catch (const DependentGammas&) {
    LaurentMap m = expand_term(term, n_order, d);
    auto it = m.find(beta);
    return it == m.end() ? qs_zero(d, scale_to_int(n_order, d)) : it->second;
  }
}

inline std::vector<RatVec> dependency_kernel(const std::vector<ThetaTerm>& cands,
                                             const std::vector<IntVec>& pts,
                                             const Rat& n_order, const Int& d) {
  // rows indexed by (beta, scaled exponent), columns by candidate
  std::map<std::pair<std::size_t, std::int64_t>, std::size_t> row_of;
  std::vector<std::vector<Rat>> rows;
  for (std::size_t j = 0; j < cands.size(); ++j) {
    for (std::size_t bi = 0; bi < pts.size(); ++bi) {
      QSeries ser = candidate_beta_series(cands[j], pts[bi], n_order, d);
      for (const auto& [k, c] : ser.coeffs) {
        auto key = std::make_pair(bi, k);
        auto it = row_of.find(key);
        if (it == row_of.end()) {
          it = row_of.emplace(key, rows.size()).first;
          rows.emplace_back(cands.size());
        }
        rows[it->second][j] = c;
      }
    }
  }
  RatMat m = rows.empty() ? RatMat(1, cands.size()) : RatMat::from_rows(rows);
  return kernel_basis(m);
}

inline RatVec primitive_direction(const RatVec& v) {
  Int scale(1);
  for (const Rat& x : v) scale = int_lcm(scale, denominator(x));
  IntVec w;
  Int g(0);
  for (const Rat& x : v) {
    Rat s = x * Rat(scale);
    w.push_back(numerator(s));
    g = int_gcd(g, numerator(s));
  }
  if (g == 0) g = 1;
  int sign = 1;
  for (const Int& x : w)
    if (x != 0) {
      sign = x > 0 ? 1 : -1;
      break;
    }
  RatVec out;
  for (const Int& x : w) out.push_back(Rat(x * sign) / Rat(g));
  return out;
}

}  // namespace prover_detail

inline Expected<DiscoveryResult, NoCandidatesSurvive> discover(
    const RelationSystem& relations, const std::vector<ThetaTerm>& candidates,
    const std::vector<std::string>& vars, const DiscoverOptions& opt = {}) {
  DiscoveryResult out;
  NoCandidatesSurvive none;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool ok = true;
    std::string why;
    for (std::size_t ri = 0; ri < relations.relations.size() && ok; ++ri) {
      auto got = contig_detail::raw_shift(candidates[i], relations.relations[ri].alpha);
      if (!got.ok()) {
        ok = false;
        why = "candidate " + std::to_string(i + 1) + ": relation " + std::to_string(ri + 1) +
              " shift is not contiguous";
      } else if (!got.value().same_law(relations.relations[ri])) {
        ok = false;
        why = "candidate " + std::to_string(i + 1) + ": relation " + std::to_string(ri + 1) +
              " law differs";
      }
    }
    if (ok) {
      out.survivors.push_back(candidates[i]);
      out.survivor_index.push_back(i);
    } else {
      none.rejections.push_back(why);
    }
  }
  if (out.survivors.empty()) return none;

  std::vector<IntVec> w;
  for (const ContiguousRelation& rel : relations.relations) w.push_back(rel.w);
  out.pi = pi_points(w);

  Identity probe;
  probe.vars = vars;
  probe.terms = out.survivors;
  Int d = identity_denominator(probe);

  auto kernel =
      prover_detail::dependency_kernel(out.survivors, out.pi.points, opt.order, d);
  if (!kernel.empty()) {
    // reject low-order coincidences before verification
    kernel = prover_detail::dependency_kernel(out.survivors, out.pi.points, opt.order * 2, d);
  }

  std::vector<RatVec> shift_list;
  for (const ContiguousRelation& rel : relations.relations) shift_list.push_back(rel.alpha);
  for (const RatVec& v : kernel) {
    RatVec dir = prover_detail::primitive_direction(v);
    Identity dep;
    dep.vars = vars;
    for (std::size_t j = 0; j < out.survivors.size(); ++j) {
      if (dir[j] == 0) continue;
      ThetaTerm t = out.survivors[j];
      t.coeff *= dir[j];
      dep.terms.push_back(std::move(t));
    }
    VerifyOptions vo;
    vo.order = opt.verify_order;
    vo.shifts = shift_list;
    Certificate cert = verify(dep, vo);
    if (cert.status.kind == StatusKind::Proved ||
        cert.status.kind == StatusKind::VerifiedToOrder)
      out.dependencies.push_back({dir, std::move(cert)});
  }
  return out;
}

// Transport a base coefficient h_beta to h_eta, eta = beta + sum b_i w_i,
// by iterating each relation law: one application of relation i gives
//     h_eta = (-1)^(b_i rho_i) q^(b_i s_i + b_i alpha_i . eta
//                                - C(b_i + 1, 2) alpha_i . w_i) h_(eta - b_i w_i).
// The product of the step factors is the closed form the coefficient
// recurrence dictates.
inline CoefficientForm propagate_coefficient(const RelationSystem& sys,
                                             const CoefficientForm& base_form,
                                             const IntVec& b, const IntVec& eta) {
  if (b.size() != sys.relations.size())
    throw std::invalid_argument("propagate_coefficient: one multiplier per relation");
  Rat epow;
  int sign = +1;
  RatVec cur;
  for (const Int& x : eta) cur.push_back(Rat(x));
  for (std::size_t i = 0; i < sys.relations.size(); ++i) {
    const ContiguousRelation& rel = sys.relations[i];
    const Int& bi = b[i];
    Rat alpha_eta;
    for (std::size_t j = 0; j < cur.size(); ++j) alpha_eta += rel.alpha[j] * cur[j];
    epow += Rat(bi) * rel.s + Rat(bi) * alpha_eta -
            Rat(binom2(bi + 1)) * dot_mixed(rel.alpha, rel.w);
    if (bi % 2 != 0 && rel.rho == 1) sign = -sign;
    for (std::size_t j = 0; j < cur.size(); ++j) cur[j] -= Rat(bi * rel.w[j]);
  }
  return cf_scale(base_form, Rat(sign), epow);
}

// ---------------------------------------------------------------------------
// Human-readable transcript.

inline std::string format_relation_ratio(const ContiguousRelation& rel,
                                         const std::vector<std::string>& vars) {
  IntVec neg;
  neg.reserve(rel.w.size());
  for (const Int& x : rel.w) neg.push_back(-x);
  return format_monomial(rel.rho ? -1 : +1, -rel.s, neg, vars);
}

inline std::string format_relation(const ContiguousRelation& rel,
                                   const std::vector<std::string>& vars) {
  std::string args;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (j) args += ", ";
    args += vars[j];
    if (rel.alpha[j] != 0) args += "*" + format_q_power(rel.alpha[j]);
  }
  std::string plain;
  for (std::size_t j = 0; j < vars.size(); ++j) plain += (j ? ", " : "") + vars[j];
  return "theta(" + args + ") / theta(" + plain + ") = " +
         format_relation_ratio(rel, vars);
}

inline std::string explain(const Certificate& cert) {
  std::string out;
  out += "identity:\n  " + cert.identity_text + "\n";
  out += "mode: ";
  out += cert.mode == ProofMode::Exact
             ? "exact\n"
             : "series (order " + cert.series_order.str() + ")\n";
  out += "relations (" + std::to_string(cert.relations.relations.size()) + "):\n";
  for (const ContiguousRelation& rel : cert.relations.relations) {
    out += "  " + format_relation(rel, cert.vars) + "   [alpha = " + vec_str(rel.alpha) + "]";
    if (!rel.alpha_integral()) out += "  (non-integral shift)";
    out += "\n";
  }
  if (!cert.w.empty()) {
    out += "W = {";
    for (std::size_t i = 0; i < cert.w.size(); ++i)
      out += (i ? ", " : " ") + vec_str(cert.w[i]);
    out += " }\n";
    out += "Pi_W (" + std::to_string(cert.pi.size()) + " points):";
    for (const IntVec& p : cert.pi) out += " " + vec_str(p);
    out += "\n";
  }
  if (!cert.checks.empty()) {
    out += "coefficient checks:\n";
    for (const CheckRow& row : cert.checks) {
      out += "  beta = " + vec_str(row.beta) + ":\n";
      for (std::size_t i = 0; i < row.term_forms.size(); ++i)
        out += "    term " + std::to_string(i + 1) + ": " + cf_str(row.term_forms[i]) + "\n";
      out += "    residual: " + cf_str(row.residual) + "\n";
      switch (row.verdict) {
        case ZeroVerdict::Zero: out += "    verdict: zero (exact)\n"; break;
        case ZeroVerdict::NonZero: out += "    verdict: nonzero\n"; break;
        case ZeroVerdict::UnknownToOrder:
          out += "    verdict: zero to order " + row.order.str() + "\n";
          break;
      }
    }
  }
  out += "status: ";
  switch (cert.status.kind) {
    case StatusKind::Proved: out += "proved\n"; break;
    case StatusKind::VerifiedToOrder:
      out += "verified to order " + cert.status.order.str() + "\n";
      break;
    case StatusKind::Failed: out += "failed (" + cert.status.detail + ")\n"; break;
    case StatusKind::Unsupported: out += "unsupported (" + cert.status.detail + ")\n"; break;
  }
  return out;
}

}  // namespace thetaver
