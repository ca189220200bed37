#pragma once
// Certificate JSON. Schema (field names and order fixed):
//   { identity, mode, relations: [{alpha, rho, w, s, per_term_ok,
//     alpha_integral}], W, pi, checks: [{beta, terms, residual, verdict}],
//     status }
// Every number is the string of an exact rational; no binary floats appear
// anywhere. Serialization is canonical: parsing the emitted text and
// re-dumping it reproduces the bytes.
#include "thetaver/prover.hpp"

#include <json.hpp>

#include <string>

namespace thetaver {

using ordered_json = nlohmann::ordered_json;

namespace cert_io_detail {

inline ordered_json rat_vec_json(const RatVec& v) {
  ordered_json a = ordered_json::array();
  for (const Rat& x : v) a.push_back(x.str());
  return a;
}

inline ordered_json int_vec_json(const IntVec& v) {
  ordered_json a = ordered_json::array();
  for (const Int& x : v) a.push_back(x.str());
  return a;
}

inline ordered_json form_json(const CoefficientForm& f) {
  ordered_json arr = ordered_json::array();
  for (const CoeffAtom& a : f.atoms) {
    ordered_json atom;
    atom["constant"] = a.c.str();
    atom["q_exponent"] = a.e.str();
    ordered_json sig = ordered_json::array();
    for (const auto& [key, e] : a.sig) {
      ordered_json entry;
      entry["s"] = key.first.str();
      entry["t"] = key.second.str();
      entry["e"] = e.str();
      sig.push_back(entry);
    }
    atom["signature"] = sig;
    arr.push_back(atom);
  }
  return arr;
}

inline std::string verdict_str(ZeroVerdict v, const Rat& order) {
  switch (v) {
    case ZeroVerdict::Zero: return "Zero";
    case ZeroVerdict::NonZero: return "NonZero";
    case ZeroVerdict::UnknownToOrder: return "UnknownToOrder(" + order.str() + ")";
  }
  return "NonZero";
}

}  // namespace cert_io_detail

inline std::string status_str(const Status& st) {
  switch (st.kind) {
    case StatusKind::Proved: return "Proved";
    case StatusKind::VerifiedToOrder: return "VerifiedToOrder(" + st.order.str() + ")";
    case StatusKind::Failed: return "Failed: " + st.detail;
    case StatusKind::Unsupported: return "Unsupported: " + st.detail;
  }
  return "Unsupported";
}

// Process exit codes are a function of the certificate status alone:
// 0 proved, 2 verified to a truncation order only, 1 failed/unsupported
// (3 is reserved for inputs that do not parse).
inline int status_exit_code(const Status& st) {
  switch (st.kind) {
    case StatusKind::Proved: return 0;
    case StatusKind::VerifiedToOrder: return 2;
    case StatusKind::Failed:
    case StatusKind::Unsupported: return 1;
  }
  return 1;
}

inline ordered_json certificate_json(const Certificate& cert) {
  using namespace cert_io_detail;
  ordered_json j;
  j["identity"] = cert.identity_text;
  j["mode"] = cert.mode == ProofMode::Exact ? "Exact"
                                            : "Series(" + cert.series_order.str() + ")";
  ordered_json rels = ordered_json::array();
  for (std::size_t i = 0; i < cert.relations.relations.size(); ++i) {
    const ContiguousRelation& rel = cert.relations.relations[i];
    ordered_json rj;
    rj["alpha"] = rat_vec_json(rel.alpha);
    rj["rho"] = std::to_string(rel.rho);
    rj["w"] = int_vec_json(rel.w);
    rj["s"] = rel.s.str();
    ordered_json ok = ordered_json::array();
    if (i < cert.per_term_ok.size())
      for (bool b : cert.per_term_ok[i]) ok.push_back(b);
    rj["per_term_ok"] = ok;
    rj["alpha_integral"] = rel.alpha_integral();
    rels.push_back(rj);
  }
  j["relations"] = rels;
  ordered_json ws = ordered_json::array();
  for (const IntVec& v : cert.w) ws.push_back(int_vec_json(v));
  j["W"] = ws;
  ordered_json pis = ordered_json::array();
  for (const IntVec& v : cert.pi) pis.push_back(int_vec_json(v));
  j["pi"] = pis;
  ordered_json checks = ordered_json::array();
  for (const CheckRow& row : cert.checks) {
    ordered_json cj;
    cj["beta"] = int_vec_json(row.beta);
    ordered_json terms = ordered_json::array();
    for (const CoefficientForm& f : row.term_forms) terms.push_back(form_json(f));
    cj["terms"] = terms;
    cj["residual"] = form_json(row.residual);
    cj["verdict"] = verdict_str(row.verdict, row.order);
    checks.push_back(cj);
  }
  j["checks"] = checks;
  j["status"] = status_str(cert.status);
  return j;
}

inline std::string certificate_json_text(const Certificate& cert) {
  return certificate_json(cert).dump(2) + "\n";
}

}  // namespace thetaver
