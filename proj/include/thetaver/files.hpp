#pragma once
// Small line-oriented input formats:
//   shifts file:     one shift vector per line, "(1,0,1/2,0)", "#" comments
//   relations file:  "alpha=(...) rho=0|1 w=(...) s=<rational>" per line
//   candidates file: "vars ..." header, then one term expression per line
#include "thetaver/contiguous.hpp"
#include "thetaver/expected.hpp"
#include "thetaver/parser.hpp"

#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace thetaver {

struct FileFormatError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

namespace files_detail {

inline std::string strip(std::string s) {
  auto hash = s.find('#');
  if (hash != std::string::npos) s.erase(hash);
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline bool parse_rat_token(std::string_view tok, Rat& out) {
  std::string t(tok);
  if (t.empty()) return false;
  try {
    out = Rat(t);  // gmp accepts "p/q" and "-p/q"
  } catch (...) {
    return false;
  }
  return denominator(out) > 0;
}

// "(a,b,c)" with rational components
inline bool parse_vec(std::string_view text, RatVec& out) {
  out.clear();
  if (text.size() < 2 || text.front() != '(' || text.back() != ')') return false;
  std::string inner(text.substr(1, text.size() - 2));
  std::stringstream ss(inner);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    Rat v;
    std::size_t a = piece.find_first_not_of(" \t");
    std::size_t b = piece.find_last_not_of(" \t");
    if (a == std::string::npos) return false;
    if (!parse_rat_token(std::string_view(piece).substr(a, b - a + 1), v)) return false;
    out.push_back(v);
  }
  return !out.empty();
}

}  // namespace files_detail

inline Expected<std::vector<RatVec>, FileFormatError> parse_shifts_file(std::string_view text) {
  std::vector<RatVec> out;
  std::stringstream ss{std::string(text)};
  std::string line;
  std::size_t no = 0;
  std::size_t width = 0;
  while (std::getline(ss, line)) {
    ++no;
    std::string body = files_detail::strip(line);
    if (body.empty()) continue;
    RatVec v;
    if (!files_detail::parse_vec(body, v))
      return FileFormatError{no, "expected a parenthesized vector of rationals"};
    if (width == 0) width = v.size();
    if (v.size() != width)
      return FileFormatError{no, "shift vectors have inconsistent lengths"};
    out.push_back(std::move(v));
  }
  if (out.empty()) return FileFormatError{0, "no shift vectors found"};
  return out;
}

inline Expected<std::vector<ContiguousRelation>, FileFormatError> parse_relations_file(
    std::string_view text) {
  std::vector<ContiguousRelation> out;
  std::stringstream ss{std::string(text)};
  std::string line;
  std::size_t no = 0;
  while (std::getline(ss, line)) {
    ++no;
    std::string body = files_detail::strip(line);
    if (body.empty()) continue;
    ContiguousRelation rel;
    bool have_alpha = false, have_rho = false, have_w = false, have_s = false;
    std::stringstream ls(body);
    std::string field;
    while (ls >> field) {
      auto eq = field.find('=');
      if (eq == std::string::npos)
        return FileFormatError{no, "expected key=value fields"};
      std::string key = field.substr(0, eq);
      std::string val = field.substr(eq + 1);
      if (key == "alpha") {
        if (!files_detail::parse_vec(val, rel.alpha))
          return FileFormatError{no, "bad alpha vector"};
        have_alpha = true;
      } else if (key == "rho") {
        if (val != "0" && val != "1") return FileFormatError{no, "rho must be 0 or 1"};
        rel.rho = val == "1" ? 1 : 0;
        have_rho = true;
      } else if (key == "w") {
        RatVec wr;
        if (!files_detail::parse_vec(val, wr)) return FileFormatError{no, "bad w vector"};
        rel.w.clear();
        for (const Rat& x : wr) {
          if (!is_integer(x)) return FileFormatError{no, "w entries must be integers"};
          rel.w.push_back(numerator(x));
        }
        have_w = true;
      } else if (key == "s") {
        if (!files_detail::parse_rat_token(val, rel.s))
          return FileFormatError{no, "bad rational s"};
        have_s = true;
      } else {
        return FileFormatError{no, "unknown field '" + key + "'"};
      }
    }
    if (!(have_alpha && have_rho && have_w && have_s))
      return FileFormatError{no, "each relation needs alpha, rho, w and s"};
    if (rel.alpha.size() != rel.w.size())
      return FileFormatError{no, "alpha and w have different lengths"};
    out.push_back(std::move(rel));
  }
  if (out.empty()) return FileFormatError{0, "no relations found"};
  return out;
}

struct CandidateFile {
  std::vector<std::string> vars;
  std::vector<ThetaTerm> candidates;
};

inline Expected<CandidateFile, FileFormatError> parse_candidates_file(std::string_view text) {
  CandidateFile out;
  std::stringstream ss{std::string(text)};
  std::string line;
  std::size_t no = 0;
  bool have_header = false;
  while (std::getline(ss, line)) {
    ++no;
    std::string body = files_detail::strip(line);
    if (body.empty()) continue;
    if (!have_header) {
      std::stringstream hs(body);
      std::string word;
      hs >> word;
      if (word != "vars") return FileFormatError{no, "candidates file must start with 'vars'"};
      while (hs >> word) {
        if (word == "q") return FileFormatError{no, "'q' is reserved"};
        out.vars.push_back(word);
      }
      if (out.vars.empty()) return FileFormatError{no, "vars header is empty"};
      have_header = true;
      continue;
    }
    auto terms = parse_expr_text(out.vars, body);
    if (!terms.ok())
      return FileFormatError{no, "candidate does not parse: " + terms.error().message};
    if (terms.value().size() != 1)
      return FileFormatError{no, "each candidate line must hold exactly one term"};
    out.candidates.push_back(terms.value().front());
  }
  if (!have_header) return FileFormatError{0, "missing vars header"};
  if (out.candidates.empty()) return FileFormatError{0, "no candidate terms found"};
  return out;
}

}  // namespace thetaver
