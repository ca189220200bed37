#pragma once
// Recursive-descent parser and canonical formatter for the `.theta` identity
// language.
//
//   identity := header newline expr "=" expr
//   header   := "vars" ident+
//   expr     := ["-"] term (("+"|"-") term)*
//   term     := atom ("*" atom)*
//   atom     := monomial | poch | bracket , each optionally "^" intexp
//   poch     := "(" mono ("," mono)* ";" mono ")"     -- flat (x; q^t) symbols
//   bracket  := "[" mono ("," mono)* ";" mono "]"     -- [x;q^t] = (x, q^t/x; q^t)
//   mono     := signed product/quotient of variables, "q" and rational
//               constants, each optionally "^" (int | "(" int "/" int ")")
//
// Whitespace is free except for the newline ending the header; "#" starts a
// comment running to end of line. "q" is the reserved series variable.
#include "thetaver/expected.hpp"
#include "thetaver/theta.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace thetaver {

struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
};

enum class ParseErrorKind {
  UnexpectedToken,
  BadExponent,
  UnknownVariable,
  EmptyProduct,
  UnbalancedDelimiter,
  UnpairedFactor,
  NonUnitCoefficient,
};

struct ParseError {
  SourceSpan span;
  ParseErrorKind kind = ParseErrorKind::UnexpectedToken;
  std::string message;
};

namespace parse_detail {

enum class Tok {
  Ident,
  Number,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Semi,
  Plus,
  Minus,
  Star,
  Slash,
  Caret,
  Equals,
  Newline,
  End,
};

struct Token {
  Tok kind;
  SourceSpan span;
  std::string text;
};

inline Expected<std::vector<Token>, ParseError> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](Tok k, std::size_t a, std::size_t b) {
    out.push_back({k, {a, b}, std::string(src.substr(a, b - a))});
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '\n') {
      if (out.empty() || out.back().kind != Tok::Newline) push(Tok::Newline, i, i + 1);
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t a = i;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
        ++i;
      push(Tok::Ident, a, i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t a = i;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      push(Tok::Number, a, i);
      continue;
    }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '[': k = Tok::LBracket; break;
      case ']': k = Tok::RBracket; break;
      case ',': k = Tok::Comma; break;
      case ';': k = Tok::Semi; break;
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '^': k = Tok::Caret; break;
      case '=': k = Tok::Equals; break;
      default:
        return ParseError{{i, i + 1},
                          ParseErrorKind::UnexpectedToken,
                          std::string("unexpected character '") + c + "'"};
    }
    push(k, i, i + 1);
    ++i;
  }
  out.push_back({Tok::End, {src.size(), src.size()}, ""});
  return out;
}

// A parsed monomial: coeff * q^qexp * prod a_j^aexp_j.
struct MonoVal {
  Rat coeff = 1;
  Rat qexp = 0;
  IntVec aexp;
  SourceSpan span;
};

struct Parser {
  std::vector<Token> toks;
  std::size_t pos = 0;
  std::vector<std::string> vars;
  std::map<std::string, std::size_t> var_index;
  std::optional<ParseError> err;

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos + ahead;
    return i < toks.size() ? toks[i] : toks.back();
  }
  const Token& take() {
    const Token& t = toks[pos];
    if (pos + 1 < toks.size()) ++pos;
    return t;
  }
  void skip_newlines() {
    while (peek().kind == Tok::Newline) take();
  }
  std::nullopt_t fail(SourceSpan span, ParseErrorKind kind, std::string msg) {
    if (!err) err = ParseError{span, kind, std::move(msg)};
    return std::nullopt;
  }

  // --- monomials ---------------------------------------------------------

  // exponent := int | "-" int | "(" ["-"] int "/" int ")"
  std::optional<Rat> parse_exponent() {
    const Token& t = peek();
    if (t.kind == Tok::Number) return Rat(Int(take().text));
    if (t.kind == Tok::Minus) {
      take();
      if (peek().kind != Tok::Number)
        return fail(peek().span, ParseErrorKind::BadExponent, "expected digits after '-'");
      return Rat(-Int(take().text));
    }
    if (t.kind == Tok::LParen) {
      take();
      Int sign(1);
      if (peek().kind == Tok::Minus) {
        take();
        sign = -1;
      }
      if (peek().kind != Tok::Number)
        return fail(peek().span, ParseErrorKind::BadExponent, "expected numerator digits");
      Int num = sign * Int(take().text);
      Int den(1);
      if (peek().kind == Tok::Slash) {
        take();
        if (peek().kind != Tok::Number)
          return fail(peek().span, ParseErrorKind::BadExponent, "expected denominator digits");
        den = Int(take().text);
        if (den == 0)
          return fail(peek().span, ParseErrorKind::BadExponent, "zero denominator");
      }
      if (peek().kind != Tok::RParen)
        return fail(peek().span, ParseErrorKind::UnbalancedDelimiter,
                    "expected ')' closing exponent");
      take();
      return make_rat(num, den);
    }
    return fail(t.span, ParseErrorKind::BadExponent, "expected an exponent");
  }

  bool apply_power(MonoVal& m, const Rat& e, SourceSpan span) {
    if (is_integer(e)) {
      m.coeff = rat_pow(m.coeff, numerator(e));
    } else if (m.coeff != 1) {
      fail(span, ParseErrorKind::BadExponent,
           "fractional power of a rational constant is not exact");
      return false;
    }
    m.qexp *= e;
    for (Int& a : m.aexp) {
      Rat scaled = Rat(a) * e;
      if (!is_integer(scaled)) {
        fail(span, ParseErrorKind::BadExponent, "variable exponent must stay an integer");
        return false;
      }
      a = numerator(scaled);
    }
    return true;
  }

  // factor := number | "q" | var | "(" mono ")"  , "(" only in group position
  std::optional<MonoVal> parse_mono_factor(bool allow_group) {
    MonoVal m;
    m.aexp.assign(vars.size(), Int(0));
    const Token& t = peek();
    m.span = t.span;
    if (t.kind == Tok::Number) {
      m.coeff = Rat(Int(take().text));
    } else if (t.kind == Tok::Ident) {
      if (t.text == "q") {
        take();
        m.qexp = 1;
      } else {
        auto it = var_index.find(t.text);
        if (it == var_index.end()) {
          fail(t.span, ParseErrorKind::UnknownVariable,
               "unknown variable '" + t.text + "' (not in the vars header)");
          return std::nullopt;
        }
        take();
        m.aexp[it->second] = 1;
      }
    } else if (t.kind == Tok::LParen && allow_group) {
      take();
      auto inner = parse_mono(true, false);
      if (!inner) return std::nullopt;
      if (peek().kind != Tok::RParen) {
        fail(peek().span, ParseErrorKind::UnbalancedDelimiter, "expected ')' closing group");
        return std::nullopt;
      }
      take();
      m = *inner;
    } else {
      fail(t.span, ParseErrorKind::UnexpectedToken, "expected a variable, number or 'q'");
      return std::nullopt;
    }
    if (peek().kind == Tok::Caret) {
      SourceSpan caret = take().span;
      auto e = parse_exponent();
      if (!e) return std::nullopt;
      if (!apply_power(m, *e, caret)) return std::nullopt;
    }
    if (pos > 0) m.span.end = toks[pos - 1].span.end;
    return m;
  }

  // mono := [-] factor (("*"|"/") factor)*
  // At term level a "*" followed by "(" or "[" belongs to the enclosing
  // term (the next atom is a Pochhammer group), so the monomial stops.
  std::optional<MonoVal> parse_mono(bool sign_allowed, bool term_level) {
    MonoVal m;
    m.aexp.assign(vars.size(), Int(0));
    m.span = peek().span;
    if (sign_allowed && peek().kind == Tok::Minus) {
      take();
      m.coeff = -1;
    }
    bool invert = false;
    bool first = true;
    while (true) {
      bool allow_group = !first || !term_level;
      auto f = parse_mono_factor(allow_group);
      if (!f) return std::nullopt;
      if (invert) {
        if (f->coeff == 0) {
          fail(f->span, ParseErrorKind::BadExponent, "division by zero");
          return std::nullopt;
        }
        m.coeff /= f->coeff;
        m.qexp -= f->qexp;
        for (std::size_t j = 0; j < vars.size(); ++j) m.aexp[j] -= f->aexp[j];
      } else {
        m.coeff *= f->coeff;
        m.qexp += f->qexp;
        for (std::size_t j = 0; j < vars.size(); ++j) m.aexp[j] += f->aexp[j];
      }
      m.span.end = f->span.end;
      first = false;
      if (peek().kind == Tok::Star) {
        Tok next = peek(1).kind;
        if (term_level && (next == Tok::LParen || next == Tok::LBracket)) break;
        take();
        invert = false;
        continue;
      }
      if (peek().kind == Tok::Slash) {
        take();
        invert = true;
        continue;
      }
      break;
    }
    return m;
  }

  // --- Pochhammer groups --------------------------------------------------

  struct Group {
    std::vector<MonoVal> entries;
    Rat modulus;
    SourceSpan span;
    bool bracket = false;
  };

  std::optional<Group> parse_group(bool bracket) {
    Group g;
    g.bracket = bracket;
    g.span = peek().span;
    take();  // consumes '(' or '['
    Tok closer = bracket ? Tok::RBracket : Tok::RParen;
    if (peek().kind == Tok::Semi)
      return fail(peek().span, ParseErrorKind::EmptyProduct, "Pochhammer list is empty"),
             std::nullopt;
    while (true) {
      auto entry = parse_mono(true, false);
      if (!entry) return std::nullopt;
      g.entries.push_back(*entry);
      if (peek().kind == Tok::Comma) {
        take();
        continue;
      }
      if (peek().kind == Tok::Semi) {
        take();
        break;
      }
      fail(peek().span,
           peek().kind == Tok::End ? ParseErrorKind::UnbalancedDelimiter
                                   : ParseErrorKind::UnexpectedToken,
           "expected ',' or ';' in Pochhammer list");
      return std::nullopt;
    }
    auto mod = parse_mono(false, false);
    if (!mod) return std::nullopt;
    bool pure_q = mod->coeff == 1;
    for (const Int& a : mod->aexp) pure_q = pure_q && a == 0;
    if (!pure_q) {
      fail(mod->span, ParseErrorKind::UnexpectedToken,
           "Pochhammer modulus must be a power of q");
      return std::nullopt;
    }
    if (mod->qexp <= 0) {
      fail(mod->span, ParseErrorKind::BadExponent, "Pochhammer modulus must be positive");
      return std::nullopt;
    }
    g.modulus = mod->qexp;
    if (peek().kind != closer) {
      fail(peek().span, ParseErrorKind::UnbalancedDelimiter,
           bracket ? "expected ']' closing bracket" : "expected ')' closing Pochhammer");
      return std::nullopt;
    }
    g.span.end = take().span.end;
    return g;
  }

  // --- terms and expressions ----------------------------------------------

  struct TermAccum {
    Rat coeff = 1;
    Rat sigma = 0;
    IntVec kappa;
    std::vector<std::pair<QMonomial, Rat>> symbols;
    std::vector<SourceSpan> symbol_spans;
    PairResult direct;  // a-free contributions from negative-exponent groups
  };

  static QMonomial to_qmonomial(const MonoVal& m) {
    QMonomial q;
    q.sign = m.coeff < 0 ? -1 : +1;
    q.qexp = m.qexp;
    q.aexp = m.aexp;
    return q;
  }

  bool add_group(TermAccum& acc, const Group& g) {
    Int e(1);
    if (peek().kind == Tok::Caret) {
      SourceSpan caret = take().span;
      auto ex = parse_exponent();
      if (!ex) return false;
      if (!is_integer(*ex)) {
        fail(caret, ParseErrorKind::BadExponent, "Pochhammer exponent must be an integer");
        return false;
      }
      e = numerator(*ex);
    }
    if (e == 0) return true;

    for (const MonoVal& entry : g.entries) {
      if (entry.coeff != 1 && entry.coeff != -1) {
        fail(entry.span, ParseErrorKind::NonUnitCoefficient,
             "Pochhammer entry coefficient must be 1 or -1");
        return false;
      }
      QMonomial sym = to_qmonomial(entry);
      std::vector<QMonomial> expanded{sym};
      if (g.bracket) {
        QMonomial partner;
        partner.sign = sym.sign;
        partner.qexp = g.modulus - sym.qexp;
        partner.aexp.reserve(sym.aexp.size());
        for (const Int& a : sym.aexp) partner.aexp.push_back(-a);
        expanded.push_back(partner);
      }
      for (const QMonomial& s : expanded) {
        if (e > 0) {
          for (Int i = 0; i < e; ++i) {
            acc.symbols.emplace_back(s, g.modulus);
            acc.symbol_spans.push_back(entry.span);
          }
        } else {
          if (!s.a_free()) {
            fail(entry.span, ParseErrorKind::BadExponent,
                 "negative exponent on a Pochhammer with variable entries");
            return false;
          }
          if (!poch_accumulate_a_free(acc.direct, s, g.modulus, e)) {
            fail(entry.span, ParseErrorKind::BadExponent,
                 "a-free Pochhammer entry with nonpositive q-power");
            return false;
          }
        }
      }
    }
    return true;
  }

  std::optional<ThetaTerm> parse_term(int sign) {
    TermAccum acc;
    acc.coeff = sign;
    acc.kappa.assign(vars.size(), Int(0));
    bool any_atom = false;
    while (true) {
      const Token& t = peek();
      if (t.kind == Tok::LParen || t.kind == Tok::LBracket) {
        auto g = parse_group(t.kind == Tok::LBracket);
        if (!g) return std::nullopt;
        if (!add_group(acc, *g)) return std::nullopt;
      } else if (t.kind == Tok::Number || t.kind == Tok::Ident) {
        auto m = parse_mono(false, true);
        if (!m) return std::nullopt;
        acc.coeff *= m->coeff;
        acc.sigma += m->qexp;
        for (std::size_t j = 0; j < vars.size(); ++j) acc.kappa[j] += m->aexp[j];
      } else {
        fail(t.span, ParseErrorKind::UnexpectedToken, "expected a term");
        return std::nullopt;
      }
      any_atom = true;
      if (peek().kind == Tok::Star) {
        take();
        continue;
      }
      break;
    }
    if (!any_atom) {
      fail(peek().span, ParseErrorKind::EmptyProduct, "empty term");
      return std::nullopt;
    }
    auto paired = pair_all(acc.symbols);
    if (!paired.ok()) {
      const PairError& pe = paired.error();
      SourceSpan where = pe.symbol_index < acc.symbol_spans.size()
                             ? acc.symbol_spans[pe.symbol_index]
                             : peek().span;
      fail(where,
           pe.kind == PairErrorKind::UnpairedVariableFactor ? ParseErrorKind::UnpairedFactor
                                                            : ParseErrorKind::BadExponent,
           pe.message);
      return std::nullopt;
    }
    ThetaTerm term;
    term.coeff = acc.coeff * paired.value().coeff_scale * acc.direct.coeff_scale;
    term.mono.sign = +1;
    term.mono.qexp = acc.sigma;
    term.mono.aexp = acc.kappa;
    term.poch = paired.value().poch;
    term.poch.mul(acc.direct.poch);
    term.factors = paired.value().factors;
    return term;
  }

  std::optional<std::vector<ThetaTerm>> parse_expr() {
    std::vector<ThetaTerm> terms;
    skip_newlines();
    int sign = 1;
    if (peek().kind == Tok::Minus) {
      take();
      sign = -1;
    }
    while (true) {
      skip_newlines();
      auto term = parse_term(sign);
      if (!term) return std::nullopt;
      if (term->coeff != 0) terms.push_back(std::move(*term));
      skip_newlines();
      if (peek().kind == Tok::Plus) {
        take();
        sign = 1;
        continue;
      }
      if (peek().kind == Tok::Minus) {
        take();
        sign = -1;
        continue;
      }
      break;
    }
    return terms;
  }
};

}  // namespace parse_detail

inline Expected<Identity, ParseError> parse_identity(std::string_view text) {
  auto lexed = parse_detail::lex(text);
  if (!lexed.ok()) return lexed.error();
  parse_detail::Parser p;
  p.toks = lexed.value();

  using parse_detail::Tok;
  p.skip_newlines();
  if (p.peek().kind != Tok::Ident || p.peek().text != "vars")
    return ParseError{p.peek().span, ParseErrorKind::UnexpectedToken,
                      "identity must start with a 'vars' header"};
  p.take();
  while (p.peek().kind == Tok::Ident) {
    const parse_detail::Token& t = p.take();
    if (t.text == "q")
      return ParseError{t.span, ParseErrorKind::UnexpectedToken,
                        "'q' is reserved and cannot be a variable"};
    if (p.var_index.count(t.text))
      return ParseError{t.span, ParseErrorKind::UnexpectedToken,
                        "duplicate variable '" + t.text + "'"};
    p.var_index[t.text] = p.vars.size();
    p.vars.push_back(t.text);
  }
  if (p.vars.empty())
    return ParseError{p.peek().span, ParseErrorKind::UnexpectedToken,
                      "the vars header needs at least one variable"};
  if (p.peek().kind != Tok::Newline)
    return ParseError{p.peek().span, ParseErrorKind::UnexpectedToken,
                      "expected a newline after the vars header"};

  auto lhs = p.parse_expr();
  if (!lhs) return *p.err;
  if (p.peek().kind != Tok::Equals)
    return ParseError{p.peek().span, ParseErrorKind::UnexpectedToken,
                      "expected '=' between the two sides"};
  p.take();
  auto rhs = p.parse_expr();
  if (!rhs) return *p.err;
  p.skip_newlines();
  if (p.peek().kind != Tok::End)
    return ParseError{p.peek().span, ParseErrorKind::UnexpectedToken,
                      "trailing input after the identity"};

  Identity id;
  id.vars = p.vars;
  id.terms = std::move(*lhs);
  for (ThetaTerm& t : *rhs) {
    t.coeff = -t.coeff;
    id.terms.push_back(std::move(t));
  }
  if (id.terms.empty())
    return ParseError{{0, text.size()}, ParseErrorKind::EmptyProduct,
                      "identity has no nonzero terms"};
  return id;
}

// Parse a bare expression (no header) against a fixed variable list; used
// for candidate files and round-trip tests.
inline Expected<std::vector<ThetaTerm>, ParseError> parse_expr_text(
    const std::vector<std::string>& vars, std::string_view text) {
  auto lexed = parse_detail::lex(text);
  if (!lexed.ok()) return lexed.error();
  parse_detail::Parser p;
  p.toks = lexed.value();
  p.vars = vars;
  for (std::size_t i = 0; i < vars.size(); ++i) p.var_index[vars[i]] = i;
  auto terms = p.parse_expr();
  if (!terms) return *p.err;
  p.skip_newlines();
  if (p.peek().kind != parse_detail::Tok::End)
    return ParseError{p.peek().span, ParseErrorKind::UnexpectedToken,
                      "trailing input after the expression"};
  return *terms;
}

// ---------------------------------------------------------------------------
// Canonical formatting. format/parse round-trips to a structurally equal
// value; factors print as paired Pochhammer symbols (x, q^t/x).

inline std::string format_q_power(const Rat& e) {
  if (e == 1) return "q";
  if (is_integer(e)) return "q^" + e.str();
  return "q^(" + e.str() + ")";
}

inline std::string format_monomial(int sign, const Rat& qexp, const IntVec& aexp,
                                   const std::vector<std::string>& vars,
                                   bool q_first = false) {
  std::vector<std::string> num, den;
  auto piece = [](const std::string& base, const Rat& e) {
    if (e == 1) return base;
    if (is_integer(e)) return base + "^" + e.str();
    return base + "^(" + e.str() + ")";
  };
  if (q_first) {
    if (qexp > 0) num.push_back(piece("q", qexp));
    if (qexp < 0) den.push_back(piece("q", -qexp));
  }
  for (std::size_t j = 0; j < aexp.size(); ++j) {
    if (aexp[j] > 0) num.push_back(piece(vars[j], Rat(aexp[j])));
    if (aexp[j] < 0) den.push_back(piece(vars[j], Rat(-aexp[j])));
  }
  if (!q_first) {
    if (qexp > 0) {
      // q sits between positive variable powers and the closing slash
      num.push_back(piece("q", qexp));
    }
    if (qexp < 0) den.push_back(piece("q", -qexp));
  }
  std::string out = sign < 0 ? "-" : "";
  if (num.empty()) {
    out += "1";
  } else {
    for (std::size_t i = 0; i < num.size(); ++i) out += (i ? "*" : "") + num[i];
  }
  if (!den.empty()) {
    out += "/";
    if (den.size() == 1) {
      out += den[0];
    } else {
      out += "(";
      for (std::size_t i = 0; i < den.size(); ++i) out += (i ? "*" : "") + den[i];
      out += ")";
    }
  }
  return out;
}

inline std::string format_term(const ThetaTerm& term, const std::vector<std::string>& vars) {
  std::vector<std::string> pieces;
  Rat c = abs(term.coeff);
  bool mono_present = term.mono.qexp != 0 ||
                      !std::all_of(term.mono.aexp.begin(), term.mono.aexp.end(),
                                   [](const Int& e) { return e == 0; });
  if (c != 1) pieces.push_back(c.str());
  if (mono_present)
    pieces.push_back(format_monomial(+1, term.mono.qexp, term.mono.aexp, vars, true));
  for (const auto& [key, e] : term.poch.entries) {
    std::string p = "(" + format_q_power(key.first) + ";" + format_q_power(key.second) + ")";
    if (e != 1) p += "^" + e.str();
    pieces.push_back(p);
  }
  // group factors by modulus, first appearance order
  std::vector<Rat> moduli;
  for (const ThetaFactor& f : term.factors)
    if (std::find(moduli.begin(), moduli.end(), f.t) == moduli.end()) moduli.push_back(f.t);
  for (const Rat& t : moduli) {
    std::string body;
    bool first = true;
    for (const ThetaFactor& f : term.factors) {
      if (f.t != t) continue;
      int sgn = f.delta ? -1 : +1;
      IntVec neg;
      neg.reserve(f.gamma.size());
      for (const Int& a : f.gamma) neg.push_back(-a);
      if (!first) body += ",";
      body += format_monomial(sgn, f.z, f.gamma, vars);
      body += "," + format_monomial(sgn, t - f.z, neg, vars);
      first = false;
    }
    pieces.push_back("(" + body + ";" + format_q_power(t) + ")");
  }
  if (pieces.empty()) pieces.push_back(c.str());
  std::string out = term.coeff < 0 ? "-" : "";
  for (std::size_t i = 0; i < pieces.size(); ++i) out += (i ? "*" : "") + pieces[i];
  return out;
}

inline std::string format_identity(const Identity& id) {
  std::string out = "vars";
  for (const std::string& v : id.vars) out += " " + v;
  out += "\n";
  for (std::size_t i = 0; i < id.terms.size(); ++i) {
    std::string t = format_term(id.terms[i], id.vars);
    if (i == 0) {
      out += t;
    } else if (!t.empty() && t[0] == '-') {
      out += " - " + t.substr(1);
    } else {
      out += " + " + t;
    }
  }
  out += " = 0";
  return out;
}

}  // namespace thetaver
