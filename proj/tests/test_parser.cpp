#include "thetaver/parser.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace thetaver;

TEST_CASE("parse the two-variable quotient identity") {
  auto res = parse_identity(
      "vars a b\n"
      "(a,-b,q/a,-q/b;q) + (-a,b,-q/a,q/b;q) = "
      "2*(q;q^2)^-2*(a*b,q^2/(a*b),a*q/b,b*q/a;q^2)");
  REQUIRE(res.ok());
  const Identity& id = res.value();
  CHECK(id.vars == std::vector<std::string>{"a", "b"});
  REQUIRE(id.terms.size() == 3);

  const ThetaTerm& t0 = id.terms[0];
  CHECK(t0.coeff == 1);
  REQUIRE(t0.factors.size() == 2);
  CHECK(t0.factors[0].delta == 0);
  CHECK(t0.factors[0].gamma == IntVec{1, 0});
  CHECK(t0.factors[0].z == 0);
  CHECK(t0.factors[0].t == 1);
  CHECK(t0.factors[1].delta == 1);
  CHECK(t0.factors[1].gamma == IntVec{0, 1});

  const ThetaTerm& t2 = id.terms[2];  // moved right side
  CHECK(t2.coeff == -2);
  REQUIRE(t2.factors.size() == 2);
  CHECK(t2.factors[0].gamma == IntVec{1, 1});
  CHECK(t2.factors[0].t == 2);
  CHECK(t2.factors[1].gamma == IntVec{1, -1});
  CHECK(t2.factors[1].z == 1);
  CHECK(t2.poch.entries.at({Rat(1), Rat(2)}) == -2);
}

TEST_CASE("trivial identities and parse errors") {
  auto triv = parse_identity("vars z\n[z;q] = [z;q]");
  REQUIRE(triv.ok());
  REQUIRE(triv.value().terms.size() == 2);
  CHECK(triv.value().terms[0].coeff == 1);
  CHECK(triv.value().terms[1].coeff == -1);
  CHECK(triv.value().terms[0].factors == triv.value().terms[1].factors);

  SECTION("unbalanced Pochhammer") {
    auto bad = parse_identity("vars z\n(z;q");
    REQUIRE_FALSE(bad.ok());
    CHECK(bad.error().kind == ParseErrorKind::UnbalancedDelimiter);
    CHECK(bad.error().span.start <= bad.error().span.end);
  }

  SECTION("unknown variable") {
    auto bad = parse_identity("vars z\n[z;q] = [w;q]");
    REQUIRE_FALSE(bad.ok());
    CHECK(bad.error().kind == ParseErrorKind::UnknownVariable);
  }

  SECTION("fractional variable exponent") {
    auto bad = parse_identity("vars z\n[z^(1/2);q] = [z;q]");
    REQUIRE_FALSE(bad.ok());
    CHECK(bad.error().kind == ParseErrorKind::BadExponent);
  }

  SECTION("unpaired variable Pochhammer entry") {
    auto bad = parse_identity("vars z\n(z;q) = (z;q)");
    REQUIRE_FALSE(bad.ok());
    CHECK(bad.error().kind == ParseErrorKind::UnpairedFactor);
  }

  SECTION("non-unit coefficient inside a Pochhammer") {
    auto bad = parse_identity("vars z\n(2*z,q/(2*z);q) = [z;q]");
    REQUIRE_FALSE(bad.ok());
    CHECK(bad.error().kind == ParseErrorKind::NonUnitCoefficient);
  }

  SECTION("negative bracket power with variables") {
    auto bad = parse_identity("vars z\n[z;q]^-1 = [z;q]");
    REQUIRE_FALSE(bad.ok());
    CHECK(bad.error().kind == ParseErrorKind::BadExponent);
  }

  SECTION("missing header") {
    auto bad = parse_identity("[z;q] = [z;q]");
    REQUIRE_FALSE(bad.ok());
    CHECK(bad.error().kind == ParseErrorKind::UnexpectedToken);
  }

  SECTION("zero right side is allowed") {
    auto ok = parse_identity("vars z\n[z;q] - [z;q] = 0");
    REQUIRE(ok.ok());
    CHECK(ok.value().terms.size() == 2);
  }
}

TEST_CASE("comments, whitespace and fractional q-powers") {
  auto res = parse_identity(
      "# leading comment\n"
      "vars x y   # trailing comment\n"
      "q^(1/2)*x*y*[-q*x^2;q^2]*[-q*y^2;q^2]\n"
      "   = q^(1/2)*x*y*[-q*x^2;q^2]*[-q*y^2;q^2]\n");
  REQUIRE(res.ok());
  const ThetaTerm& t = res.value().terms[0];
  CHECK(t.mono.qexp == make_rat(1, 2));
  CHECK(t.mono.aexp == IntVec{1, 1});
  REQUIRE(t.factors.size() == 2);
  CHECK(t.factors[0].delta == 1);
  CHECK(t.factors[0].gamma == IntVec{2, 0});
  CHECK(t.factors[0].z == 1);
  CHECK(t.factors[0].t == 2);
}

TEST_CASE("format_term produces canonical round-tripping text") {
  auto res = parse_identity(
      "vars a b\n"
      "(a,-b,q/a,-q/b;q) + (-a,b,-q/a,q/b;q) = "
      "2*(q;q^2)^-2*(a*b,q^2/(a*b),a*q/b,b*q/a;q^2)");
  REQUIRE(res.ok());
  const Identity& id = res.value();

  // the right-hand term was negated by the parser; flip it back for display
  ThetaTerm rhs = id.terms[2];
  rhs.coeff = -rhs.coeff;
  CHECK(format_term(rhs, id.vars) == "2*(q;q^2)^-2*(a*b,q^2/(a*b),a*q/b,b*q/a;q^2)");

  SECTION("identity-level round trip") {
    std::string text = format_identity(id);
    auto re = parse_identity(text);
    REQUIRE(re.ok());
    CHECK(re.value() == id);
  }

  SECTION("prefactor exponent convention") {
    auto pre = parse_identity("vars x y\nq^(1/2)*x*y*[x*y;q] = q^(1/2)*x*y*[x*y;q]");
    REQUIRE(pre.ok());
    std::string text = format_term(pre.value().terms[0], pre.value().vars);
    CHECK(text.find("q^(1/2)*x*y") != std::string::npos);
    auto round = parse_expr_text(pre.value().vars, text);
    REQUIRE(round.ok());
    REQUIRE(round.value().size() == 1);
    CHECK(round.value()[0] == pre.value().terms[0]);
  }
}

TEST_CASE("random small terms round-trip through format and parse") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> small(-2, 2);
  std::uniform_int_distribution<int> pos(1, 3);
  std::vector<std::string> vars{"a", "b"};

  int built = 0;
  for (int it = 0; it < 400 && built < 120; ++it) {
    ThetaTerm t;
    int cnum = small(rng);
    t.coeff = make_rat(cnum == 0 ? 1 : cnum, pos(rng));
    t.mono.qexp = make_rat(small(rng), pos(rng));
    t.mono.aexp = {Int(small(rng)), Int(small(rng))};
    int nfac = pos(rng) - 1;
    bool degenerate = false;
    for (int i = 0; i < nfac; ++i) {
      ThetaFactor f;
      f.delta = coin(rng);
      f.gamma = {Int(small(rng)), Int(small(rng))};
      if (f.gamma == IntVec{0, 0}) {
        degenerate = true;
        break;
      }
      f.t = Rat(pos(rng));
      f.z = make_rat(small(rng), 1);
      t.factors.push_back(f);
    }
    if (degenerate) continue;
    int pe = small(rng);
    if (coin(rng) && pe != 0) t.poch.mul(make_rat(1, 2), make_rat(1, 2), Int(pe));
    if (coin(rng)) t.poch.mul(Rat(1), Rat(2), Int(pos(rng)));
    ++built;

    std::string text = format_term(t, vars);
    auto back = parse_expr_text(vars, text);
    REQUIRE(back.ok());
    REQUIRE(back.value().size() == 1);
    CHECK(back.value()[0] == t);
  }
  CHECK(built >= 100);
}

TEST_CASE("parsing is total on fuzzed inputs") {
  std::mt19937 rng(77);
  const std::string alphabet = "ab q()[];,+-*/^=123\n#_";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(0, 60);
  for (int it = 0; it < 2000; ++it) {
    std::string s = "vars a b\n";
    int n = len(rng);
    for (int i = 0; i < n; ++i) s += alphabet[pick(rng)];
    auto res = parse_identity(s);
    if (!res.ok()) {
      CHECK(res.error().span.start <= res.error().span.end);
      CHECK(res.error().span.end <= s.size());
    }
  }
}
