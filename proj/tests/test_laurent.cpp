#include "thetaver/laurent.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "golden.hpp"

using namespace thetaver;

namespace {

IntVec iv(std::initializer_list<int> xs) {
  IntVec v;
  for (int x : xs) v.push_back(Int(x));
  return v;
}

ThetaFactor factor(int delta, IntVec gamma, Rat z, Rat t) {
  ThetaFactor f;
  f.delta = delta;
  f.gamma = std::move(gamma);
  f.z = std::move(z);
  f.t = std::move(t);
  return f;
}

}  // namespace

TEST_CASE("jtp_expand windows") {
  SECTION("[z;q] at eta = 1 is -1/(q;q)") {
    LaurentMap m = jtp_expand(factor(0, {1}, 0, 1), Rat(10), Int(1));
    REQUIRE(m.count(iv({1})) == 1);
    const QSeries& s = m.at(iv({1}));
    CHECK(s.coeff_at(0) == -1);  // numerator -q^C(1,2) = -1 over (q;q)
  }

  SECTION("eta outside gamma Z is absent") {
    LaurentMap m = jtp_expand(factor(0, {2}, 0, 1), Rat(10), Int(1));
    CHECK(m.count(iv({1})) == 0);
    CHECK(m.count(iv({2})) == 1);
  }

  SECTION("delta flips the sign law") {
    LaurentMap m = jtp_expand(factor(1, {1}, 0, 1), Rat(10), Int(1));
    CHECK(m.at(iv({1})).coeff_at(0) == 1);  // (-1)^((1+1)n) = +1
  }

  SECTION("bilateral pentagonal law: [z;q] (q;q) has coefficients (-1)^n at C(n,2)") {
    LaurentMap m = jtp_expand(factor(0, {1}, 0, 1), Rat(30), Int(1));
    QSeries euler = euler_expand(Rat(1), Rat(1), Rat(30), Int(1));
    for (const auto& [eta, ser] : m) {
      QSeries prod = series_mul(ser, euler);
      Int n = eta[0];
      for (std::int64_t k = 0; k <= prod.ord; ++k) {
        Rat expect = (Rat(binom2(n)) == Rat(Int(k)))
                         ? ((n % 2 == 0) ? Rat(1) : Rat(-1))
                         : Rat(0);
        CHECK(prod.coeff_at(k) == expect);
      }
    }
  }
}

TEST_CASE("expand_term matches exact extraction") {
  Identity ideab = golden::load_identity("ideab");
  Int d = identity_denominator(ideab);
  REQUIRE(d == 1);

  SECTION("left term at the origin is 1/(q;q)^2") {
    LaurentMap m = expand_term(ideab.terms[0], Rat(20), d);
    QSeries want = series_inv(euler_expand(Rat(1), Rat(1), Rat(20), d), 20);
    want = series_mul(want, want, 20);
    REQUIRE(m.count(iv({0, 0})) == 1);
    CHECK(series_agree(m.at(iv({0, 0})), want));
  }

  SECTION("every populated entry agrees with extract_exact") {
    for (const ThetaTerm& term : ideab.terms) {
      LaurentMap m = expand_term(term, Rat(15), d);
      for (const auto& [eta, ser] : m) {
        QSeries exact = cf_to_series(extract_exact(term, eta), Rat(15), d);
        CHECK(series_agree(ser, exact));
      }
    }
  }

  SECTION("extraction agrees with the oracle on the base points of other identities") {
    for (const std::string name : {"bailey", "chu", "weierstrass"}) {
      Identity id = golden::load_identity(name);
      Int dd = identity_denominator(id);
      for (const ThetaTerm& term : id.terms) {
        LaurentMap m = expand_term(term, Rat(12), dd);
        std::size_t checked = 0;
        for (const auto& [eta, ser] : m) {
          if (++checked > 25) break;  // spot-check the low entries
          QSeries exact = cf_to_series(extract_exact(term, eta), Rat(12), dd);
          CHECK(series_agree(ser, exact));
        }
      }
    }
  }

  SECTION("a term with empty variable support") {
    auto terms = parse_expr_text({"a"}, "3*(q;q)^2");
    REQUIRE(terms.ok());
    LaurentMap m = expand_term(terms.value()[0], Rat(10), Int(1));
    REQUIRE(m.size() == 1);
    QSeries e = euler_expand(Rat(1), Rat(1), Rat(10), Int(1));
    QSeries want = series_scale(series_mul(e, e), Rat(3));
    CHECK(series_agree(m.at(iv({0})), want));
  }

  SECTION("negative inner q-powers are handled") {
    auto terms = parse_expr_text({"a"}, "(a/q^2,q^3/a;q)");
    REQUIRE(terms.ok());
    const ThetaTerm& t = terms.value()[0];
    LaurentMap m = expand_term(t, Rat(10), Int(1));
    for (const auto& [eta, ser] : m) {
      QSeries exact = cf_to_series(extract_exact(t, eta), Rat(10), Int(1));
      CHECK(series_agree(series_truncate(ser, 10), series_truncate(exact, 10)));
    }
    // the n = 1 window term sits at q^-2
    REQUIRE(m.count(iv({1})) == 1);
    CHECK(m.at(iv({1})).low() == -2);
  }
}

TEST_CASE("expand_identity_residual") {
  SECTION("the two-variable identity vanishes through q^30") {
    Identity ideab = golden::load_identity("ideab");
    CHECK(expand_identity_residual(ideab, Rat(30), identity_denominator(ideab)).empty());
  }

  SECTION("a flipped sign leaves a residual") {
    Identity bailey = golden::load_identity("bailey");
    bailey.terms[0].coeff = -bailey.terms[0].coeff;
    CHECK_FALSE(expand_identity_residual(bailey, Rat(10), Int(1)).empty());
  }

  SECTION("f = f cancels at any order") {
    auto id = parse_identity("vars z\n[z;q] = [z;q]");
    REQUIRE(id.ok());
    CHECK(expand_identity_residual(id.value(), Rat(40), Int(1)).empty());
  }

  SECTION("fractional moduli: the extended Riemann identity to q^8") {
    Identity ex = golden::load_identity("exriemann");
    Int d = identity_denominator(ex);
    CHECK(d == 4);
    CHECK(expand_identity_residual(ex, Rat(8), d).empty());
  }
}

TEST_CASE("relations hold as truncated series") {
  // theta(a o q^alpha) * a^w * q^s * (-1)^rho == theta(a), checked through
  // q^30 entry by entry
  auto check_relation = [](const Identity& id, const RatVec& alpha) {
    for (const ThetaTerm& term : id.terms) {
      auto rel = apply_shift(term, alpha);
      REQUIRE(rel.ok());
      ThetaTerm shifted = term;
      for (ThetaFactor& f : shifted.factors) f.z += dot_mixed(alpha, f.gamma);
      shifted.mono.qexp += dot_mixed(alpha, shifted.mono.aexp);

      Int d = int_lcm(identity_denominator(id), denominator(rel.value().s));
      for (const Rat& a : alpha) d = int_lcm(d, denominator(a));
      Rat order(30);
      LaurentMap lhs = expand_term(shifted, order, d);
      LaurentMap rhs = expand_term(term, order, d);
      // lhs entries shifted by a^w q^s (-1)^rho must match rhs
      for (auto& [eta, ser] : lhs) {
        IntVec target = eta;
        for (std::size_t j = 0; j < eta.size(); ++j) target[j] += rel.value().w[j];
        QSeries moved = series_shift(ser, rel.value().s);
        if (rel.value().rho) moved = series_neg(moved);
        auto it = rhs.find(target);
        if (it == rhs.end()) {
          CHECK(series_truncate(moved, scale_to_int(order, d) -
                                           scale_to_int(rel.value().s > 0 ? rel.value().s
                                                                          : Rat(0),
                                                        d))
                    .is_zero());
        } else {
          CHECK(series_agree(moved, it->second));
        }
      }
    }
  };

  check_relation(golden::load_identity("ideab"), {Rat(1), Rat(1)});
  check_relation(golden::load_identity("ideab"), {Rat(0), Rat(2)});
  check_relation(golden::load_identity("bailey"), {Rat(1), Rat(0), Rat(0), Rat(0), Rat(1)});
  check_relation(golden::load_identity("idenwxyz"),
                 {make_rat(1, 2), make_rat(1, 2), Rat(0), Rat(0)});
}
