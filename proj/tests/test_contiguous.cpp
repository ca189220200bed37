#include "thetaver/contiguous.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "golden.hpp"

using namespace thetaver;

namespace {

RatVec rv(std::initializer_list<int> xs) {
  RatVec v;
  for (int x : xs) v.push_back(Rat(x));
  return v;
}

IntVec iv(std::initializer_list<int> xs) {
  IntVec v;
  for (int x : xs) v.push_back(Int(x));
  return v;
}

// HNF-canonical form of the lattice generated by the given rows.
IntMat lattice_canon(const std::vector<IntVec>& rows) {
  IntMat m = IntMat::from_rows({rows.begin(), rows.end()});
  auto [h, u] = hnf(m);
  return h;
}

}  // namespace

TEST_CASE("apply_shift reproduces the published relation laws") {
  Identity bailey = golden::load_identity("bailey");

  SECTION("first shift on the first term") {
    auto rel = apply_shift(bailey.terms[0], rv({1, 0, 0, 0, 1}));
    REQUIRE(rel.ok());
    CHECK(rel.value().rho == 0);
    CHECK(rel.value().w == iv({2, -2, -1, -1, 0}));
    CHECK(rel.value().s == 2);
  }

  SECTION("the prefactor term agrees through its monomial contribution") {
    // third term carries b/a; alpha . kappa feeds into s
    auto rel = apply_shift(bailey.terms[2], rv({1, 0, 0, 0, 1}));
    REQUIRE(rel.ok());
    CHECK(rel.value().w == iv({2, -2, -1, -1, 0}));
    CHECK(rel.value().s == 2);
    CHECK(rel.value().rho == 0);
  }

  SECTION("two-variable quotient identity shares (1,1)") {
    Identity ideab = golden::load_identity("ideab");
    for (const ThetaTerm& t : ideab.terms) {
      auto rel = apply_shift(t, rv({1, 1}));
      REQUIRE(rel.ok());
      CHECK(rel.value().rho == 1);
      CHECK(rel.value().w == iv({1, 1}));
      CHECK(rel.value().s == 0);
    }
  }

  SECTION("zero shift is degenerate") {
    auto rel = apply_shift(bailey.terms[0], rv({0, 0, 0, 0, 0}));
    REQUIRE_FALSE(rel.ok());
    CHECK(rel.error().kind == ShiftErrorKind::DegenerateShift);
  }

  SECTION("fractional multiples are rejected factor-by-factor") {
    Identity ideab = golden::load_identity("ideab");
    // (1,0) moves the modulus-2 right-side factors by half a step
    auto rel = apply_shift(ideab.terms[2], rv({1, 0}));
    REQUIRE_FALSE(rel.ok());
    CHECK(rel.error().kind == ShiftErrorKind::NotContiguous);
  }
}

TEST_CASE("derive_relation solves the shift system") {
  Identity ideab = golden::load_identity("ideab");

  SECTION("k = (1,1) recovers the shared law") {
    auto rel = derive_relation(ideab.terms[0], {Rat(1), Rat(1)});
    CHECK(rel.w == iv({1, 1}));
    CHECK(rel.s == 0);
    CHECK(rel.rho == 1);
  }

  SECTION("unit k gives a positive multiple of gamma_j") {
    Identity bailey = golden::load_identity("bailey");
    const ThetaTerm& t = bailey.terms[0];
    for (std::size_t j = 0; j < t.factors.size(); ++j) {
      RatVec k(t.factors.size());
      k[j] = 1;
      auto rel = derive_relation(t, k);
      CHECK(rel.w == t.factors[j].gamma);
    }
  }

  SECTION("the addition-formula pair combination") {
    Identity wei = golden::load_identity("weierstrass");
    auto rel = derive_relation(wei.terms[0], {Rat(1), Rat(1), Rat(0), Rat(0)});
    CHECK(rel.w == iv({2, 0, 0, 0}));
    CHECK(rel.s == 0);
    CHECK(rel.rho == 0);
  }

  SECTION("w is parallel to sum k_i gamma_i with positive ratio") {
    Identity bailey = golden::load_identity("bailey");
    const ThetaTerm& t = bailey.terms[0];
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> num(-3, 3), den(1, 3);
    for (int it = 0; it < 40; ++it) {
      RatVec k(t.factors.size());
      bool all_zero = true;
      for (Rat& ki : k) {
        ki = make_rat(num(rng), den(rng));
        if (ki != 0) all_zero = false;
      }
      if (all_zero) continue;
      auto rel = derive_relation(t, k);
      // target = sum k_i gamma_i
      RatVec target(5);
      for (std::size_t i = 0; i < k.size(); ++i)
        for (std::size_t j = 0; j < 5; ++j) target[j] += k[i] * Rat(t.factors[i].gamma[j]);
      // find the positive ratio c with w == c * target
      std::optional<Rat> ratio;
      bool parallel = true;
      for (std::size_t j = 0; j < 5; ++j) {
        if (target[j] == 0) {
          if (rel.w[j] != 0) parallel = false;
          continue;
        }
        Rat c = Rat(rel.w[j]) / target[j];
        if (!ratio) ratio = c;
        if (*ratio != c) parallel = false;
      }
      CHECK(parallel);
      REQUIRE(ratio.has_value());
      CHECK(*ratio > 0);
    }
  }
}

TEST_CASE("relation_basis") {
  Identity bailey = golden::load_identity("bailey");
  auto shifts = golden::load_shifts("bailey");

  SECTION("explicit published shifts give the published W") {
    auto sys = relation_basis(bailey.terms[0], shifts);
    REQUIRE(sys.ok());
    std::vector<IntVec> w;
    for (const auto& rel : sys.value().relations) w.push_back(rel.w);
    std::vector<IntVec> expect = {iv({2, -2, -1, -1, 0}), iv({0, 1, 1, 0, -1}),
                                  iv({0, 0, 1, 1, 0}), iv({0, -1, 1, 0, 1})};
    CHECK(w == expect);
  }

  SECTION("dependent shifts are rejected") {
    auto sys = relation_basis(bailey.terms[0],
                              std::vector<RatVec>{rv({1, 0, 0, 0, 1}), rv({2, 0, 0, 0, 2})});
    REQUIRE_FALSE(sys.ok());
    CHECK(sys.error().kind == RelationBasisErrorKind::DependentRelations);
  }

  SECTION("auto mode on dependent-exponent terms uses the shift lattice") {
    Identity quint = golden::load_identity("quintuple");
    auto sys = relation_basis(quint.terms[0]);
    REQUIRE(sys.ok());
    REQUIRE(sys.value().relations.size() == 1);
    CHECK(sys.value().relations[0].w == iv({3}));
    CHECK(sys.value().relations[0].s == 1);
    CHECK(sys.value().relations[0].rho == 1);
  }
}

TEST_CASE("common_relation_system") {
  SECTION("published shifts are shared by all Bailey terms") {
    Identity bailey = golden::load_identity("bailey");
    auto res = common_relation_system(bailey, golden::load_shifts("bailey"));
    CHECK_FALSE(res.mismatch.has_value());
    REQUIRE(res.system.relations.size() == 4);
    for (const auto& row : res.per_term_ok)
      for (bool ok : row) CHECK(ok);
  }

  SECTION("auto mode recovers the two-variable lattice") {
    Identity ideab = golden::load_identity("ideab");
    auto res = common_relation_system(ideab);
    CHECK_FALSE(res.mismatch.has_value());
    REQUIRE(res.system.relations.size() == 2);
    std::vector<IntVec> w;
    for (const auto& rel : res.system.relations) w.push_back(rel.w);
    CHECK(lattice_canon(w) == lattice_canon({iv({1, 1}), iv({0, 2})}));
  }

  SECTION("auto mode on the one-variable quintuple identity") {
    Identity quint = golden::load_identity("quintuple");
    auto res = common_relation_system(quint);
    CHECK_FALSE(res.mismatch.has_value());
    REQUIRE(res.system.relations.size() == 1);
    CHECK(res.system.relations[0].w == iv({3}));
  }

  SECTION("all five addition-formula terms share the modulus-2 laws") {
    Identity id3 = golden::load_identity("idenwxyz3");
    auto res = common_relation_system(id3, golden::load_shifts("idenwxyz3"));
    CHECK_FALSE(res.mismatch.has_value());
    REQUIRE(res.system.relations.size() == 4);
    CHECK(res.system.relations[0].w == iv({2, 2, 0, 0}));
    CHECK(res.system.relations[0].s == 2);
  }

  SECTION("a perturbed prefactor is reported with its term") {
    Identity bailey = golden::load_identity("bailey");
    // b/a -> b^2/a on the third term
    bailey.terms[2].mono.aexp[1] += 1;
    auto res = common_relation_system(bailey, golden::load_shifts("bailey"));
    REQUIRE(res.mismatch.has_value());
    CHECK(res.mismatch->term_index == 2);
    // the first shift has zero b-component, so the s drift shows at index 1
    CHECK(res.mismatch->relation_index == 1);
  }

  SECTION("half-integer shifts are needed by the first addition formula") {
    Identity idw = golden::load_identity("idenwxyz");
    auto shifts = golden::load_shifts("idenwxyz");
    auto res = common_relation_system(idw, shifts);
    CHECK_FALSE(res.mismatch.has_value());
    REQUIRE(res.system.relations.size() == 4);
    CHECK_FALSE(res.system.relations[0].alpha_integral());
    CHECK(res.system.relations[0].w == iv({2, 2, 0, 0}));
    CHECK(res.system.relations[0].s == 2);
    CHECK(res.system.relations[0].rho == 0);
  }
}
