#include "thetaver/linalg.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace thetaver;

namespace {

IntMat random_int_mat(std::mt19937& rng, std::size_t rows, std::size_t cols, int lo, int hi) {
  std::uniform_int_distribution<int> dist(lo, hi);
  IntMat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

}  // namespace

TEST_CASE("rank of exact rational matrices") {
  // the four contiguous-relation exponent vectors of the four-variable
  // quotient identity: independent
  IntMat w{{1, 1, 0, -1}, {1, 0, 1, -1}, {-1, 1, 0, 1}, {2, -1, -1, 0}};
  CHECK(rank(w) == 4);

  RatMat zero(3, 4);
  CHECK(rank(zero) == 0);

  IntMat prop{{1, 2}, {2, 4}};
  CHECK(rank(prop) == 1);
}

TEST_CASE("solve_exact unique solutions") {
  // columns (1,1), (0,2); b = (0,1) -> x = (0, 1/2)
  RatMat a{{1, 0}, {1, 2}};
  auto x = solve_exact(a, RatVec{0, 1});
  REQUIRE(x.has_value());
  CHECK((*x)[0] == 0);
  CHECK((*x)[1] == make_rat(1, 2));

  SECTION("zero rhs gives zero") {
    auto z = solve_exact(a, RatVec{0, 0});
    REQUIRE(z.has_value());
    CHECK((*z)[0] == 0);
    CHECK((*z)[1] == 0);
  }

  SECTION("inconsistent system returns nothing") {
    // columns (1,1,1), (1,-1,0); rhs outside the column span
    RatMat b{{1, 1}, {1, -1}, {1, 0}};
    CHECK_FALSE(solve_exact(b, RatVec{0, 0, 1}).has_value());
  }

  SECTION("dependent columns throw") {
    RatMat c{{1, 2}, {2, 4}};
    CHECK_THROWS_AS(solve_exact(c, RatVec{1, 2}), ColumnRankDeficient);
  }

  SECTION("solution reproduces rhs") {
    std::mt19937 rng(7);
    for (int it = 0; it < 50; ++it) {
      IntMat m = random_int_mat(rng, 4, 3, -5, 5);
      RatMat a4 = rat_mat(m);
      if (rank(a4) < 3) continue;
      RatVec x0{make_rat(1, 3), make_rat(-2, 1), make_rat(5, 7)};
      RatVec b4 = matvec(a4, x0);
      auto got = solve_exact(a4, b4);
      REQUIRE(got.has_value());
      CHECK(matvec(a4, *got) == b4);
    }
  }
}

TEST_CASE("kernel_basis spans the right null space") {
  CHECK(kernel_basis(rat_mat(IntMat::identity(3))).empty());

  RatMat m{{1, -1}};
  auto k = kernel_basis(m);
  REQUIRE(k.size() == 1);
  CHECK(k[0][0] == k[0][1]);

  // Coefficient matrix of the shift system for a two-factor term with
  // gammas (1,0), (0,1), combination weights k = (1,1), moduli 1:
  // rows (gamma_i | -k_i t_i).
  RatMat sys{{1, 0, -1}, {0, 1, -1}};
  auto basis = kernel_basis(sys);
  REQUIRE(basis.size() == 1);  // r + 1 - m = 1
  for (const auto& v : basis) {
    // check A v = 0 exactly
    for (std::size_t i = 0; i < sys.rows(); ++i) {
      Rat acc;
      for (std::size_t j = 0; j < sys.cols(); ++j) acc += sys(i, j) * v[j];
      CHECK(acc == 0);
    }
  }

  SECTION("size is cols - rank on random matrices") {
    std::mt19937 rng(11);
    for (int it = 0; it < 60; ++it) {
      IntMat m5 = random_int_mat(rng, 3, 5, -3, 3);
      RatMat a = rat_mat(m5);
      CHECK(kernel_basis(a).size() == a.cols() - rank(a));
    }
  }
}

TEST_CASE("hermite normal form") {
  auto check_hnf = [](const IntMat& m) {
    auto [h, u] = hnf(m);
    CHECK(abs(det(u)) == 1);
    CHECK(matmul(u, m) == h);
    return h;
  };

  IntMat d2{{2, 0}, {0, 2}};
  CHECK(check_hnf(d2) == d2);

  IntMat m{{1, 1}, {0, 2}};
  auto h = check_hnf(m);
  CHECK(h(0, 0) == 1);
  CHECK(h(1, 1) == 2);

  IntMat z{{0, 0}};
  CHECK(check_hnf(z) == z);

  SECTION("random reconstruction and echelon shape") {
    std::mt19937 rng(23);
    for (int it = 0; it < 80; ++it) {
      IntMat m6 = random_int_mat(rng, 3, 4, -6, 6);
      auto [h6, u6] = hnf(m6);
      CHECK(abs(det(u6)) == 1);
      CHECK(matmul(u6, m6) == h6);
      CHECK(rank(h6) == rank(m6));
    }
  }
}

TEST_CASE("smith normal form") {
  auto check_snf = [](const IntMat& m) {
    auto [s, u, v] = snf(m);
    CHECK(abs(det(u)) == 1);
    CHECK(abs(det(v)) == 1);
    CHECK(matmul(matmul(u, m), v) == s);
    // diagonal, nonnegative, divisibility chain
    Int prev(0);
    for (std::size_t i = 0; i < s.rows(); ++i)
      for (std::size_t j = 0; j < s.cols(); ++j)
        if (i != j) CHECK(s(i, j) == 0);
    for (std::size_t i = 0; i + 1 < std::min(s.rows(), s.cols()); ++i) {
      CHECK(s(i, i) >= 0);
      if (s(i + 1, i + 1) != 0) CHECK(s(i + 1, i + 1) % (s(i, i) == 0 ? Int(1) : s(i, i)) == 0);
    }
    return s;
  };

  IntMat m{{1, 1}, {0, 2}};
  auto s = check_snf(m);
  CHECK(s(0, 0) == 1);
  CHECK(s(1, 1) == 2);

  auto id = check_snf(IntMat::identity(3));
  CHECK(id == IntMat::identity(3));

  IntMat m2{{2, 4}, {4, 8}};
  auto s2 = check_snf(m2);
  CHECK(s2(0, 0) == 2);
  CHECK(s2(1, 1) == 0);

  SECTION("rank equals count of nonzero SNF diagonal entries") {
    std::mt19937 rng(31);
    for (int it = 0; it < 60; ++it) {
      IntMat m7 = random_int_mat(rng, 3, 3, -4, 4);
      auto [s7, u7, v7] = snf(m7);
      std::size_t nonzero = 0;
      for (std::size_t i = 0; i < 3; ++i)
        if (s7(i, i) != 0) ++nonzero;
      CHECK(nonzero == rank(m7));
      CHECK(matmul(matmul(u7, m7), v7) == s7);
    }
  }
}
