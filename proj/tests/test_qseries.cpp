#include "thetaver/qseries.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace thetaver;

namespace {

// Brute-force partition count, the independent oracle for 1/(q;q)_inf.
long partitions(int n) {
  std::vector<long> p(n + 1, 0);
  p[0] = 1;
  for (int k = 1; k <= n; ++k)
    for (int m = k; m <= n; ++m) p[m] += p[m - k];
  return p[n];
}

QSeries random_series(std::mt19937& rng, const Int& d, std::int64_t ord) {
  std::uniform_int_distribution<int> coeff(-4, 4);
  QSeries s = qs_zero(d, ord);
  for (std::int64_t k = 0; k <= ord; ++k) {
    int c = coeff(rng);
    if (c != 0) s.coeffs[k] = c;
  }
  return s;
}

}  // namespace

TEST_CASE("euler_expand matches the pentagonal number pattern") {
  QSeries e = euler_expand(Rat(1), Rat(1), Rat(12), Int(1));
  QSeries expect = qs_zero(Int(1), 12);
  expect.coeffs = {{0, 1}, {1, -1}, {2, -1}, {5, 1}, {7, 1}, {12, -1}};
  CHECK(e.coeffs == expect.coeffs);

  SECTION("generalized pentagonal coefficients through order 60") {
    QSeries big = euler_expand(Rat(1), Rat(1), Rat(60), Int(1));
    std::map<std::int64_t, Rat> want;
    for (long j = -7; j <= 7; ++j) {
      if (j == 0) continue;
      long k = j * (3 * j - 1) / 2;
      if (k >= 0 && k <= 60) want[k] = (j % 2 == 0) ? 1 : -1;
    }
    want[0] = 1;
    CHECK(big.coeffs == want);
  }

  SECTION("order zero truncation is 1") {
    QSeries one = euler_expand(Rat(1), Rat(1), Rat(0), Int(1));
    CHECK(one.coeffs == std::map<std::int64_t, Rat>{{0, 1}});
  }

  SECTION("half-integer exponents at D = 2") {
    QSeries h = euler_expand(make_rat(1, 2), make_rat(1, 2), Rat(1), Int(2));
    // (1 - q^(1/2))(1 - q) truncated at q^1: 1 - q^(1/2) - q
    std::map<std::int64_t, Rat> want{{0, 1}, {1, -1}, {2, -1}};
    CHECK(h.coeffs == want);
  }

  CHECK_THROWS_AS(euler_expand(make_rat(1, 3), Rat(1), Rat(5), Int(2)), BadDenominator);
}

TEST_CASE("series ring operations") {
  Int d(1);

  SECTION("geometric inverse") {
    QSeries f = qs_zero(d, 5);
    f.coeffs = {{0, 1}, {1, -1}};  // 1 - q
    QSeries inv = series_inv(f, 5);
    for (std::int64_t k = 0; k <= 5; ++k) CHECK(inv.coeff_at(k) == 1);
    QSeries prod = series_mul(f, inv);
    CHECK(prod.coeff_at(0) == 1);
    for (std::int64_t k = 1; k <= prod.ord; ++k) CHECK(prod.coeff_at(k) == 0);
  }

  SECTION("f + (-f) == 0") {
    std::mt19937 rng(5);
    QSeries f = random_series(rng, d, 20);
    CHECK(series_add(f, series_neg(f)).is_zero());
  }

  SECTION("partition generating function") {
    QSeries inv = series_inv(euler_expand(Rat(1), Rat(1), Rat(30), d), 30);
    for (int n = 0; n <= 30; ++n) CHECK(inv.coeff_at(n) == partitions(n));
  }

  SECTION("inverse of a monomial") {
    QSeries m = qs_monomial(d, Rat(3), Rat(2));
    QSeries inv = series_inv(m, 10);
    CHECK(inv.coeffs == std::map<std::int64_t, Rat>{{-2, make_rat(1, 3)}});
  }

  SECTION("inverting zero throws") {
    CHECK_THROWS_AS(series_inv(qs_zero(d, 5), 5), NonUnitLeadingTerm);
  }

  SECTION("multiplication is commutative and associative") {
    std::mt19937 rng(17);
    for (int it = 0; it < 20; ++it) {
      QSeries a = random_series(rng, d, 15);
      QSeries b = random_series(rng, d, 15);
      QSeries c = random_series(rng, d, 15);
      CHECK(series_mul(a, b).coeffs == series_mul(b, a).coeffs);
      QSeries ab_c = series_mul(series_mul(a, b), c);
      QSeries a_bc = series_mul(a, series_mul(b, c));
      CHECK(series_agree(ab_c, a_bc));
    }
  }

  SECTION("order tracking through multiplication") {
    QSeries a = qs_zero(d, 10);
    a.coeffs = {{2, 1}};  // q^2, valid through q^10
    QSeries b = qs_zero(d, 10);
    b.coeffs = {{3, 1}};
    QSeries p = series_mul(a, b);
    CHECK(p.ord == 12);  // min(10 + 3, 10 + 2)
    CHECK(p.coeff_at(5) == 1);
  }
}
