#pragma once
// Dense exact linear algebra over Int / Rat: RREF-based rank, solve and
// kernel, plus integer Hermite and Smith normal forms with transforms.
// Matrices in this library stay tiny (the worst case in the test corpus
// is 12 x 6), so everything is plain Gaussian / Euclidean elimination.
#include "thetaver/rational.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace thetaver {

struct ColumnRankDeficient : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

template <class T>
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
  Mat(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    a_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw std::invalid_argument("Mat: ragged rows");
      for (const auto& v : r) a_.push_back(v);
    }
  }
  static Mat from_rows(const std::vector<std::vector<T>>& rows) {
    Mat m;
    m.rows_ = rows.size();
    m.cols_ = rows.empty() ? 0 : rows.front().size();
    m.a_.reserve(m.rows_ * m.cols_);
    for (const auto& r : rows) {
      if (r.size() != m.cols_) throw std::invalid_argument("Mat: ragged rows");
      for (const auto& v : r) m.a_.push_back(v);
    }
    return m;
  }
  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

  std::vector<T> row(std::size_t r) const {
    return std::vector<T>(a_.begin() + r * cols_, a_.begin() + (r + 1) * cols_);
  }

  void swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
  }
  void swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, i), (*this)(r, j));
  }

  bool operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> a_;
};

using IntMat = Mat<Int>;
using RatMat = Mat<Rat>;

inline RatMat rat_mat(const IntMat& m) {
  RatMat r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Rat(m(i, j));
  return r;
}

template <class T>
Mat<T> transpose(const Mat<T>& m) {
  Mat<T> t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

template <class T>
Mat<T> matmul(const Mat<T>& a, const Mat<T>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
  Mat<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    }
  return c;
}

template <class T>
std::vector<T> matvec(const Mat<T>& a, const std::vector<T>& x) {
  if (a.cols() != x.size()) throw std::invalid_argument("matvec: shape mismatch");
  std::vector<T> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  T s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline IntVec clear_denominators(const RatVec& v) {
  Int d(1);
  for (const Rat& x : v) d = int_lcm(d, denominator(x));
  IntVec out;
  out.reserve(v.size());
  for (const Rat& x : v) out.push_back(numerator(x) * (d / denominator(x)));
  return out;
}

inline Rat dot_mixed(const RatVec& a, const IntVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  Rat s;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * Rat(b[i]);
  return s;
}

// In-place reduced row echelon form; returns the pivot columns.
inline std::vector<std::size_t> rref(RatMat& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t p = row;
    while (p < m.rows() && m(p, col) == 0) ++p;
    if (p == m.rows()) continue;
    m.swap_rows(p, row);
    Rat piv = m(row, col);
    for (std::size_t j = col; j < m.cols(); ++j) m(row, j) /= piv;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col) == 0) continue;
      Rat f = m(r, col);
      for (std::size_t j = col; j < m.cols(); ++j) m(r, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

inline std::size_t rank(const RatMat& m) {
  RatMat c = m;
  return rref(c).size();
}

inline std::size_t rank(const IntMat& m) { return rank(rat_mat(m)); }

// Unique solution of A x = b. The caller guarantees A has full column
// rank; a dependent column set throws, an inconsistent system returns
// nullopt.
inline std::optional<RatVec> solve_exact(const RatMat& a, const RatVec& b) {
  if (a.rows() != b.size()) throw std::invalid_argument("solve_exact: shape mismatch");
  RatMat aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  auto pivots = rref(aug);
  std::size_t col_rank = 0;
  for (auto p : pivots)
    if (p < a.cols()) ++col_rank;
  if (col_rank < a.cols())
    throw ColumnRankDeficient("solve_exact: matrix columns are dependent");
  for (auto p : pivots)
    if (p == a.cols()) return std::nullopt;  // row (0 ... 0 | 1): inconsistent
  RatVec x(a.cols());
  for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = aug(i, a.cols());
  return x;
}

// Basis of the right null space {x : A x = 0}; size == cols - rank.
inline std::vector<RatVec> kernel_basis(const RatMat& a) {
  RatMat m = a;
  auto pivots = rref(m);
  std::vector<bool> is_pivot(a.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<RatVec> basis;
  for (std::size_t f = 0; f < a.cols(); ++f) {
    if (is_pivot[f]) continue;
    RatVec v(a.cols());
    v[f] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -m(i, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

inline Rat det(const RatMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("det: not square");
  RatMat a = m;
  Rat d(1);
  for (std::size_t col = 0; col < a.cols(); ++col) {
    std::size_t p = col;
    while (p < a.rows() && a(p, col) == 0) ++p;
    if (p == a.rows()) return Rat(0);
    if (p != col) {
      a.swap_rows(p, col);
      d = -d;
    }
    d *= a(col, col);
    Rat piv = a(col, col);
    for (std::size_t r = col + 1; r < a.rows(); ++r) {
      if (a(r, col) == 0) continue;
      Rat f = a(r, col) / piv;
      for (std::size_t j = col; j < a.cols(); ++j) a(r, j) -= f * a(col, j);
    }
  }
  return d;
}

inline Int det(const IntMat& m) {
  Rat d = det(rat_mat(m));
  return numerator(d);  // integer for integer input
}

inline RatMat inverse(const RatMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse: not square");
  std::size_t n = m.rows();
  RatMat aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = 1;
  }
  auto pivots = rref(aug);
  if (pivots.size() != n || pivots.back() != n - 1)
    throw std::invalid_argument("inverse: singular matrix");
  RatMat inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

// Inverse of a unimodular integer matrix, exact and integral.
inline IntMat unimodular_inverse(const IntMat& m) {
  RatMat inv = inverse(rat_mat(m));
  IntMat out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!is_integer(inv(i, j)))
        throw std::invalid_argument("unimodular_inverse: matrix is not unimodular");
      out(i, j) = numerator(inv(i, j));
    }
  return out;
}

// Row Hermite normal form: H = U * M with U unimodular, pivots positive,
// entries above each pivot reduced into [0, pivot). Zero rows sink to the
// bottom. For square nonsingular M this is the upper-triangular HNF.
inline std::pair<IntMat, IntMat> hnf(const IntMat& m) {
  IntMat h = m;
  IntMat u = IntMat::identity(m.rows());
  auto row_sub = [&](std::size_t dst, std::size_t src, const Int& q) {
    if (q == 0) return;
    for (std::size_t j = 0; j < h.cols(); ++j) h(dst, j) -= q * h(src, j);
    for (std::size_t j = 0; j < u.cols(); ++j) u(dst, j) -= q * u(src, j);
  };
  auto row_neg = [&](std::size_t r) {
    for (std::size_t j = 0; j < h.cols(); ++j) h(r, j) = -h(r, j);
    for (std::size_t j = 0; j < u.cols(); ++j) u(r, j) = -u(r, j);
  };
  auto swap_rows = [&](std::size_t i, std::size_t j) {
    h.swap_rows(i, j);
    u.swap_rows(i, j);
  };

  std::size_t row = 0;
  for (std::size_t col = 0; col < h.cols() && row < h.rows(); ++col) {
    // Euclidean elimination below the working row.
    while (true) {
      std::size_t best = h.rows();
      for (std::size_t r = row; r < h.rows(); ++r)
        if (h(r, col) != 0 && (best == h.rows() || abs(h(r, col)) < abs(h(best, col))))
          best = r;
      if (best == h.rows()) break;  // column has no pivot
      swap_rows(row, best);
      bool clean = true;
      for (std::size_t r = row + 1; r < h.rows(); ++r) {
        if (h(r, col) == 0) continue;
        row_sub(r, row, h(r, col) / h(row, col));
        if (h(r, col) != 0) clean = false;
      }
      if (clean) break;
    }
    if (row < h.rows() && h(row, col) != 0) {
      if (h(row, col) < 0) row_neg(row);
      for (std::size_t r = 0; r < row; ++r) {
        // reduce residue above the pivot into [0, pivot)
        Int q = h(r, col) / h(row, col);
        if (h(r, col) - q * h(row, col) < 0) --q;
        row_sub(r, row, q);
      }
      ++row;
    }
  }
  return {h, u};
}

// Smith normal form: S = U * M * V, S diagonal with d_1 | d_2 | ..., all
// d_i >= 0; U and V unimodular.
inline std::tuple<IntMat, IntMat, IntMat> snf(const IntMat& m) {
  IntMat s = m;
  IntMat u = IntMat::identity(m.rows());
  IntMat v = IntMat::identity(m.cols());

  auto row_sub = [&](std::size_t dst, std::size_t src, const Int& q) {
    if (q == 0) return;
    for (std::size_t j = 0; j < s.cols(); ++j) s(dst, j) -= q * s(src, j);
    for (std::size_t j = 0; j < u.cols(); ++j) u(dst, j) -= q * u(src, j);
  };
  auto col_sub = [&](std::size_t dst, std::size_t src, const Int& q) {
    if (q == 0) return;
    for (std::size_t i = 0; i < s.rows(); ++i) s(i, dst) -= q * s(i, src);
    for (std::size_t i = 0; i < v.rows(); ++i) v(i, dst) -= q * v(i, src);
  };

  std::size_t n = std::min(s.rows(), s.cols());
  for (std::size_t t = 0; t < n; ++t) {
    while (true) {
      // move the smallest nonzero of the trailing block to (t, t)
      std::size_t bi = s.rows(), bj = s.cols();
      for (std::size_t i = t; i < s.rows(); ++i)
        for (std::size_t j = t; j < s.cols(); ++j)
          if (s(i, j) != 0 && (bi == s.rows() || abs(s(i, j)) < abs(s(bi, bj)))) {
            bi = i;
            bj = j;
          }
      if (bi == s.rows()) goto done;  // trailing block is zero
      if (bi != t) {
        s.swap_rows(t, bi);
        u.swap_rows(t, bi);
      }
      if (bj != t) {
        s.swap_cols(t, bj);
        v.swap_cols(t, bj);
      }
      bool dirty = false;
      for (std::size_t i = t + 1; i < s.rows(); ++i) {
        if (s(i, t) == 0) continue;
        row_sub(i, t, s(i, t) / s(t, t));
        if (s(i, t) != 0) dirty = true;
      }
      for (std::size_t j = t + 1; j < s.cols(); ++j) {
        if (s(t, j) == 0) continue;
        col_sub(j, t, s(t, j) / s(t, t));
        if (s(t, j) != 0) dirty = true;
      }
      if (dirty) continue;
      // divisibility sweep: the pivot must divide the whole trailing block
      bool fixed = false;
      for (std::size_t i = t + 1; i < s.rows() && !fixed; ++i)
        for (std::size_t j = t + 1; j < s.cols() && !fixed; ++j)
          if (s(i, j) % s(t, t) != 0) {
            row_sub(t, i, Int(-1));  // add row i to row t, then re-reduce
            fixed = true;
          }
      if (!fixed) break;
    }
    if (s(t, t) < 0) {
      for (std::size_t j = 0; j < s.cols(); ++j) s(t, j) = -s(t, j);
      for (std::size_t j = 0; j < u.cols(); ++j) u(t, j) = -u(t, j);
    }
  }
done:
  return {s, u, v};
}

}  // namespace thetaver
