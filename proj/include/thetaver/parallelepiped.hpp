#pragma once
// Integer points of the half-open fundamental parallelepiped
//     Pi_W = { sum lambda_i w_i : 0 <= lambda_i < 1 } (intersect) Z^r
// for independent integer generators W, together with the unique
// decomposition gamma = beta + sum b_i w_i (beta in Pi_W, b integral) of
// lattice points in the saturation span(W) (intersect) Z^r.
#include "thetaver/expected.hpp"
#include "thetaver/linalg.hpp"
#include "thetaver/rational.hpp"

#include <set>
#include <stdexcept>
#include <vector>

namespace thetaver {

struct DependentW : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PiSet {
  std::vector<IntVec> w;       // the generators
  std::vector<IntVec> points;  // sorted lexicographically
  Int saturation_index;        // |points| = [span(W) cap Z^r : ZW]
  IntMat lattice_basis;        // rows: basis of the saturation lattice
};

struct NotInSpan {
  std::string message;
};

struct Decomposition {
  IntVec beta;
  IntVec b;
};

namespace pi_detail {

inline IntMat w_matrix(const std::vector<IntVec>& w) {
  if (w.empty()) throw DependentW("empty generator list");
  IntMat m(w.size(), w.front().size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i].size() != w.front().size()) throw std::invalid_argument("ragged W");
    for (std::size_t j = 0; j < w[i].size(); ++j) m(i, j) = w[i][j];
  }
  return m;
}

inline void check_independent(const IntMat& m) {
  if (rank(m) != m.rows()) throw DependentW("generators are linearly dependent");
}

// Basis of span_Q(rows) cap Z^r: bottom rows of the HNF transform of the
// transposed rational-kernel matrix.
inline IntMat saturation_basis(const IntMat& w) {
  std::size_t d = w.rows(), r = w.cols();
  if (d == r) return IntMat::identity(r);
  auto ker = kernel_basis(rat_mat(w));  // {y : W y = 0}, r - d vectors
  IntMat c(ker.size(), r);
  for (std::size_t i = 0; i < ker.size(); ++i) {
    IntVec ci = clear_denominators(ker[i]);
    for (std::size_t j = 0; j < r; ++j) c(i, j) = ci[j];
  }
  auto [h, u] = hnf(transpose(c));  // h = u * c^T, zero rows at the bottom
  IntMat s(d, r);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < r; ++j) s(i, j) = u(r - d + i, j);
  return s;
}

}  // namespace pi_detail

// gamma = beta + sum b_i w_i with beta in Pi_W: solve gamma = lambda W over
// Q and split off the integer parts of lambda.
inline Expected<Decomposition, NotInSpan> decompose(const IntVec& gamma,
                                                    const std::vector<IntVec>& w) {
  IntMat wm = pi_detail::w_matrix(w);
  pi_detail::check_independent(wm);
  RatVec rhs(gamma.size());
  for (std::size_t j = 0; j < gamma.size(); ++j) rhs[j] = Rat(gamma[j]);
  auto lambda = solve_exact(rat_mat(transpose(wm)), rhs);
  if (!lambda) return NotInSpan{"vector lies outside span(W)"};
  Decomposition out;
  out.b.reserve(w.size());
  for (const Rat& l : *lambda) out.b.push_back(floor_rat(l));
  out.beta = gamma;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < gamma.size(); ++j) out.beta[j] -= out.b[i] * w[i][j];
  return out;
}

inline PiSet pi_points(const std::vector<IntVec>& w) {
  IntMat wm = pi_detail::w_matrix(w);
  pi_detail::check_independent(wm);
  std::size_t d = wm.rows(), r = wm.cols();

  IntMat s = pi_detail::saturation_basis(wm);

  // W written in the saturation basis: integral d x d, nonsingular
  IntMat e(d, d);
  RatMat st = rat_mat(transpose(s));
  for (std::size_t i = 0; i < d; ++i) {
    RatVec rhs(r);
    for (std::size_t j = 0; j < r; ++j) rhs[j] = Rat(wm(i, j));
    auto sol = solve_exact(st, rhs);
    if (!sol) throw std::logic_error("pi_points: generator outside saturation lattice");
    for (std::size_t k = 0; k < d; ++k) {
      if (!is_integer((*sol)[k]))
        throw std::logic_error("pi_points: non-integral saturation coordinates");
      e(i, k) = numerator((*sol)[k]);
    }
  }

  // coset representatives of Z^d / (rows of E) from the Smith form
  auto [sigma, u, v] = snf(e);
  IntMat vinv = unimodular_inverse(v);
  Int index(1);
  std::vector<Int> diag(d);
  for (std::size_t i = 0; i < d; ++i) {
    diag[i] = sigma(i, i);
    if (diag[i] == 0) throw std::logic_error("pi_points: singular index matrix");
    index *= diag[i];
  }

  std::set<IntVec> points;
  IntVec counter(d, Int(0));
  while (true) {
    // y = counter * V^(-1), x = y * S, then reduce x into the parallelepiped
    IntVec y(d, Int(0));
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i < d; ++i) y[j] += counter[i] * vinv(i, j);
    IntVec x(r, Int(0));
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t i = 0; i < d; ++i) x[j] += y[i] * s(i, j);
    auto dec = decompose(x, w);
    if (!dec.ok()) throw std::logic_error("pi_points: representative fell outside span");
    if (!points.insert(dec.value().beta).second)
      throw std::logic_error("pi_points: coset representatives collided");
    // mixed-radix increment
    std::size_t pos = 0;
    while (pos < d) {
      counter[pos] += 1;
      if (counter[pos] < diag[pos]) break;
      counter[pos] = 0;
      ++pos;
    }
    if (pos == d) break;
  }

  PiSet out;
  out.w = w;
  out.points.assign(points.begin(), points.end());
  out.saturation_index = index;
  out.lattice_basis = s;
  return out;
}

// Independent oracle: scan the integer bounding box of the parallelepiped
// vertices and keep points whose coordinates satisfy 0 <= lambda < 1.
// Exponential in the box volume; test use only.
inline PiSet pi_points_box_oracle(const std::vector<IntVec>& w) {
  IntMat wm = pi_detail::w_matrix(w);
  pi_detail::check_independent(wm);
  std::size_t d = wm.rows(), r = wm.cols();

  // bounding box over the 2^d vertex subset sums
  IntVec lo(r, Int(0)), hi(r, Int(0));
  for (std::size_t mask = 0; mask < (std::size_t(1) << d); ++mask) {
    IntVec v(r, Int(0));
    for (std::size_t i = 0; i < d; ++i)
      if (mask & (std::size_t(1) << i))
        for (std::size_t j = 0; j < r; ++j) v[j] += wm(i, j);
    for (std::size_t j = 0; j < r; ++j) {
      lo[j] = std::min(lo[j], v[j]);
      hi[j] = std::max(hi[j], v[j]);
    }
  }

  // fast membership: lambda = Minv * x[pivot coords], check the rest
  RatMat wr = rat_mat(wm);
  auto pivot_cols = rref(wr);  // wr now reduced; pivot_cols has size d
  RatMat msub(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) msub(i, k) = Rat(wm(i, pivot_cols[k]));
  RatMat minv = inverse(transpose(msub));

  std::set<IntVec> points;
  IntVec x = lo;
  while (true) {
    RatVec xp(d);
    for (std::size_t k = 0; k < d; ++k) xp[k] = Rat(x[pivot_cols[k]]);
    RatVec lambda = matvec(minv, xp);
    bool inside = true;
    for (const Rat& l : lambda)
      if (l < 0 || l >= 1) {
        inside = false;
        break;
      }
    if (inside) {
      // verify the non-pivot coordinates
      for (std::size_t j = 0; j < r && inside; ++j) {
        Rat acc;
        for (std::size_t i = 0; i < d; ++i) acc += lambda[i] * Rat(wm(i, j));
        if (acc != Rat(x[j])) inside = false;
      }
      if (inside) points.insert(x);
    }
    std::size_t pos = 0;
    while (pos < r) {
      x[pos] += 1;
      if (x[pos] <= hi[pos]) break;
      x[pos] = lo[pos];
      ++pos;
    }
    if (pos == r) break;
  }

  PiSet out;
  out.w = w;
  out.points.assign(points.begin(), points.end());
  out.saturation_index = Int(points.size());
  out.lattice_basis = pi_detail::saturation_basis(wm);
  return out;
}

}  // namespace thetaver
