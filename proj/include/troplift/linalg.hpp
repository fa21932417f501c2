#pragma once

// Exact dense linear algebra over Q, and integer kernels over Z.

#include "troplift/rational.hpp"

#include <vector>

namespace troplift {

using QMatrix = std::vector<QVec>;
using ZMatrix = std::vector<ZVec>;

// In-place reduced row echelon form; returns pivot columns.
inline std::vector<std::size_t> rref(QMatrix& m, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < m.size(); ++c) {
    std::size_t p = row;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[row]);
    Rational inv = 1 / m[row][c];
    for (auto& x : m[row]) x *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][c] == 0) continue;
      Rational f = m[r][c];
      for (std::size_t k = 0; k < cols; ++k) m[r][k] -= f * m[row][k];
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

inline std::size_t rank_of(QMatrix m, std::size_t cols) { return rref(m, cols).size(); }

// Basis of {x : m x = 0}.
inline std::vector<QVec> kernel(QMatrix m, std::size_t cols) {
  auto pivots = rref(m, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<QVec> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    QVec x(cols, 0);
    x[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = -m[r][free];
    basis.push_back(std::move(x));
  }
  return basis;
}

// Lattice basis of {x in Z^n : a x = 0}, obtained from a unimodular column
// reduction A U = [H | 0]; the trailing columns of U span the kernel.
inline std::vector<ZVec> integer_kernel(const ZMatrix& a, std::size_t n) {
  ZMatrix work = a;
  ZMatrix u(n, ZVec(n, 0));
  for (std::size_t i = 0; i < n; ++i) u[i][i] = 1;
  auto col_op = [&](std::size_t i, std::size_t j, const Integer& p, const Integer& q, const Integer& r,
                    const Integer& s) {
    // (col_i, col_j) <- (p col_i + q col_j, r col_i + s col_j)
    auto apply = [&](ZVec& row) {
      Integer x = row[i], y = row[j];
      row[i] = p * x + q * y;
      row[j] = r * x + s * y;
    };
    for (auto& row : work) apply(row);
    for (auto& row : u) apply(row);
  };
  std::size_t pivot_col = 0;
  for (std::size_t r = 0; r < work.size() && pivot_col < n; ++r) {
    for (std::size_t j = pivot_col + 1; j < n; ++j) {
      if (work[r][j] == 0) continue;
      Integer x = work[r][pivot_col], y = work[r][j];
      Integer g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
      // det [[s, -y/g], [t, x/g]] = (s x + t y)/g = 1
      col_op(pivot_col, j, s, t, Integer(-y / g), Integer(x / g));
    }
    if (work[r][pivot_col] != 0) ++pivot_col;
  }
  std::vector<ZVec> out;
  for (std::size_t c = pivot_col; c < n; ++c) {
    ZVec col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = u[i][c];
    out.push_back(std::move(col));
  }
  return out;
}

// First nonzero entry positive.
inline ZVec sign_normalized(ZVec v) {
  for (const auto& x : v) {
    if (x == 0) continue;
    if (x < 0) v = negated(v);
    break;
  }
  return v;
}

}  // namespace troplift
