#pragma once

// Exact linear feasibility with strict rows. Systems are solved through the
// dual program, so an infeasible system comes back with Motzkin multipliers
// that anyone can re-check by plain arithmetic.

#include "troplift/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace troplift {

namespace detail {

// min c.w  s.t.  M w = r, w >= 0, by the two-phase tableau method with Bland's rule.
struct SimplexOutcome {
  enum class Status { optimal, unbounded, infeasible } status = Status::infeasible;
  QVec w;                            // optimal point (optimal)
  QVec ray;                          // improving ray (unbounded)
  QVec duals;                        // pi with M^T pi <= c, r.pi = optimum (optimal)
  Rational value;
};

class Tableau {
 public:
  Tableau(const QMatrix& m, const QVec& r, std::size_t cols) : rows_(m.size()), cols_(cols) {
    // Artificial columns occupy [cols, cols + rows).
    t_.assign(rows_, QVec(cols_ + rows_ + 1, 0));
    sign_.assign(rows_, 1);
    basis_.resize(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      sign_[i] = r[i] < 0 ? -1 : 1;
      for (std::size_t j = 0; j < cols_; ++j) t_[i][j] = m[i][j] * sign_[i];
      t_[i][cols_ + i] = 1;
      t_[i].back() = r[i] * sign_[i];
      basis_[i] = cols_ + i;
    }
    alive_.assign(rows_, true);
  }

  // Returns false when phase one leaves a positive artificial (no feasible w).
  bool phase_one() {
    QVec cost(width(), 0);
    for (std::size_t i = 0; i < rows_; ++i) cost[cols_ + i] = 1;
    set_objective(cost);
    run(width(), nullptr);
    if (obj_.back() != 0) return false;  // obj_.back() holds -value
    // Drive artificials out of the basis; rows where that is impossible are redundant.
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!alive_[i] || basis_[i] < cols_) continue;
      std::size_t j = 0;
      while (j < cols_ && t_[i][j] == 0) ++j;
      if (j == cols_) alive_[i] = false;
      else pivot(i, j);
    }
    return true;
  }

  // Phase two over the structural columns only.
  SimplexOutcome phase_two(const QVec& c) {
    QVec cost(width(), 0);
    for (std::size_t j = 0; j < cols_; ++j) cost[j] = c[j];
    set_objective(cost);
    SimplexOutcome out;
    std::optional<std::size_t> unbounded_col;
    run(cols_, &unbounded_col);
    if (unbounded_col) {
      out.status = SimplexOutcome::Status::unbounded;
      out.ray.assign(cols_, 0);
      out.ray[*unbounded_col] = 1;
      for (std::size_t i = 0; i < rows_; ++i)
        if (alive_[i]) out.ray[basis_[i]] = -t_[i][*unbounded_col];
      return out;
    }
    out.status = SimplexOutcome::Status::optimal;
    out.w.assign(cols_, 0);
    for (std::size_t i = 0; i < rows_; ++i)
      if (alive_[i]) out.w[basis_[i]] = t_[i].back();
    out.value = -obj_.back();
    // pi_i = c_B B^{-1}; the artificial column of row i holds B^{-1} e_i (scaled by sign).
    out.duals.assign(rows_, 0);
    for (std::size_t i = 0; i < rows_; ++i) {
      Rational reduced = obj_[cols_ + i];  // 0 - pi . (sign_i e_i)
      out.duals[i] = -reduced * sign_[i];
    }
    return out;
  }

 private:
  std::size_t width() const { return cols_ + rows_; }

  void set_objective(const QVec& cost) {
    cost_ = cost;
    obj_.assign(width() + 1, 0);
    for (std::size_t j = 0; j < width(); ++j) obj_[j] = cost[j];
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!alive_[i]) continue;
      const Rational& cb = cost[basis_[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j <= width(); ++j) obj_[j] -= cb * t_[i][j];
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    Rational inv = 1 / t_[r][c];
    for (auto& x : t_[r]) x *= inv;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r || t_[i][c] == 0) continue;
      Rational f = t_[i][c];
      for (std::size_t j = 0; j <= width(); ++j)
        if (t_[r][j] != 0) t_[i][j] -= f * t_[r][j];
    }
    if (obj_[c] != 0) {
      Rational f = obj_[c];
      for (std::size_t j = 0; j <= width(); ++j)
        if (t_[r][j] != 0) obj_[j] -= f * t_[r][j];
    }
    basis_[r] = c;
  }

  // Columns >= limit never enter.
  void run(std::size_t limit, std::optional<std::size_t>* unbounded) {
    for (;;) {
      std::size_t enter = limit;
      for (std::size_t j = 0; j < limit; ++j)
        if (obj_[j] < 0) {
          enter = j;
          break;
        }
      if (enter == limit) return;
      std::size_t leave = rows_;
      Rational best;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (!alive_[i] || t_[i][enter] <= 0) continue;
        Rational ratio = t_[i].back() / t_[i][enter];
        if (leave == rows_ || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == rows_) {
        if (unbounded) *unbounded = enter;
        return;
      }
      pivot(leave, enter);
    }
  }

  std::size_t rows_, cols_;
  std::vector<QVec> t_;
  std::vector<int> sign_;
  std::vector<std::size_t> basis_;
  std::vector<bool> alive_;
  QVec cost_, obj_;
};

inline SimplexOutcome simplex_min(const QMatrix& m, const QVec& r, const QVec& c) {
  std::size_t cols = c.size();
  Tableau tab(m, r, cols);
  if (!tab.phase_one()) return {};
  return tab.phase_two(c);
}

}  // namespace detail

enum class RowKind { weak, strict };

// a . x <= b (weak) or a . x < b (strict).
struct Row {
  QVec a;
  Rational b;
  RowKind kind = RowKind::weak;
  std::string label;
};

struct LinearSystem {
  std::size_t nvars = 0;
  std::vector<Row> rows;

  void add(QVec a, Rational b, RowKind kind, std::string label) {
    a.resize(nvars, 0);
    rows.push_back({std::move(a), std::move(b), kind, std::move(label)});
  }
};

struct Feasibility {
  bool feasible = false;
  QVec x;            // a strict solution when feasible
  QVec multipliers;  // Motzkin multipliers (one per row, summing to 1) when infeasible
};

inline bool satisfies(const LinearSystem& s, const QVec& x) {
  for (const auto& row : s.rows) {
    Rational lhs = dot(row.a, x);
    if (row.kind == RowKind::weak ? lhs > row.b : lhs >= row.b) return false;
  }
  return true;
}

// y >= 0, y^T A = 0, and either y.b < 0, or y.b = 0 with positive weight on a
// strict row. Such a y proves that no x satisfies the system.
inline bool is_infeasibility_witness(const LinearSystem& s, const QVec& y) {
  if (y.size() != s.rows.size()) return false;
  QVec combo(s.nvars, 0);
  Rational rhs = 0, strict_weight = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0) return false;
    if (y[i] == 0) continue;
    const Row& row = s.rows[i];
    if (row.a.size() != s.nvars) return false;
    for (std::size_t k = 0; k < s.nvars; ++k) combo[k] += y[i] * row.a[k];
    rhs += y[i] * row.b;
    if (row.kind == RowKind::strict) strict_weight += y[i];
  }
  if (!is_zero(combo)) return false;
  return rhs < 0 || (rhs == 0 && strict_weight > 0);
}

inline Feasibility solve(const LinearSystem& s) {
  // Dual of  max t  s.t.  A_w x <= b_w,  A_s x + t <= b_s,  t <= 1:
  //   min b.y + z  s.t.  A^T y = 0,  sum_strict y + z = 1,  y, z >= 0.
  std::size_t m = s.rows.size();
  std::size_t n = s.nvars;
  QMatrix mat(n + 1, QVec(m + 1, 0));
  QVec rhs(n + 1, 0), cost(m + 1, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < n; ++k) mat[k][i] = s.rows[i].a[k];
    if (s.rows[i].kind == RowKind::strict) mat[n][i] = 1;
    cost[i] = s.rows[i].b;
  }
  mat[n][m] = 1;
  cost[m] = 1;
  rhs[n] = 1;
  auto out = detail::simplex_min(mat, rhs, cost);
  Feasibility f;
  auto normalize = [&](QVec y) {
    y.resize(m);
    Rational total = 0;
    for (const auto& v : y) total += v;
    if (total != 0)
      for (auto& v : y) v /= total;
    return y;
  };
  using S = detail::SimplexOutcome::Status;
  if (out.status == S::unbounded) {
    f.multipliers = normalize(out.ray);
    return f;
  }
  if (out.status == S::infeasible) throw std::logic_error("dual program unexpectedly infeasible");
  if (out.value <= 0) {
    f.multipliers = normalize(out.w);
    return f;
  }
  f.feasible = true;
  f.x.assign(out.duals.begin(), out.duals.begin() + static_cast<long>(n));
  if (!satisfies(s, f.x)) throw std::logic_error("recovered primal point violates the system");
  return f;
}

// sup c.x over the closure of the system (strict rows relaxed to weak).
// nullopt means unbounded; assumes the closure is nonempty.
inline std::optional<Rational> maximize(const LinearSystem& s, const QVec& c) {
  // Dual: min b.y  s.t.  A^T y = c, y >= 0.
  std::size_t m = s.rows.size();
  QMatrix mat(s.nvars, QVec(m, 0));
  QVec cost(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < s.nvars; ++k) mat[k][i] = s.rows[i].a[k];
    cost[i] = s.rows[i].b;
  }
  QVec rhs = c;
  rhs.resize(s.nvars, 0);
  auto out = detail::simplex_min(mat, rhs, cost);
  if (out.status != detail::SimplexOutcome::Status::optimal) return std::nullopt;
  return out.value;
}

}  // namespace troplift
