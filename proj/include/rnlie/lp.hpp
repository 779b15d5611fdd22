#pragma once

// Dense two-phase simplex with Bland's rule, templated on the scalar so the
// same code runs in exact rational arithmetic and in doubles.

#include "rnlie/rational.hpp"

#include <cassert>
#include <limits>
#include <optional>
#include <vector>

namespace rnlie::lp {

enum class Relation { LessEq, GreaterEq, Equal };
enum class Status { Optimal, Infeasible, Unbounded };

template <class T>
struct Constraint {
  std::vector<T> coeffs;
  Relation rel = Relation::LessEq;
  T rhs{0};
};

/// maximize objective . x subject to the constraints; variables are
/// nonnegative unless flagged free.
template <class T>
struct Problem {
  int num_vars = 0;
  std::vector<bool> free;
  std::vector<T> objective;
  std::vector<Constraint<T>> constraints;

  explicit Problem(int n = 0) : num_vars(n), free(n, false), objective(n, T(0)) {}

  void add(std::vector<T> coeffs, Relation rel, T rhs) {
    assert(static_cast<int>(coeffs.size()) == num_vars);
    constraints.push_back({std::move(coeffs), rel, std::move(rhs)});
  }
};

template <class T>
struct Result {
  Status status = Status::Infeasible;
  T value{0};
  std::vector<T> x;
  /// One multiplier per constraint (sign convention of a maximization with
  /// <= rows: y >= 0 on <= rows, y <= 0 on >= rows).
  std::vector<T> dual;
};

namespace detail {

template <class T>
bool positive(const T& x, double tol) {
  if constexpr (is_exact_v<T>) return x > 0;
  else return x > tol;
}
template <class T>
bool negative(const T& x, double tol) {
  if constexpr (is_exact_v<T>) return x < 0;
  else return x < -tol;
}

template <class T>
class Tableau {
 public:
  Tableau(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows + 1) * (cols + 1), T(0)), basis_(rows, -1) {}

  T& at(int r, int c) { return a_[static_cast<std::size_t>(r) * (cols_ + 1) + c]; }
  T& rhs(int r) { return at(r, cols_); }
  T& obj(int c) { return at(rows_, c); }
  std::vector<int>& basis() { return basis_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  void pivot(int pr, int pc) {
    T inv = T(1) / at(pr, pc);
    for (int c = 0; c <= cols_; ++c) at(pr, c) *= inv;
    for (int r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      T f = at(r, pc);
      if (f == T(0)) continue;
      for (int c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
    }
    basis_[pr] = pc;
  }

  /// Runs simplex iterations on the objective row (minimizing reduced costs
  /// convention: the row stores c_B B^-1 A - c). Columns with allowed[c] ==
  /// false never enter. Returns false when unbounded.
  bool optimize(const std::vector<bool>& allowed, double tol) {
    while (true) {
      int enter = -1;
      for (int c = 0; c < cols_; ++c)
        if (allowed[c] && negative(obj(c), tol)) {
          enter = c;  // Bland: lowest index
          break;
        }
      if (enter < 0) return true;
      int leave = -1;
      T best{0};
      for (int r = 0; r < rows_; ++r) {
        if (!positive(at(r, enter), tol)) continue;
        T ratio = rhs(r) / at(r, enter);
        if (leave < 0 || ratio < best || (ratio == best && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

 private:
  int rows_, cols_;
  std::vector<T> a_;
  std::vector<int> basis_;
};

}  // namespace detail

template <class T>
Result<T> solve(const Problem<T>& p, double tol = 1e-11) {
  const int m = static_cast<int>(p.constraints.size());
  // Column layout: structural (free vars split into +/-), slacks, artificials.
  std::vector<int> plus_col(p.num_vars), minus_col(p.num_vars, -1);
  int ncols = 0;
  for (int v = 0; v < p.num_vars; ++v) {
    plus_col[v] = ncols++;
    if (p.free[v]) minus_col[v] = ncols++;
  }
  std::vector<int> slack_col(m, -1), art_col(m, -1);
  std::vector<int> sign(m, 1);
  for (int r = 0; r < m; ++r)
    if (p.constraints[r].rel != Relation::Equal) slack_col[r] = ncols++;
  const int first_art = ncols;
  for (int r = 0; r < m; ++r) {
    const auto& c = p.constraints[r];
    // Row as written: a x + s_r = b (<=), a x - s_r = b (>=), a x = b (=).
    // Flip the whole row if b < 0 so the rhs is nonnegative.
    sign[r] = c.rhs < T(0) ? -1 : 1;
    bool slack_is_basic = (c.rel == Relation::LessEq && sign[r] == 1) || (c.rel == Relation::GreaterEq && sign[r] == -1);
    if (!slack_is_basic) art_col[r] = ncols++;
  }
  detail::Tableau<T> tab(m, ncols);
  for (int r = 0; r < m; ++r) {
    const auto& c = p.constraints[r];
    T s = T(sign[r]);
    for (int v = 0; v < p.num_vars; ++v) {
      tab.at(r, plus_col[v]) = s * c.coeffs[v];
      if (minus_col[v] >= 0) tab.at(r, minus_col[v]) = -s * c.coeffs[v];
    }
    if (slack_col[r] >= 0) tab.at(r, slack_col[r]) = s * T(c.rel == Relation::LessEq ? 1 : -1);
    tab.rhs(r) = s * c.rhs;
    if (art_col[r] >= 0) {
      tab.at(r, art_col[r]) = T(1);
      tab.basis()[r] = art_col[r];
    } else {
      tab.basis()[r] = slack_col[r];
    }
  }

  Result<T> result;
  std::vector<bool> allowed(ncols, true);

  // Phase 1: minimize the sum of artificials == maximize -sum.
  if (first_art < ncols) {
    for (int c = 0; c <= ncols; ++c) tab.obj(c) = T(0);
    for (int c = first_art; c < ncols; ++c) tab.obj(c) = T(1);
    for (int r = 0; r < m; ++r)
      if (art_col[r] >= 0)
        for (int c = 0; c <= ncols; ++c) tab.obj(c) -= tab.at(r, c);
    tab.optimize(allowed, tol);
    T infeas = -tab.obj(ncols);
    if (detail::positive(infeas, tol * 10)) {
      result.status = Status::Infeasible;
      return result;
    }
    // Drive remaining artificials out of the basis where possible.
    for (int r = 0; r < m; ++r) {
      if (tab.basis()[r] < first_art) continue;
      for (int c = 0; c < first_art; ++c)
        if (!is_zero(tab.at(r, c), tol)) {
          tab.pivot(r, c);
          break;
        }
    }
    for (int c = first_art; c < ncols; ++c) allowed[c] = false;
  }

  // Phase 2 objective row: -c for structural columns, then eliminate basics.
  for (int c = 0; c <= ncols; ++c) tab.obj(c) = T(0);
  for (int v = 0; v < p.num_vars; ++v) {
    tab.obj(plus_col[v]) = -p.objective[v];
    if (minus_col[v] >= 0) tab.obj(minus_col[v]) = p.objective[v];
  }
  for (int r = 0; r < m; ++r) {
    int b = tab.basis()[r];
    T f = tab.obj(b);
    if (f == T(0)) continue;
    for (int c = 0; c <= ncols; ++c) tab.obj(c) -= f * tab.at(r, c);
  }
  if (!tab.optimize(allowed, tol)) {
    result.status = Status::Unbounded;
    return result;
  }

  result.status = Status::Optimal;
  result.value = tab.obj(ncols);
  std::vector<T> col_value(ncols, T(0));
  for (int r = 0; r < m; ++r) col_value[tab.basis()[r]] = tab.rhs(r);
  result.x.assign(p.num_vars, T(0));
  for (int v = 0; v < p.num_vars; ++v) {
    result.x[v] = col_value[plus_col[v]];
    if (minus_col[v] >= 0) result.x[v] -= col_value[minus_col[v]];
  }
  // Row duals: the objective row entry under a column e_r (in flipped-row
  // coordinates) equals y'_r; undo the flip and the slack sign.
  result.dual.assign(m, T(0));
  for (int r = 0; r < m; ++r) {
    if (slack_col[r] >= 0) {
      T s = T(p.constraints[r].rel == Relation::LessEq ? 1 : -1);
      // column = sign*s*e_r, objective row = y'_r * sign * s; y_r = sign * y'_r
      result.dual[r] = tab.obj(slack_col[r]) * s;
    } else {
      // artificial column = e_r in flipped coordinates, cost 0 in phase 2
      result.dual[r] = tab.obj(art_col[r]) * T(sign[r]);
    }
  }
  return result;
}

}  // namespace rnlie::lp
