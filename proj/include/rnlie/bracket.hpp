#pragma once

// Lie brackets stored by structure constants c_ij^k (i < j only) together
// with the basic algebraic predicates and the GL(n) action
// (h.mu)(X, Y) = h mu(h^-1 X, h^-1 Y).

#include "rnlie/dense.hpp"
#include "rnlie/errors.hpp"
#include "rnlie/rational.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <string>
#include <vector>

namespace rnlie {

/// Index triple (i, j, k) of a structure constant c_ij^k, 0-based, i < j.
struct Triple {
  int i = 0;
  int j = 0;
  int k = 0;
  auto operator<=>(const Triple&) const = default;
};

inline std::string to_string(const Triple& t) {
  return "(" + std::to_string(t.i + 1) + "," + std::to_string(t.j + 1) + "," + std::to_string(t.k + 1) + ")";
}

enum class ScalarKind { Rational, Float };

template <class T>
class BasicBracket {
 public:
  using Scalar = T;

  struct Entry {
    int i, j, k;
    T c;
  };

  BasicBracket() = default;
  explicit BasicBracket(int dim) : dim_(dim) {
    if (dim < 1) throw PreconditionError("bracket dimension must be positive");
  }

  /// Entries with i > j are stored antisymmetrically; repeated entries add.
  BasicBracket(int dim, const std::vector<Entry>& entries) : BasicBracket(dim) {
    for (const auto& e : entries) {
      check_index(e.i);
      check_index(e.j);
      check_index(e.k);
      if (e.i == e.j) {
        if (e.c != T(0)) throw PreconditionError("diagonal bracket [e_i, e_i] must vanish");
        continue;
      }
      Triple t = e.i < e.j ? Triple{e.i, e.j, e.k} : Triple{e.j, e.i, e.k};
      T value = e.i < e.j ? e.c : T(-e.c);
      constants_[t] += value;
    }
    std::erase_if(constants_, [](const auto& kv) { return kv.second == T(0); });
  }

  int dim() const { return dim_; }
  const std::map<Triple, T>& constants() const { return constants_; }
  bool is_zero() const { return constants_.empty(); }

  /// c_ij^k with antisymmetry synthesized.
  T operator()(int i, int j, int k) const {
    if (i == j) return T(0);
    bool swap = i > j;
    auto it = constants_.find(swap ? Triple{j, i, k} : Triple{i, j, k});
    if (it == constants_.end()) return T(0);
    return swap ? T(-it->second) : it->second;
  }

  /// [x, y] for coordinate vectors.
  std::vector<T> apply(const std::vector<T>& x, const std::vector<T>& y) const {
    std::vector<T> out(dim_, T(0));
    for (const auto& [t, c] : constants_) {
      T w = x[t.i] * y[t.j] - x[t.j] * y[t.i];
      if (w != T(0)) out[t.k] += c * w;
    }
    return out;
  }

  /// [e_i, e_j] as a coordinate vector.
  std::vector<T> basis_bracket(int i, int j) const {
    std::vector<T> out(dim_, T(0));
    for (int k = 0; k < dim_; ++k) out[k] = (*this)(i, j, k);
    return out;
  }

  /// |mu|^2 summed over ordered pairs (i, j): each stored constant counts twice.
  T norm_squared() const {
    T s(0);
    for (const auto& [t, c] : constants_) s += c * c;
    return T(2) * s;
  }

  double max_abs() const {
    double m = 0;
    for (const auto& [t, c] : constants_) m = std::max(m, std::abs(to_double(c)));
    return m;
  }

  std::vector<Triple> support() const {
    std::vector<Triple> out;
    out.reserve(constants_.size());
    for (const auto& [t, c] : constants_) out.push_back(t);
    return out;
  }

  /// Bracket keeping only the constants indexed by `keep`.
  BasicBracket restricted(const std::vector<Triple>& keep) const {
    BasicBracket out(dim_);
    for (const auto& t : keep) {
      auto it = constants_.find(t);
      if (it != constants_.end()) out.constants_.insert(*it);
    }
    return out;
  }

  /// Drops constants below rel_tol * max|c| (float round-off cleanup).
  BasicBracket pruned(double rel_tol) const {
    BasicBracket out(dim_);
    double cut = rel_tol * max_abs();
    for (const auto& [t, c] : constants_)
      if (std::abs(to_double(c)) > cut) out.constants_.insert({t, c});
    return out;
  }

  BasicBracket scaled(const T& s) const {
    BasicBracket out(dim_);
    if (s == T(0)) return out;
    for (const auto& [t, c] : constants_) out.constants_.insert({t, c * s});
    return out;
  }

  template <class U>
  BasicBracket<U> cast() const {
    std::vector<typename BasicBracket<U>::Entry> entries;
    for (const auto& [t, c] : constants_) {
      if constexpr (std::is_same_v<U, double>)
        entries.push_back({t.i, t.j, t.k, to_double(c)});
      else
        entries.push_back({t.i, t.j, t.k, from_double<U>(to_double(c))});
    }
    return BasicBracket<U>(dim_, entries);
  }

  friend bool operator==(const BasicBracket&, const BasicBracket&) = default;

 private:
  void check_index(int i) const {
    if (i < 0 || i >= dim_) throw PreconditionError("bracket index out of range");
  }

  int dim_ = 1;
  std::map<Triple, T> constants_;
};

using Bracket = BasicBracket<double>;
using ExactBracket = BasicBracket<Rational>;

/// Dense copy of the structure constants, C[(i*n + j)*n + k] = c_ij^k for all
/// ordered (i, j).
struct StructureTensor {
  int n = 0;
  std::vector<double> c;

  explicit StructureTensor(const Bracket& b) : n(b.dim()), c(static_cast<std::size_t>(n) * n * n, 0.0) {
    for (const auto& [t, v] : b.constants()) {
      at(t.i, t.j, t.k) = v;
      at(t.j, t.i, t.k) = -v;
    }
  }
  double& at(int i, int j, int k) { return c[(static_cast<std::size_t>(i) * n + j) * n + k]; }
  double at(int i, int j, int k) const { return c[(static_cast<std::size_t>(i) * n + j) * n + k]; }

  /// Matrix of ad(e_i): column j holds [e_i, e_j].
  Eigen::MatrixXd ad(int i) const {
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) m(k, j) = at(i, j, k);
    return m;
  }
};

inline Eigen::MatrixXd ad_matrix(const Bracket& b, const Eigen::VectorXd& x) {
  const int n = b.dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [t, c] : b.constants()) {
    // [x, e_j] picks up x_i c_ij^k for (i, j) and -x_j c_ij^k for (j, i)
    m(t.k, t.j) += x(t.i) * c;
    m(t.k, t.i) -= x(t.j) * c;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Jacobi identity

/// Max over basis triples of the Euclidean norm of the Jacobi cycle sum.
template <class T>
double validate_jacobi(const BasicBracket<T>& b) {
  const int n = b.dim();
  if (b.is_zero()) return 0.0;
  // ad tensor lookups: [[e_i,e_j],e_k] = sum_l c_ij^l c_lk^m e_m
  double worst = 0.0;
  std::vector<T> cycle(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        std::fill(cycle.begin(), cycle.end(), T(0));
        const int idx[3][3] = {{i, j, k}, {j, k, i}, {k, i, j}};
        for (const auto& p : idx)
          for (int l = 0; l < n; ++l) {
            T c1 = b(p[0], p[1], l);
            if (c1 == T(0)) continue;
            for (int m = 0; m < n; ++m) {
              T c2 = b(l, p[2], m);
              if (c2 != T(0)) cycle[m] += c1 * c2;
            }
          }
        T sq(0);
        for (const auto& v : cycle) sq += v * v;
        worst = std::max(worst, std::sqrt(to_double(sq)));
      }
  return worst;
}

/// Exact mode: residual zero. Float mode: squared residual within 1e-9 of
/// the squared largest constant.
template <class T>
bool is_lie(const BasicBracket<T>& b) {
  double r = validate_jacobi(b);
  if constexpr (is_exact_v<T>) return r == 0.0;
  double scale = b.max_abs();
  return r <= 1e-9 * std::max(scale * scale, 1e-300);
}

template <class T>
void require_lie(const BasicBracket<T>& b) {
  if (!is_lie(b)) throw PreconditionError("input is not a Lie bracket (Jacobi residual " + std::to_string(validate_jacobi(b)) + ")");
}

// ---------------------------------------------------------------------------
// Lower central series

/// Dimensions of n, [n,n], [n,[n,n]], ... until the chain stabilizes. The
/// algebra is nilpotent iff the last entry is 0.
template <class T>
std::vector<int> lower_central_series(const BasicBracket<T>& b) {
  require_lie(b);
  const int n = b.dim();
  const double tol = is_exact_v<T> ? 0.0 : 1e-9 * std::max(1.0, b.max_abs());
  // current term stored as rref rows
  dense::Matrix<T> current = dense::Matrix<T>::identity(n);
  std::vector<int> dims{n};
  while (true) {
    dense::Matrix<T> next;
    for (int r = 0; r < current.rows(); ++r) {
      auto v = current.row(r);
      for (int i = 0; i < n; ++i) {
        std::vector<T> e(n, T(0));
        e[i] = T(1);
        next.append_row(b.apply(e, v));
      }
    }
    int d = 0;
    if (next.rows() > 0) {
      auto pivots = dense::rref(next, tol);
      d = static_cast<int>(pivots.size());
      dense::Matrix<T> basis(d, n);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < n; ++c) basis(r, c) = next(r, c);
      current = basis;
    }
    if (d == dims.back()) break;
    dims.push_back(d);
    if (d == 0) break;
  }
  return dims;
}

template <class T>
bool is_nilpotent(const BasicBracket<T>& b) {
  return lower_central_series(b).back() == 0;
}

/// Nilpotency step (number of nonzero terms after n itself), or -1 if not nilpotent.
template <class T>
int nilpotency_step(const BasicBracket<T>& b) {
  auto dims = lower_central_series(b);
  if (dims.back() != 0) return -1;
  return static_cast<int>(dims.size()) - 1;
}

// ---------------------------------------------------------------------------
// Center

/// Linear system whose kernel is the center: rows indexed by (j, k), entry
/// c_ij^k in column i.
template <class T>
dense::Matrix<T> center_system(const BasicBracket<T>& b) {
  const int n = b.dim();
  dense::Matrix<T> m(n * n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) m(j * n + k, i) = b(i, j, k);
  return m;
}

/// Exact kernel basis (free-variable form) of the center.
template <class T>
dense::Matrix<T> center_exact(const BasicBracket<T>& b) {
  return dense::null_space(center_system(b), is_exact_v<T> ? 0.0 : 1e-10 * std::max(1.0, b.max_abs()));
}

/// Orthonormal basis (columns) of the center.
template <class T>
Eigen::MatrixXd center(const BasicBracket<T>& b) {
  const int n = b.dim();
  if (b.is_zero()) return Eigen::MatrixXd::Identity(n, n);
  if constexpr (is_exact_v<T>) {
    Eigen::MatrixXd basis = dense::to_eigen(center_exact(b));
    if (basis.cols() == 0) return Eigen::MatrixXd(n, 0);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, basis.cols());
  } else {
    Eigen::MatrixXd sys = dense::to_eigen(center_system(b));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    double cut = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
    int r = 0;
    while (r < s.size() && s(r) > cut) ++r;
    return svd.matrixV().rightCols(n - r);
  }
}

// ---------------------------------------------------------------------------
// Basis change action

/// Invertible n x n matrix acting on brackets.
template <class T>
class BasicBasisChange {
 public:
  explicit BasicBasisChange(dense::Matrix<T> h) : h_(std::move(h)) {
    if (h_.rows() != h_.cols()) throw PreconditionError("basis change must be square");
    if constexpr (is_exact_v<T>) {
      auto inv = dense::inverse(h_, 0.0);
      if (!inv) throw PreconditionError("basis change is singular");
      inv_ = std::move(*inv);
    } else {
      Eigen::MatrixXd m = dense::to_eigen(h_);
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
      if (!(std::abs(lu.determinant()) >= 1e-12)) throw PreconditionError("basis change is singular");
      inv_ = dense::from_eigen<double>(lu.inverse());
    }
  }
  const dense::Matrix<T>& matrix() const { return h_; }
  const dense::Matrix<T>& inverse() const { return inv_; }

 private:
  dense::Matrix<T> h_;
  dense::Matrix<T> inv_;
};

using BasisChange = BasicBasisChange<double>;

/// h.mu := h mu(h^-1 ., h^-1 .).
template <class T>
BasicBracket<T> act(const BasicBasisChange<T>& h, const BasicBracket<T>& b) {
  const int n = b.dim();
  if (h.matrix().rows() != n) throw PreconditionError("basis change dimension mismatch");
  const auto& g = h.inverse();
  std::vector<std::vector<T>> cols(n);
  for (int a = 0; a < n; ++a) cols[a] = g.column(a);
  std::vector<typename BasicBracket<T>::Entry> entries;
  for (int a = 0; a < n; ++a)
    for (int c = a + 1; c < n; ++c) {
      auto v = h.matrix().apply(b.apply(cols[a], cols[c]));
      for (int k = 0; k < n; ++k)
        if (v[k] != T(0)) entries.push_back({a, c, k, v[k]});
    }
  BasicBracket<T> out(n, entries);
  if constexpr (!is_exact_v<T>) return out.pruned(1e-13);
  return out;
}

inline Bracket act(const Eigen::MatrixXd& h, const Bracket& b) {
  return act(BasisChange(dense::from_eigen<double>(h)), b);
}

/// Diagonal action: c_ij^k -> c_ij^k * h_k / (h_i h_j). No inversion needed.
template <class T>
BasicBracket<T> act_diagonal(const std::vector<T>& h, const BasicBracket<T>& b) {
  std::vector<typename BasicBracket<T>::Entry> entries;
  for (const auto& [t, c] : b.constants()) {
    if (h[t.i] == T(0) || h[t.j] == T(0)) throw PreconditionError("diagonal basis change is singular");
    entries.push_back({t.i, t.j, t.k, c * h[t.k] / (h[t.i] * h[t.j])});
  }
  return BasicBracket<T>(b.dim(), entries);
}

}  // namespace rnlie
