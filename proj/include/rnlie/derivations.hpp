#pragma once

// Derivation algebras, the diagonal torus Der(n) cap Diag(n), additive Jordan
// decomposition and the signed-permutation Weyl group.

#include "rnlie/bracket.hpp"

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace rnlie {

// ---------------------------------------------------------------------------
// Leibniz system

/// Rows indexed by (i<j, k), unknowns D(p, q) at column p*n + q.
template <class T>
dense::Matrix<T> leibniz_system(const BasicBracket<T>& b) {
  const int n = b.dim();
  dense::Matrix<T> m(n * (n - 1) / 2 * n, n * n);
  int row = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k, ++row) {
        // D[e_i,e_j] - [D e_i, e_j] - [e_i, D e_j], k-th coordinate
        for (int l = 0; l < n; ++l) {
          T cij = b(i, j, l);
          if (cij != T(0)) m(row, k * n + l) += cij;
          T clj = b(l, j, k);
          if (clj != T(0)) m(row, l * n + i) -= clj;
          T cil = b(i, l, k);
          if (cil != T(0)) m(row, l * n + j) -= cil;
        }
      }
  return m;
}

/// Max over basis pairs of |D[x,y] - [Dx,y] - [x,Dy]|.
inline double leibniz_residual(const Eigen::MatrixXd& d, const Bracket& b) {
  const int n = b.dim();
  StructureTensor c(b);
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Eigen::VectorXd lhs = Eigen::VectorXd::Zero(n);
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) {
          s += d(k, l) * c.at(i, j, l);
          s -= d(l, i) * c.at(l, j, k);
          s -= d(l, j) * c.at(i, l, k);
        }
        lhs(k) = s;
      }
      worst = std::max(worst, lhs.norm());
    }
  return worst;
}

inline bool is_derivation(const Eigen::MatrixXd& d, const Bracket& b) {
  if (d.rows() != b.dim() || d.cols() != b.dim()) return false;
  double scale = std::max(1.0, d.norm()) * std::max(1.0, std::sqrt(b.norm_squared()));
  return leibniz_residual(d, b) <= 1e-9 * scale;
}

inline void require_derivation(const Eigen::MatrixXd& d, const Bracket& b) {
  if (d.rows() != b.dim() || d.cols() != b.dim()) throw PreconditionError("derivation has wrong size");
  if (!is_derivation(d, b))
    throw PreconditionError("matrix is not a derivation (Leibniz residual " + std::to_string(leibniz_residual(d, b)) + ")");
}

/// Exact null-space basis of the Leibniz system, one n x n matrix per entry.
template <class T>
std::vector<dense::Matrix<T>> derivation_space_exact(const BasicBracket<T>& b) {
  const int n = b.dim();
  std::vector<dense::Matrix<T>> out;
  dense::Matrix<T> basis;
  if (n == 1) {
    basis = dense::Matrix<T>::identity(1);
  } else {
    basis = dense::null_space(leibniz_system(b), is_exact_v<T> ? 0.0 : 1e-10 * std::max(1.0, b.max_abs()));
  }
  for (int c = 0; c < basis.cols(); ++c) {
    dense::Matrix<T> d(n, n);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) d(p, q) = basis(p * n + q, c);
    out.push_back(std::move(d));
  }
  return out;
}

/// Frobenius-orthonormal basis of Der(n).
template <class T>
std::vector<Eigen::MatrixXd> derivation_space(const BasicBracket<T>& b) {
  require_lie(b);
  const int n = b.dim();
  Eigen::MatrixXd kernel;
  if constexpr (is_exact_v<T>) {
    auto exact = derivation_space_exact(b);
    Eigen::MatrixXd cols(n * n, static_cast<int>(exact.size()));
    for (std::size_t c = 0; c < exact.size(); ++c)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) cols(p * n + q, static_cast<int>(c)) = to_double(exact[c](p, q));
    if (cols.cols() > 0) {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(cols);
      kernel = qr.householderQ() * Eigen::MatrixXd::Identity(n * n, cols.cols());
    }
  } else {
    if (n == 1) {
      kernel = Eigen::MatrixXd::Identity(1, 1);
    } else {
      Eigen::MatrixXd sys = dense::to_eigen(leibniz_system(b));
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeFullV);
      const auto& s = svd.singularValues();
      double cut = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
      int r = 0;
      while (r < s.size() && s(r) > cut) ++r;
      kernel = svd.matrixV().rightCols(n * n - r);
    }
  }
  std::vector<Eigen::MatrixXd> out;
  for (int c = 0; c < kernel.cols(); ++c) {
    Eigen::MatrixXd d(n, n);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) d(p, q) = kernel(p * n + q, c);
    out.push_back(d);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weight matrices and the diagonal torus

/// Diagonal of F_ij^k: -1 at i, -1 at j, +1 at k.
inline std::vector<int> weight_vector(int n, const Triple& t) {
  std::vector<int> f(n, 0);
  f[t.i] -= 1;
  f[t.j] -= 1;
  f[t.k] += 1;
  return f;
}

struct Weight {
  std::vector<Rational> coeffs;  // alpha(D) = sum coeffs[j] * x_j in torus coordinates
  std::vector<int> indices;      // weight space
};

/// Der(n) cap Diag(n) in the fixed basis.
struct Torus {
  int n = 0;
  dense::Matrix<Rational> basis;  // n x r, column j = diagonal of the j-th basis derivation
  std::vector<int> coordinate_index;  // x_j equals the diagonal entry at this index
  std::vector<Weight> weights;

  int dim() const { return basis.cols(); }

  bool multiplicity_free() const {
    for (const auto& w : weights)
      if (w.indices.size() > 1) return false;
    return true;
  }

  /// Weight space index of each basis vector.
  std::vector<int> weight_of_index() const {
    std::vector<int> out(n, -1);
    for (std::size_t w = 0; w < weights.size(); ++w)
      for (int i : weights[w].indices) out[i] = static_cast<int>(w);
    return out;
  }

  template <class T>
  std::vector<T> diagonal(const std::vector<T>& coords) const {
    std::vector<T> d(n, T(0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < dim(); ++j)
        if (basis(i, j) != 0) {
          if constexpr (is_exact_v<T>) d[i] += basis(i, j) * coords[j];
          else d[i] += to_double(basis(i, j)) * coords[j];
        }
    return d;
  }

  Eigen::MatrixXd matrix(const std::vector<double>& coords) const {
    auto d = diagonal(coords);
    return Eigen::VectorXd::Map(d.data(), n).asDiagonal();
  }

  /// Torus coordinates of a diagonal, or nullopt when it is not in the torus.
  template <class T>
  std::optional<std::vector<T>> coordinates(const std::vector<T>& diag, double tol = 1e-9) const {
    std::vector<T> x(dim());
    for (int j = 0; j < dim(); ++j) x[j] = diag[coordinate_index[j]];
    auto back = diagonal(x);
    double scale = 1.0;
    for (const auto& v : diag) scale = std::max(scale, std::abs(to_double(v)));
    for (int i = 0; i < n; ++i) {
      if constexpr (is_exact_v<T>) {
        if (back[i] != diag[i]) return std::nullopt;
      } else if (std::abs(back[i] - diag[i]) > tol * scale) {
        return std::nullopt;
      }
    }
    return x;
  }
};

/// Null space of {F_ij^k : c_ij^k != 0} inside the diagonal matrices. The
/// elimination runs on reversed columns so that pivots land on the largest
/// indices and the free coordinates are the leading diagonal entries.
template <class T>
Torus diagonal_torus(const BasicBracket<T>& b) {
  const int n = b.dim();
  dense::Matrix<Rational> rows(0, 0);
  for (const auto& t : b.support()) {
    auto f = weight_vector(n, t);
    std::vector<Rational> r(n);
    for (int c = 0; c < n; ++c) r[c] = Rational(f[n - 1 - c]);
    rows.append_row(r);
  }
  Torus torus;
  torus.n = n;
  dense::Matrix<Rational> reversed;
  if (rows.rows() == 0) {
    reversed = dense::Matrix<Rational>::identity(n);
  } else {
    reversed = dense::null_space(rows, 0.0);
  }
  const int r = reversed.cols();
  // restore the original index order; columns become ordered by free index ascending
  torus.basis = dense::Matrix<Rational>(n, r);
  for (int c = 0; c < r; ++c)
    for (int i = 0; i < n; ++i) torus.basis(i, r - 1 - c) = reversed(n - 1 - i, c);
  for (int c = 0; c < r; ++c) {
    for (int i = 0; i < n; ++i) {
      bool unit = torus.basis(i, c) == 1;
      for (int c2 = 0; c2 < r && unit; ++c2)
        if (c2 != c && torus.basis(i, c2) != 0) unit = false;
      if (unit) {
        torus.coordinate_index.push_back(i);
        break;
      }
    }
  }
  if (static_cast<int>(torus.coordinate_index.size()) != r) throw NumericalError("torus basis is not in free-variable form", 1.0);

  std::map<std::vector<Rational>, int> seen;
  for (int i = 0; i < n; ++i) {
    auto row = torus.basis.row(i);
    auto it = seen.find(row);
    if (it == seen.end()) {
      seen.emplace(row, static_cast<int>(torus.weights.size()));
      torus.weights.push_back({row, {i}});
    } else {
      torus.weights[it->second].indices.push_back(i);
    }
  }
  return torus;
}

/// alpha_i(D) pairwise distinct over the weights.
inline bool is_generic(const std::vector<double>& diag, const Torus& t) {
  if (!t.coordinates(diag)) throw PreconditionError("derivation is not in the diagonal torus");
  double norm = 0.0;
  for (double v : diag) norm += v * v;
  norm = std::sqrt(norm);
  std::vector<double> values;
  for (const auto& w : t.weights) values.push_back(diag[w.indices.front()]);
  for (std::size_t a = 0; a < values.size(); ++a)
    for (std::size_t c = a + 1; c < values.size(); ++c)
      if (std::abs(values[a] - values[c]) <= 1e-9 * norm) return false;
  return true;
}

inline bool is_positive_derivation(const Eigen::MatrixXd& d) {
  if (d.rows() == 0) return false;
  Eigen::EigenSolver<Eigen::MatrixXd> es(d, false);
  for (int i = 0; i < d.rows(); ++i)
    if (!(es.eigenvalues()(i).real() > 1e-10)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Additive Jordan decomposition

struct JordanParts {
  Eigen::MatrixXd real_part;
  Eigen::MatrixXd imaginary_part;
  Eigen::MatrixXd nilpotent_part;
};

namespace detail {

using CMatrix = Eigen::MatrixXcd;

/// Centers of eigenvalue clusters (relative gap `gap`), closed under conjugation.
inline std::vector<std::complex<double>> eigen_clusters(const Eigen::MatrixXd& d, double gap) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(d, false);
  std::vector<std::complex<double>> ev(es.eigenvalues().data(), es.eigenvalues().data() + d.rows());
  double scale = std::max(1.0, d.norm());
  std::vector<std::vector<std::complex<double>>> groups;
  for (auto z : ev) {
    bool placed = false;
    for (auto& g : groups)
      if (std::abs(g.front() - z) <= gap * scale) {
        g.push_back(z);
        placed = true;
        break;
      }
    if (!placed) groups.push_back({z});
  }
  std::vector<std::complex<double>> centers;
  for (const auto& g : groups) {
    std::complex<double> s = 0;
    for (auto z : g) s += z;
    centers.push_back(s / static_cast<double>(g.size()));
  }
  // Snap near-real centers to the axis and pair conjugates.
  for (auto& c : centers)
    if (std::abs(c.imag()) <= gap * scale) c = {c.real(), 0.0};
  return centers;
}

inline CMatrix poly_eval(const CMatrix& s, const std::vector<std::complex<double>>& roots) {
  const auto n = s.rows();
  CMatrix p = CMatrix::Identity(n, n);
  for (auto r : roots) p = p * (s - r * CMatrix::Identity(n, n));
  return p;
}

inline CMatrix poly_derivative_eval(const CMatrix& s, const std::vector<std::complex<double>>& roots) {
  const auto n = s.rows();
  CMatrix total = CMatrix::Zero(n, n);
  for (std::size_t skip = 0; skip < roots.size(); ++skip) {
    CMatrix p = CMatrix::Identity(n, n);
    for (std::size_t r = 0; r < roots.size(); ++r)
      if (r != skip) p = p * (s - roots[r] * CMatrix::Identity(n, n));
    total += p;
  }
  return total;
}

}  // namespace detail

/// Semisimple part by Newton iteration S <- S - p(S) p'(S)^-1 on the
/// square-free polynomial of the clustered spectrum, then real and imaginary
/// parts from the spectral projectors of S.
inline JordanParts jordan_decompose(const Eigen::MatrixXd& d) {
  const auto n = d.rows();
  if (d.cols() != n) throw PreconditionError("Jordan decomposition needs a square matrix");
  JordanParts out;
  if (n == 0) return out;
  const double scale = std::max(1.0, d.norm());
  auto roots = detail::eigen_clusters(d, 1e-7);

  detail::CMatrix s = d.cast<std::complex<double>>();
  for (int iter = 0; iter < 100; ++iter) {
    detail::CMatrix p = detail::poly_eval(s, roots);
    if (p.norm() <= 1e-14 * std::pow(scale, static_cast<double>(roots.size()))) break;
    detail::CMatrix dp = detail::poly_derivative_eval(s, roots);
    Eigen::PartialPivLU<detail::CMatrix> lu(dp);
    detail::CMatrix step = lu.solve(p);
    s -= step;
    if (step.norm() <= 1e-15 * scale) break;
  }
  Eigen::MatrixXd semisimple = s.real();
  Eigen::MatrixXd nil = d - semisimple;

  // Spectral projectors of S via Lagrange interpolation on the cluster centers.
  detail::CMatrix sc = semisimple.cast<std::complex<double>>();
  detail::CMatrix re = detail::CMatrix::Zero(n, n);
  for (std::size_t c = 0; c < roots.size(); ++c) {
    detail::CMatrix proj = detail::CMatrix::Identity(n, n);
    for (std::size_t o = 0; o < roots.size(); ++o)
      if (o != c) proj = proj * (sc - roots[o] * detail::CMatrix::Identity(n, n)) / (roots[c] - roots[o]);
    re += roots[c].real() * proj;
  }
  out.real_part = re.real();
  out.imaginary_part = semisimple - out.real_part;
  out.nilpotent_part = nil;

  // invariants
  auto comm = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a * b - b * a).norm(); };
  double residual = std::max({comm(out.real_part, out.imaginary_part), comm(out.real_part, out.nilpotent_part),
                              comm(out.imaginary_part, out.nilpotent_part)});
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) power = power * out.nilpotent_part;
  residual = std::max(residual, power.norm());
  // D^R must have real spectrum and be diagonalizable: its minimal polynomial is square-free.
  if (residual > 1e-8 * std::pow(scale, static_cast<double>(n))) throw NumericalError("Jordan decomposition did not converge", residual);
  return out;
}

// ---------------------------------------------------------------------------
// Orthogonal Weyl group over signed permutations

/// g e_i = sign[i] * e_{perm[i]}.
struct SignedPermutation {
  std::vector<int> perm;
  std::vector<int> sign;

  Eigen::MatrixXd matrix() const {
    const int n = static_cast<int>(perm.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) m(perm[i], i) = sign[i];
    return m;
  }
};

struct WeylGroup {
  std::vector<SignedPermutation> representatives;  // one per induced torus action
  std::vector<dense::Matrix<Rational>> induced;     // r x r action on torus coordinates
  long long normalizer_order = 0;                   // signed-permutation automorphisms found
  long long centralizer_order = 0;                  // of which act trivially on the torus
};

inline constexpr int kWeylSearchBound = 8;

/// Torus coordinates of g diag(Bx) g^-1 as a linear map of x.
inline std::optional<dense::Matrix<Rational>> induced_torus_action(const std::vector<int>& perm, const Torus& t) {
  const int r = t.dim();
  dense::Matrix<Rational> m(r, r);
  for (int c = 0; c < r; ++c) {
    std::vector<Rational> moved(t.n);
    for (int i = 0; i < t.n; ++i) moved[perm[i]] = t.basis(i, c);
    auto x = t.coordinates(moved);
    if (!x) return std::nullopt;
    for (int row = 0; row < r; ++row) m(row, c) = (*x)[row];
  }
  return m;
}

template <class T>
WeylGroup orthogonal_weyl_group(const BasicBracket<T>& b, const Torus& t) {
  const int n = b.dim();
  if (n > kWeylSearchBound) throw PreconditionError("Weyl group search is bounded to dimension " + std::to_string(kWeylSearchBound));
  const double tol = is_exact_v<T> ? 0.0 : 1e-9 * std::max(1.0, b.max_abs());
  std::vector<int> perm(n, -1), sign(n, 1);
  std::vector<bool> used(n, false);
  WeylGroup group;
  std::map<std::vector<int>, std::optional<dense::Matrix<Rational>>> induced_cache;
  std::map<std::vector<Rational>, int> seen;

  // Automorphism condition on c: s_i s_j c_{pi pj}^{pk} = s_k c_ij^k.
  auto consistent = [&](int top) {
    for (int i = 0; i <= top; ++i)
      for (int j = 0; j <= top; ++j) {
        if (i == j) continue;
        for (int k = 0; k <= top; ++k) {
          if (i != top && j != top && k != top) continue;
          T lhs = b(perm[i], perm[j], perm[k]) * T(sign[i] * sign[j]);
          T rhs = b(i, j, k) * T(sign[k]);
          if (!is_zero(T(lhs - rhs), tol)) return false;
        }
      }
    return true;
  };

  auto leaf = [&]() {
    auto it = induced_cache.find(perm);
    if (it == induced_cache.end()) it = induced_cache.emplace(perm, induced_torus_action(perm, t)).first;
    if (!it->second) return;  // does not normalize the torus
    const long long weight = b.is_zero() ? (1LL << n) : 1;
    group.normalizer_order += weight;
    const auto& m = *it->second;
    bool trivial = m == dense::Matrix<Rational>::identity(t.dim());
    if (trivial) group.centralizer_order += weight;
    std::vector<Rational> key;
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) key.push_back(m(r, c));
    if (seen.emplace(key, static_cast<int>(group.induced.size())).second) {
      group.induced.push_back(m);
      group.representatives.push_back({perm, sign});
    }
  };

  auto search = [&](auto&& self, int i) -> void {
    if (i == n) {
      leaf();
      return;
    }
    if (b.is_zero()) {
      // every signed permutation is an automorphism; the signs do not move the torus
      for (int target = 0; target < n; ++target) {
        if (used[target]) continue;
        used[target] = true;
        perm[i] = target;
        self(self, i + 1);
        used[target] = false;
      }
      return;
    }
    for (int target = 0; target < n; ++target) {
      if (used[target]) continue;
      used[target] = true;
      perm[i] = target;
      for (int s : {1, -1}) {
        sign[i] = s;
        if (consistent(i)) self(self, i + 1);
      }
      used[target] = false;
      perm[i] = -1;
      sign[i] = 1;
    }
  };
  search(search, 0);
  return group;
}

}  // namespace rnlie
