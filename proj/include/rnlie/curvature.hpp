#pragma once

// Ricci operators of nilpotent metric Lie algebras and of their rank-one
// extensions s_D = R f + n, together with a Koszul-formula oracle.

#include "rnlie/bracket.hpp"
#include "rnlie/derivations.hpp"

#include <Eigen/Dense>

#include <vector>

namespace rnlie {

/// Ric of (n, mu) with the fixed basis orthonormal:
/// <Ric x, y> = -1/2 sum <[x,e_i],e_j><[y,e_i],e_j> + 1/4 sum <[e_i,e_j],x><[e_i,e_j],y>.
/// Only valid for nilpotent brackets (it drops the Killing-form and mean
/// curvature terms); use koszul_oracle for anything else.
inline Eigen::MatrixXd ricci_nilpotent(const Bracket& b) {
  const int n = b.dim();
  StructureTensor c(b);
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int d = a; d < n; ++d) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += -0.5 * c.at(a, i, j) * c.at(d, i, j) + 0.25 * c.at(i, j, a) * c.at(i, j, d);
      ric(a, d) = ric(d, a) = s;
    }
  return ric;
}

/// s_D on R^{n+1}: index 0 is f, [f, e_j] = D e_j, and b shifted by one.
inline Bracket extension_bracket(const Eigen::MatrixXd& d, const Bracket& b) {
  const int n = b.dim();
  std::vector<Bracket::Entry> entries;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (d(k, j) != 0.0) entries.push_back({0, j + 1, k + 1, d(k, j)});
  for (const auto& [t, v] : b.constants()) entries.push_back({t.i + 1, t.j + 1, t.k + 1, v});
  return Bracket(n + 1, entries);
}

// ---------------------------------------------------------------------------
// Koszul oracle

struct CurvatureData {
  int n = 0;
  std::vector<Eigen::MatrixXd> connection;  // connection[i](k, j) = <nabla_{e_i} e_j, e_k>
  std::vector<Eigen::MatrixXd> riemann;     // riemann[a*n+b] = R(e_a, e_b) as a matrix
  Eigen::MatrixXd sectional;                // K(e_a, e_b), zero on the diagonal
  Eigen::MatrixXd ricci;
  double scalar = 0.0;

  const Eigen::MatrixXd& R(int a, int b) const { return riemann[static_cast<std::size_t>(a) * n + b]; }
};

/// Levi-Civita data of the left-invariant metric making the basis orthonormal:
/// <nabla_{e_i} e_j, e_k> = 1/2 (c_ij^k - c_jk^i + c_ki^j),
/// R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y].
inline CurvatureData koszul_oracle(const Bracket& b) {
  const int n = b.dim();
  StructureTensor c(b);
  CurvatureData out;
  out.n = n;
  out.connection.assign(n, Eigen::MatrixXd::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out.connection[i](k, j) = 0.5 * (c.at(i, j, k) - c.at(j, k, i) + c.at(k, i, j));
  out.riemann.assign(static_cast<std::size_t>(n) * n, Eigen::MatrixXd::Zero(n, n));
  for (int a = 0; a < n; ++a)
    for (int d = 0; d < n; ++d) {
      Eigen::MatrixXd r = out.connection[a] * out.connection[d] - out.connection[d] * out.connection[a];
      for (int k = 0; k < n; ++k)
        if (c.at(a, d, k) != 0.0) r -= c.at(a, d, k) * out.connection[k];
      out.riemann[static_cast<std::size_t>(a) * n + d] = r;
    }
  out.sectional = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int d = 0; d < n; ++d)
      if (a != d) out.sectional(a, d) = out.R(a, d)(a, d);  // <R(e_a,e_b)e_b, e_a>
  out.ricci = Eigen::MatrixXd::Zero(n, n);
  for (int y = 0; y < n; ++y)
    for (int z = 0; z < n; ++z) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += out.R(i, y)(i, z);  // <R(e_i,Y)Z, e_i>
      out.ricci(y, z) = s;
    }
  out.ricci = 0.5 * (out.ricci + out.ricci.transpose());
  out.scalar = out.ricci.trace();
  return out;
}

// ---------------------------------------------------------------------------
// Ricci of rank-one extensions

/// Encodes the block matrix [[c^-1, 0], [X, h]] acting on R f + n.
struct MetricParams {
  double c = 1.0;
  Eigen::VectorXd X;
  Eigen::MatrixXd h;

  static MetricParams identity(int n) { return {1.0, Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n)}; }

  Eigen::MatrixXd block_matrix() const {
    const auto n = h.rows();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
    m(0, 0) = 1.0 / c;
    m.block(1, 0, n, 1) = X;
    m.block(1, 1, n, n) = h;
    return m;
  }

  void validate(int n) const {
    if (c == 0.0) throw PreconditionError("metric parameter c must be nonzero");
    if (X.size() != n || h.rows() != n || h.cols() != n) throw PreconditionError("metric parameters have wrong size");
    if (std::abs(h.determinant()) < 1e-12) throw PreconditionError("metric parameter h is singular");
  }
};

struct RicciBlock {
  double ff = 0.0;
  Eigen::VectorXd fn_row;
  Eigen::MatrixXd nn;
  Eigen::VectorXd star;  // (f, n) block of the Koszul oracle on s_D
  Eigen::MatrixXd assembled;
  double oracle_delta = 0.0;  // max entrywise |assembled - oracle|
};

/// ff = -tr S(D)^2, fn_i = -tr(S(D) ad e_i), nn = Ric_mu + [D, D^t]/2 - tr(D) S(D),
/// where S(D) is the symmetric part of D.
inline RicciBlock ricci_extension(const Eigen::MatrixXd& d, const Bracket& b) {
  require_derivation(d, b);
  if (!is_nilpotent(b)) throw PreconditionError("the block Ricci formula needs a nilpotent algebra");
  const int n = b.dim();
  StructureTensor c(b);
  Eigen::MatrixXd s = 0.5 * (d + d.transpose());
  RicciBlock out;
  out.ff = -(s * s).trace();
  out.fn_row = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) out.fn_row(i) = -(s * c.ad(i)).trace();
  out.nn = ricci_nilpotent(b) + 0.5 * (d * d.transpose() - d.transpose() * d) - d.trace() * s;
  out.assembled = Eigen::MatrixXd::Zero(n + 1, n + 1);
  out.assembled(0, 0) = out.ff;
  out.assembled.block(0, 1, 1, n) = out.fn_row.transpose();
  out.assembled.block(1, 0, n, 1) = out.fn_row;
  out.assembled.block(1, 1, n, n) = out.nn;

  Eigen::MatrixXd oracle = koszul_oracle(extension_bracket(d, b)).ricci;
  out.star = oracle.block(1, 0, n, 1);
  out.oracle_delta = (out.assembled - oracle).cwiseAbs().maxCoeff();
  return out;
}

/// (c h (D - ad(h^-1 X)) h^-1, h.mu).
inline std::pair<Eigen::MatrixXd, Bracket> transport_metric(const MetricParams& p, const Eigen::MatrixXd& d, const Bracket& b,
                                                            bool check = true) {
  const int n = b.dim();
  p.validate(n);
  if (check) require_derivation(d, b);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(p.h);
  Eigen::MatrixXd hinv = lu.inverse();
  Eigen::VectorXd y = hinv * p.X;
  Eigen::MatrixXd nd = p.c * p.h * (d - ad_matrix(b, y)) * hinv;
  return {nd, act(p.h, b)};
}

struct NegativityReport {
  bool negative = false;
  double lambda_max = 0.0;
  Eigen::VectorXd eigenvalues;
};

inline NegativityReport ricci_spectrum(const Eigen::MatrixXd& ric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (ric + ric.transpose()), Eigen::EigenvaluesOnly);
  NegativityReport r;
  r.eigenvalues = es.eigenvalues();
  r.lambda_max = r.eigenvalues(r.eigenvalues.size() - 1);
  r.negative = r.lambda_max < -1e-9;
  return r;
}

/// Assembled block Ricci of s_D; n must be nilpotent.
inline Eigen::MatrixXd assembled_ricci(const Eigen::MatrixXd& d, const Bracket& b) {
  const int n = b.dim();
  StructureTensor c(b);
  Eigen::MatrixXd s = 0.5 * (d + d.transpose());
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n + 1, n + 1);
  ric(0, 0) = -(s * s).trace();
  for (int i = 0; i < n; ++i) ric(0, i + 1) = ric(i + 1, 0) = -(s * c.ad(i)).trace();
  ric.block(1, 1, n, n) = ricci_nilpotent(b) + 0.5 * (d * d.transpose() - d.transpose() * d) - d.trace() * s;
  return ric;
}

/// Ricci of s_D under the metric encoded by p, computed on the transported
/// pair. Non-nilpotent n falls back to the Koszul oracle on the extension.
inline Eigen::MatrixXd transported_ricci(const Eigen::MatrixXd& d, const Bracket& b, const MetricParams& p, bool nilpotent = true,
                                         bool check = true) {
  auto [nd, nb] = transport_metric(p, d, b, check);
  if (nilpotent) return assembled_ricci(nd, nb);
  return koszul_oracle(extension_bracket(nd, nb)).ricci;
}

inline NegativityReport is_ricci_negative(const Eigen::MatrixXd& d, const Bracket& b, const MetricParams& p) {
  return ricci_spectrum(transported_ricci(d, b, p, is_nilpotent(b)));
}

}  // namespace rnlie
