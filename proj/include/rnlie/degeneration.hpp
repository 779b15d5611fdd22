#pragma once

// Degenerations mu -> lambda along explicit curves t -> h_t, the Heintze
// curve of rank-one extensions, and transfer of strict curvature conditions
// from a limit back to the source.

#include "rnlie/bracket.hpp"
#include "rnlie/curvature.hpp"
#include "rnlie/derivations.hpp"
#include "rnlie/lp.hpp"
#include "rnlie/parallel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rnlie {

/// t -> h_t with h_t = diag(t^e), diag(exp(t e)) or a user matrix function.
struct DegenerationCurve {
  enum class Kind { Power, Exponential, Matrix };

  Kind kind = Kind::Power;
  Bracket source;
  std::vector<double> exponents;  // diagonal curves
  std::function<Eigen::MatrixXd(double)> matrix;
  std::string label;

  static DegenerationCurve power(Bracket b, std::vector<double> e, std::string label = "") {
    if (static_cast<int>(e.size()) != b.dim()) throw PreconditionError("exponent vector has wrong size");
    return {Kind::Power, std::move(b), std::move(e), {}, std::move(label)};
  }
  static DegenerationCurve exponential(Bracket b, std::vector<double> e, std::string label = "") {
    if (static_cast<int>(e.size()) != b.dim()) throw PreconditionError("exponent vector has wrong size");
    return {Kind::Exponential, std::move(b), std::move(e), {}, std::move(label)};
  }
  static DegenerationCurve general(Bracket b, std::function<Eigen::MatrixXd(double)> f, std::string label = "") {
    return {Kind::Matrix, std::move(b), {}, std::move(f), std::move(label)};
  }

  bool diagonal() const { return kind != Kind::Matrix; }

  Eigen::MatrixXd h(double t) const {
    const int n = source.dim();
    if (kind == Kind::Matrix) {
      Eigen::MatrixXd m = matrix(t);
      if (m.rows() != n || m.cols() != n) throw PreconditionError("curve matrix has wrong size");
      return m;
    }
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = kind == Kind::Power ? std::pow(t, exponents[i]) : std::exp(t * exponents[i]);
    return d.asDiagonal();
  }

  Bracket at(double t) const {
    if (kind == Kind::Matrix) return act(h(t), source);
    Eigen::VectorXd d = h(t).diagonal();
    return act_diagonal(std::vector<double>(d.data(), d.data() + source.dim()), source);
  }
};

inline constexpr int kMaxDoublings = 20;
inline constexpr double kCauchyTol = 1e-10;

/// Exponent of the factor h_k / (h_i h_j) along a diagonal curve.
inline double scaling_exponent(const std::vector<double>& e, const Triple& t) { return e[t.k] - e[t.i] - e[t.j]; }

/// Limit of a diagonal curve: constants with negative exponent vanish, zero
/// exponents survive, positive exponents diverge.
template <class T>
BasicBracket<T> diagonal_limit(const BasicBracket<T>& b, const std::vector<double>& e) {
  std::vector<typename BasicBracket<T>::Entry> kept;
  for (const auto& [t, c] : b.constants()) {
    double s = scaling_exponent(e, t);
    if (s > 1e-12) throw NumericalError("curve diverges on constant " + to_string(t), s);
    if (s >= -1e-12) kept.push_back({t.i, t.j, t.k, c});
  }
  return BasicBracket<T>(b.dim(), kept);
}

/// Entrywise limit of act(h_t, source). Diagonal curves use the closed form;
/// matrix curves sample t = 2^k up to t_max and need successive samples to
/// agree within tol.
inline Bracket limit_bracket(const DegenerationCurve& curve, double t_max = std::ldexp(1.0, kMaxDoublings), double tol = kCauchyTol) {
  Bracket lim(curve.source.dim());
  if (curve.diagonal()) {
    lim = diagonal_limit(curve.source, curve.exponents);
  } else {
    Bracket prev = curve.at(1.0);
    bool converged = false;
    double diff = 0.0;
    for (double t = 2.0; t <= t_max; t *= 2.0) {
      Bracket cur = curve.at(t);
      diff = 0.0;
      auto support = prev.support();
      for (const auto& x : cur.support()) support.push_back(x);
      for (const auto& x : support) diff = std::max(diff, std::abs(cur(x.i, x.j, x.k) - prev(x.i, x.j, x.k)));
      prev = cur;
      if (diff <= tol) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NumericalError("curve samples are not Cauchy at t_max", diff);
    lim = prev.pruned(std::max(tol, 1e-12));
  }
  if (!is_lie(lim)) throw NumericalError("limit bracket violates the Jacobi identity", validate_jacobi(lim));
  return lim;
}

/// mu_t on R f + n: ad f acts as t D, n keeps b.
inline Bracket heintze_curve(const Eigen::MatrixXd& d, const Bracket& b, double t) {
  require_derivation(d, b);
  return extension_bracket(t * d, b);
}

/// diag(1, t, ..., t) on s_D: the n-part of the bracket scales as 1/t and the
/// limit is the extension of the abelian algebra by D.
inline DegenerationCurve heintze_degeneration(const Eigen::MatrixXd& d, const Bracket& b) {
  std::vector<double> e(b.dim() + 1, 1.0);
  e[0] = 0.0;
  return DegenerationCurve::power(heintze_curve(d, b, 1.0), e, "heintze");
}

/// Diagonal power curve whose limit keeps exactly the constants on `face`:
/// exponents with e.F = 0 on the face and e.F <= -delta elsewhere, maximizing
/// delta over |e_i| <= 1.
inline DegenerationCurve face_curve(const Bracket& b, const std::vector<Triple>& face) {
  const int n = b.dim();
  auto support = b.support();
  lp::Problem<Rational> p(n + 1);
  for (int i = 0; i < n; ++i) p.free[i] = true;
  p.objective[n] = Rational(1);
  for (const auto& t : support) {
    auto f = weight_vector(n, t);
    std::vector<Rational> row(n + 1, Rational(0));
    for (int i = 0; i < n; ++i) row[i] = Rational(f[i]);
    bool on = std::find(face.begin(), face.end(), t) != face.end();
    if (on) {
      p.add(row, lp::Relation::Equal, Rational(0));
    } else {
      row[n] = Rational(1);
      p.add(row, lp::Relation::LessEq, Rational(0));
    }
  }
  for (int i = 0; i < n; ++i)
    for (int s : {1, -1}) {
      std::vector<Rational> row(n + 1, Rational(0));
      row[i] = Rational(s);
      p.add(row, lp::Relation::LessEq, Rational(1));
    }
  std::vector<Rational> cap(n + 1, Rational(0));
  cap[n] = Rational(1);
  p.add(cap, lp::Relation::LessEq, Rational(1));
  auto res = lp::solve(p);
  if (res.status != lp::Status::Optimal || !(res.x[n] > 0)) throw PreconditionError("triples do not form a face of the weight polytope");
  std::vector<double> e;
  for (int i = 0; i < n; ++i) e.push_back(to_double(res.x[i]));
  return DegenerationCurve::power(b, e, "face");
}

// ---------------------------------------------------------------------------
// Curvature along curves

enum class Predicate { RicciNegative, ScalarNegative };

inline std::string to_string(Predicate p) { return p == Predicate::RicciNegative ? "ricci-negative" : "scalar-negative"; }

struct CurvatureSample {
  double t = 1.0;
  double norm = 0.0;  // |mu_t|
  double lambda_max = 0.0;
  double scalar = 0.0;
};

/// Curvature of the metric making the fixed basis orthonormal.
inline CurvatureSample curvature_at(const Bracket& b, double t = 1.0) {
  auto data = koszul_oracle(b);
  CurvatureSample s;
  s.t = t;
  s.norm = std::sqrt(b.norm_squared());
  s.lambda_max = ricci_spectrum(data.ricci).lambda_max;
  s.scalar = data.scalar;
  return s;
}

inline constexpr double kStrictTol = 1e-9;

inline bool holds(Predicate p, const CurvatureSample& s) {
  return p == Predicate::RicciNegative ? s.lambda_max < -kStrictTol : s.scalar < -kStrictTol;
}

/// Samples t = 2^k for k = 0..K with 2^K <= t_max.
inline std::vector<CurvatureSample> trajectory(const DegenerationCurve& curve, double t_max = std::ldexp(1.0, kMaxDoublings), int jobs = 1) {
  std::vector<double> ts;
  for (double t = 1.0; t <= t_max; t *= 2.0) ts.push_back(t);
  return parallel_map(ts.size(), jobs, [&](std::size_t k) { return curvature_at(curve.at(ts[k]), ts[k]); });
}

struct PinchingResult {
  bool found = false;
  int k = -1;              // t = 2^k
  double t = 0.0;
  Bracket limit;
  CurvatureSample at_limit;
  CurvatureSample witness;  // curvature of act(h_t, source) with the fixed inner product
  Eigen::MatrixXd h;        // pulling the fixed inner product back by h gives the metric on the source
};

/// Smallest k with the predicate at act(h_{2^k}, source). The predicate must
/// hold strictly at the limit; a missing k below t_max is reported, not thrown.
inline PinchingResult pinching_transfer(const DegenerationCurve& curve, Predicate pred, double t_max = std::ldexp(1.0, kMaxDoublings)) {
  PinchingResult r;
  r.limit = limit_bracket(curve, t_max);
  r.at_limit = curvature_at(r.limit);
  if (!holds(pred, r.at_limit)) throw PreconditionError("predicate " + to_string(pred) + " fails at the limit bracket");
  int k = 0;
  for (double t = 1.0; t <= t_max; t *= 2.0, ++k) {
    auto s = curvature_at(curve.at(t), t);
    if (holds(pred, s)) {
      r.found = true;
      r.k = k;
      r.t = t;
      r.witness = s;
      r.h = curve.h(t);
      return r;
    }
  }
  return r;
}

}  // namespace rnlie
