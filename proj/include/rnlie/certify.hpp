#pragma once

// Certificates for strongly Ricci negative derivations (LP over moment
// points), direct metric search for Ricci negative ones, the trace/center
// obstruction and the constructive certificate for nonnegative D.

#include "rnlie/curvature.hpp"
#include "rnlie/derivations.hpp"
#include "rnlie/lp.hpp"
#include "rnlie/moment.hpp"
#include "rnlie/random.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace rnlie {

enum class CertMethod { NiceLP, SampledLP, Constructive };

inline std::string to_string(CertMethod m) {
  switch (m) {
    case CertMethod::NiceLP: return "nice-lp";
    case CertMethod::SampledLP: return "sampled-lp";
    case CertMethod::Constructive: return "constructive";
  }
  return "?";
}

/// D - sum_p b_p P_p has every diagonal entry >= margin > 0, with b_p >= 0.
template <class T>
struct SrnCertificate {
  CertMethod method = CertMethod::NiceLP;
  std::vector<T> derivation;             // diagonal of D
  std::vector<std::string> labels;       // "(i,j,k)" or "sample:s"
  std::vector<std::vector<T>> points;    // diagonal moment points P_p
  std::vector<T> coefficients;           // b_p
  std::vector<int> sample_index;         // for sampled certificates
  std::vector<T> remainder;              // D - sum b P
  T margin{0};
};

template <class T>
struct LpCertification {
  bool certified = false;
  T epsilon{0};            // optimal margin of the LP
  SrnCertificate<T> certificate;
  std::vector<T> dual;     // y >= 0, sum y = 1, y.P >= 0 for all points, eps* = y.D (refutation of this LP)
};

/// Certified threshold for the margin LP.
template <class T>
bool margin_accepts(const T& eps) {
  if constexpr (is_exact_v<T>) return eps > 0;
  else return eps > 1e-7;
}

/// max eps s.t. eps + sum_p b_p P_p,i <= D_i, b >= 0, with eps capped so the
/// LP stays bounded when there are no points.
template <class T>
LpCertification<T> margin_lp(const std::vector<T>& d, const std::vector<std::vector<T>>& points, const std::vector<std::string>& labels,
                             CertMethod method) {
  const int n = static_cast<int>(d.size());
  const int m = static_cast<int>(points.size());
  lp::Problem<T> p(m + 1);
  p.free[0] = true;
  p.objective[0] = T(1);
  T cap(1);
  for (const auto& v : d) cap += abs_value(v);
  for (int i = 0; i < n; ++i) {
    std::vector<T> row(m + 1, T(0));
    row[0] = T(1);
    for (int q = 0; q < m; ++q) row[q + 1] = points[q][i];
    p.add(row, lp::Relation::LessEq, d[i]);
  }
  std::vector<T> caprow(m + 1, T(0));
  caprow[0] = T(1);
  p.add(caprow, lp::Relation::LessEq, cap);
  auto res = lp::solve(p, 1e-12);
  if (res.status != lp::Status::Optimal) throw NumericalError("margin LP did not reach an optimum", 1.0);

  LpCertification<T> out;
  out.epsilon = res.x[0];
  out.dual.assign(res.dual.begin(), res.dual.begin() + n);
  auto& cert = out.certificate;
  cert.method = method;
  cert.derivation = d;
  cert.remainder = d;
  for (int q = 0; q < m; ++q) {
    T bq = res.x[q + 1];
    if constexpr (!is_exact_v<T>) {
      if (bq < 0) bq = 0;  // round-off below zero
    }
    if (bq == T(0)) continue;
    cert.labels.push_back(labels[q]);
    cert.points.push_back(points[q]);
    cert.coefficients.push_back(bq);
    for (int i = 0; i < n; ++i) cert.remainder[i] -= bq * points[q][i];
  }
  cert.margin = n > 0 ? *std::min_element(cert.remainder.begin(), cert.remainder.end()) : T(0);
  out.certified = margin_accepts(out.epsilon) && margin_accepts(cert.margin);
  return out;
}

template <class T>
T trace_of(const std::vector<T>& d) {
  T s(0);
  for (const auto& v : d) s += v;
  return s;
}

/// The margin LP over the weights F_ij^k, without preconditions.
template <class T, class B>
LpCertification<T> nice_lp(const std::vector<T>& d, const BasicBracket<B>& b) {
  std::vector<std::vector<T>> pts;
  std::vector<std::string> labels;
  for (const auto& t : b.support()) {
    auto f = weight_vector(b.dim(), t);
    pts.emplace_back(f.begin(), f.end());
    labels.push_back(to_string(t));
  }
  return margin_lp(d, pts, labels, CertMethod::NiceLP);
}

template <class T, class B>
void require_torus_element(const std::vector<T>& d, const BasicBracket<B>& b, const Torus& torus) {
  if (static_cast<int>(d.size()) != b.dim()) throw PreconditionError("derivation has wrong size");
  if (!torus.coordinates(d)) throw PreconditionError("derivation is not in the diagonal torus");
}

template <class T, class B>
LpCertification<T> certify_srn_nice(const std::vector<T>& d, const BasicBracket<B>& b) {
  require_lie(b);
  if (!nice_basis_check(b).nice) throw PreconditionError("nice-basis LP needs a nice basis");
  require_torus_element(d, b, diagonal_torus(b));
  if (!(trace_of(d) > T(0))) throw PreconditionError("derivation must have positive trace");
  return nice_lp(d, b);
}

inline LpCertification<double> certify_srn_sampled(const std::vector<double>& d, const Bracket& b, const OrbitSample& sample) {
  if (static_cast<int>(d.size()) != b.dim()) throw PreconditionError("derivation has wrong size");
  if (!(trace_of(d) > 0.0)) throw PreconditionError("derivation must have positive trace");
  if (sample.points.empty()) throw PreconditionError("empty orbit sample");
  Eigen::MatrixXd dm = Eigen::VectorXd::Map(d.data(), b.dim()).asDiagonal();
  double scale = std::max(1.0, dm.norm());
  for (const auto& p : sample.points) {
    Eigen::MatrixXd comm = p.g * dm - dm * p.g;
    if (comm.norm() > 1e-9 * scale * std::max(1.0, p.g.norm())) throw PreconditionError("orbit sample is not drawn from the centralizer of D");
  }
  auto pts = sample.diagonals();
  std::vector<std::string> labels;
  for (std::size_t s = 0; s < pts.size(); ++s) labels.push_back("sample:" + std::to_string(s));
  auto out = margin_lp(d, pts, labels, CertMethod::SampledLP);
  for (const auto& l : out.certificate.labels) out.certificate.sample_index.push_back(std::stoi(l.substr(7)));
  return out;
}

// ---------------------------------------------------------------------------
// Necessary condition

/// tr D > 0 and D restricted to the center has spectrum with positive real part.
inline bool necessary_condition(const Eigen::MatrixXd& d, const Bracket& b) {
  if (!(d.trace() > 1e-10)) return false;
  Eigen::MatrixXd q = center(b);
  if (q.cols() == 0) return true;
  Eigen::MatrixXd restricted = q.transpose() * d * q;
  Eigen::EigenSolver<Eigen::MatrixXd> es(restricted, false);
  for (int i = 0; i < restricted.rows(); ++i)
    if (!(es.eigenvalues()(i).real() > 1e-10)) return false;
  return true;
}

/// The obstruction for the algebra R D + n itself. D and -D span the same
/// extension, so it holds as soon as one orientation passes.
inline bool extension_necessary_condition(const Eigen::MatrixXd& d, const Bracket& b) {
  return necessary_condition(d, b) || necessary_condition(-d, b);
}

// ---------------------------------------------------------------------------
// Constructive certificate for D >= 0

template <class T, class B>
SrnCertificate<T> constructive_nonneg(const std::vector<T>& d, const BasicBracket<B>& b) {
  require_lie(b);
  const int n = b.dim();
  if (static_cast<int>(d.size()) != n) throw PreconditionError("derivation has wrong size");
  if (!nice_basis_check(b).nice) throw PreconditionError("constructive certificate needs a nice basis");
  require_torus_element(d, b, diagonal_torus(b));
  for (const auto& v : d)
    if (v < T(0)) throw PreconditionError("constructive certificate needs D >= 0");
  {
    std::vector<double> dd;
    for (const auto& v : d) dd.push_back(to_double(v));
    Eigen::MatrixXd dm = Eigen::VectorXd::Map(dd.data(), n).asDiagonal();
    Eigen::MatrixXd q = center(b);
    Eigen::MatrixXd rz = q.transpose() * dm * q;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (rz + rz.transpose()));
    if (rz.rows() > 0 && !(es.eigenvalues()(0) > 1e-10)) throw PreconditionError("D must be positive on the center");
  }
  std::vector<Triple> used;
  for (int i = 0; i < n; ++i) {
    if (d[i] != T(0)) continue;
    bool found = false;
    for (int j = 0; j < n && !found; ++j)
      for (int k = 0; k < n && !found; ++k) {
        if (j == i || b(i, j, k) == B(0)) continue;
        if (d[j] > T(0) && d[k] > T(0)) {
          used.push_back(i < j ? Triple{i, j, k} : Triple{j, i, k});
          found = true;
        }
      }
    if (!found)
      throw PreconditionError("no bracket from kernel index e" + std::to_string(i + 1) +
                              " into the positive part; the center is not inside the positive part");
  }
  std::vector<T> mvec(n, T(0));
  for (const auto& t : used) {
    auto f = weight_vector(n, t);
    for (int i = 0; i < n; ++i) mvec[i] += T(f[i]);
  }
  T eps(1);
  auto positive_at = [&](const T& e) {
    for (int i = 0; i < n; ++i)
      if (!(d[i] - e * mvec[i] > T(0))) return false;
    return true;
  };
  int halvings = 0;
  while (!positive_at(eps)) {
    eps /= 2;
    if (++halvings > 200) throw NumericalError("constructive line search failed", to_double(eps));
  }
  SrnCertificate<T> cert;
  cert.method = CertMethod::Constructive;
  cert.derivation = d;
  cert.remainder.resize(n);
  for (int i = 0; i < n; ++i) cert.remainder[i] = d[i] - eps * mvec[i];
  for (const auto& t : used) {
    auto f = weight_vector(n, t);
    cert.labels.push_back(to_string(t));
    cert.points.emplace_back(f.begin(), f.end());
    cert.coefficients.push_back(eps);
  }
  cert.margin = *std::min_element(cert.remainder.begin(), cert.remainder.end());
  return cert;
}

// ---------------------------------------------------------------------------
// Metric search

struct RnSearchResult {
  bool success = false;
  MetricParams params;
  double lambda_max = std::numeric_limits<double>::infinity();
  int evaluations = 0;
};

inline constexpr int kDefaultSearchBudget = 10000;
inline constexpr double kWitnessThreshold = -1e-6;

/// Basis of the Lie algebra the search moves h in: the centralizer of a
/// diagonal D (blocks of equal entries), or all of gl(n).
inline std::vector<std::pair<int, int>> search_generators(const Eigen::MatrixXd& d) {
  const auto n = static_cast<int>(d.rows());
  bool diagonal = (d - Eigen::MatrixXd(d.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  std::vector<std::pair<int, int>> gens;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!diagonal || std::abs(d(i, i) - d(j, j)) <= 1e-9 * scale) gens.emplace_back(i, j);
  return gens;
}

/// Warm start from an LP certificate over weights: a diagonal h whose bracket
/// constants satisfy c_a(h.mu)^2 = 2 tr(D) b_a (least squares in log scale).
inline std::optional<MetricParams> srn_hint(const std::vector<double>& d, const Bracket& b, const SrnCertificate<double>& cert) {
  const int n = b.dim();
  if (cert.method == CertMethod::SampledLP || b.is_zero()) return std::nullopt;
  double tr = trace_of(d);
  if (tr <= 0) return std::nullopt;
  auto support = b.support();
  const int m = static_cast<int>(support.size());
  double floor = std::max(1e-12, cert.margin / (30.0 * std::max(1, m)));
  Eigen::MatrixXd a(m, n);
  Eigen::VectorXd rhs(m);
  for (int r = 0; r < m; ++r) {
    const auto& t = support[r];
    auto f = weight_vector(n, t);
    for (int i = 0; i < n; ++i) a(r, i) = f[i];
    double coef = 0.0;
    for (std::size_t q = 0; q < cert.labels.size(); ++q)
      if (cert.labels[q] == to_string(t)) coef += cert.coefficients[q];
    double target = 2.0 * tr * std::max(coef, floor);
    rhs(r) = 0.5 * std::log(target) - std::log(std::abs(b(t.i, t.j, t.k)));
  }
  Eigen::VectorXd s = a.completeOrthogonalDecomposition().solve(rhs);
  if (!s.allFinite() || s.cwiseAbs().maxCoeff() > 30.0) return std::nullopt;
  MetricParams p = MetricParams::identity(n);
  p.h = s.array().exp().matrix().asDiagonal();
  return p;
}

/// Warm start from a sampled certificate: for the heaviest point drawn from
/// the full orbit (not a proper face), h = s g with s chosen so that
/// |h.mu|^2 / 4 = tr(D) b.
inline std::optional<MetricParams> srn_sampled_hint(const std::vector<double>& d, const Bracket& b, const SrnCertificate<double>& cert,
                                                    const OrbitSample& sample) {
  double tr = trace_of(d);
  if (cert.method != CertMethod::SampledLP || tr <= 0) return std::nullopt;
  int best = -1;
  double weight = 0.0;
  for (std::size_t q = 0; q < cert.sample_index.size(); ++q) {
    const auto& p = sample.points[cert.sample_index[q]];
    if (p.face == 0 && cert.coefficients[q] > weight) {
      weight = cert.coefficients[q];
      best = cert.sample_index[q];
    }
  }
  if (best < 0) return std::nullopt;
  const auto& g = sample.points[best].g;
  double norm2 = act(g, b).norm_squared();
  double s = std::sqrt(norm2 / (4.0 * tr * weight));
  MetricParams p = MetricParams::identity(b.dim());
  p.h = s * g;
  return p;
}

/// Restarted compass search over (X, A) with h = exp(A), c = 1, minimizing
/// lambda_max of the transported Ricci. Hints are evaluated first and the best
/// one becomes the starting point.
inline RnSearchResult search_rn_metric(const Eigen::MatrixXd& d, const Bracket& b, int budget, std::uint64_t seed,
                                       const std::vector<MetricParams>& hints = {}) {
  const int n = b.dim();
  if (d.rows() != n || d.cols() != n) throw PreconditionError("derivation has wrong size");
  require_derivation(d, b);
  const bool nilpotent = is_nilpotent(b);
  auto gens = search_generators(d);
  const int dim = n + static_cast<int>(gens.size());
  RnSearchResult best;

  auto params_of = [&](const Eigen::VectorXd& th) {
    MetricParams p = MetricParams::identity(n);
    p.X = th.head(n);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t g = 0; g < gens.size(); ++g) a(gens[g].first, gens[g].second) = th(n + static_cast<int>(g));
    p.h = a.exp();
    return p;
  };
  auto evaluate = [&](const MetricParams& p) {
    ++best.evaluations;
    try {
      double lm = ricci_spectrum(transported_ricci(d, b, p, nilpotent, false)).lambda_max;
      if (!std::isfinite(lm)) return std::numeric_limits<double>::infinity();
      if (lm < best.lambda_max) {
        best.lambda_max = lm;
        best.params = p;
      }
      return lm;
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  auto done = [&] { return best.lambda_max < kWitnessThreshold || best.evaluations >= budget; };

  Eigen::VectorXd start = Eigen::VectorXd::Zero(dim);
  double fstart = evaluate(params_of(start));
  for (const auto& h : hints) {
    if (done()) break;
    double f = evaluate(h);
    // diagonal positive hints can seed the search coordinates
    bool diag_pos = (h.h - Eigen::MatrixXd(h.h.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0 && (h.h.diagonal().array() > 0).all() &&
                    h.c == 1.0;
    if (f < fstart && diag_pos) {
      Eigen::VectorXd th = Eigen::VectorXd::Zero(dim);
      th.head(n) = h.X;
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) {
        auto it = std::find(gens.begin(), gens.end(), std::make_pair(i, i));
        if (it == gens.end()) ok = false;
        else th(n + static_cast<int>(it - gens.begin())) = std::log(h.h(i, i));
      }
      if (ok) {
        start = th;
        fstart = f;
      }
    }
  }

  CounterRng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd x = start;
  double fx = fstart;
  double step = 0.5;
  while (!done()) {
    // directions: coordinate axes plus a fresh random orthonormal frame
    Eigen::MatrixXd dirs(dim, 2 * dim);
    dirs.leftCols(dim) = Eigen::MatrixXd::Identity(dim, dim);
    Eigen::MatrixXd g(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) g(r, c) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    dirs.rightCols(dim) = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
    bool improved = false;
    for (int k = 0; k < dirs.cols() && !done(); ++k)
      for (double sgn : {1.0, -1.0}) {
        Eigen::VectorXd cand = x + sgn * step * dirs.col(k);
        double fc = evaluate(params_of(cand));
        if (fc < fx) {
          x = cand;
          fx = fc;
          improved = true;
          break;
        }
        if (done()) break;
      }
    if (improved) {
      step = std::min(2.0, step * 1.5);
    } else {
      step *= 0.5;
      if (step < 1e-5) {
        // restart near the best point found so far
        Eigen::VectorXd pert(dim);
        for (int i = 0; i < dim; ++i) pert(i) = 0.5 * gauss(rng);
        x = start + pert;
        fx = evaluate(params_of(x));
        step = 0.5;
      }
    }
  }
  best.success = best.lambda_max < kWitnessThreshold;
  return best;
}

}  // namespace rnlie
