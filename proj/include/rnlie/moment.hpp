#pragma once

// Moment map m(mu), weight polytopes CH_mu, nice bases, orbit sampling and
// the diagonal-image checks.

#include "rnlie/bracket.hpp"
#include "rnlie/curvature.hpp"
#include "rnlie/derivations.hpp"
#include "rnlie/parallel.hpp"
#include "rnlie/polytope.hpp"
#include "rnlie/random.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace rnlie {

using MomentValue = Eigen::MatrixXd;

/// <m(mu), E> = <E.mu, mu> / |mu|^2 with E.mu = E mu - mu(E., .) - mu(., E.),
/// evaluated on an orthonormal basis of symmetric matrices.
inline MomentValue moment_map(const Bracket& b) {
  if (b.is_zero()) throw PreconditionError("moment map is undefined at the zero bracket");
  const int n = b.dim();
  StructureTensor c(b);
  const double norm2 = b.norm_squared();
  MomentValue m = MomentValue::Zero(n, n);
  auto pairing = [&](const Eigen::MatrixXd& e) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double cijk = c.at(i, j, k);
          if (cijk == 0.0) continue;
          double v = 0.0;
          for (int l = 0; l < n; ++l) v += e(k, l) * c.at(i, j, l) - e(l, i) * c.at(l, j, k) - e(l, j) * c.at(i, l, k);
          s += v * cijk;
        }
    return s / norm2;
  };
  const double r2 = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < n; ++a)
    for (int d = a; d < n; ++d) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
      if (a == d) {
        e(a, a) = 1.0;
      } else {
        e(a, d) = e(d, a) = r2;
      }
      double p = pairing(e);
      m += p * e;
    }
  return m;
}

/// Same value through the nilpotent Ricci operator: m = 4 Ric / |mu|^2.
inline MomentValue moment_map_ricci(const Bracket& b) {
  if (b.is_zero()) throw PreconditionError("moment map is undefined at the zero bracket");
  return ricci_nilpotent(b) * (4.0 / b.norm_squared());
}

inline Eigen::MatrixXd weight_matrix(int n, const Triple& t) {
  auto f = weight_vector(n, t);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = f[i];
  return m;
}

// ---------------------------------------------------------------------------
// Weight polytope

struct WeightPolytope {
  int n = 0;
  std::vector<poly::Point> points;             // distinct diagonals of F_ij^k
  std::vector<std::vector<Triple>> triples;    // support triples producing each point
  poly::FaceLattice lattice;

  std::vector<std::vector<double>> points_double() const {
    std::vector<std::vector<double>> out;
    for (const auto& p : points) {
      std::vector<double> v;
      for (const auto& x : p) v.push_back(to_double(x));
      out.push_back(v);
    }
    return out;
  }
};

inline constexpr int kHullBound = 8;

template <class T>
WeightPolytope weight_polytope(const BasicBracket<T>& b) {
  if (b.is_zero()) throw PreconditionError("weight polytope of the zero bracket is empty");
  const int n = b.dim();
  WeightPolytope wp;
  wp.n = n;
  std::map<poly::Point, int> index;
  for (const auto& t : b.support()) {
    auto f = weight_vector(n, t);
    poly::Point p(f.begin(), f.end());
    auto [it, inserted] = index.emplace(p, static_cast<int>(wp.points.size()));
    if (inserted) {
      wp.points.push_back(p);
      wp.triples.push_back({});
    }
    wp.triples[it->second].push_back(t);
  }
  if (poly::affine_dim(wp.points) > kHullBound) throw PreconditionError("weight polytope dimension exceeds the hull bound");
  wp.lattice = poly::hull_faces(wp.points);
  return wp;
}

// ---------------------------------------------------------------------------
// Nice bases

struct NiceViolation {
  enum Kind { MultipleTargets, OverlappingPairs } kind;
  Triple first;   // for MultipleTargets: (i, j, k1)
  Triple second;  // for MultipleTargets: (i, j, k2); otherwise the second pair hitting the same k
};

struct NiceReport {
  bool nice = true;
  std::vector<NiceViolation> violations;
};

inline std::string describe(const NiceViolation& v) {
  auto pair = [](const Triple& t) { return "(" + std::to_string(t.i + 1) + "," + std::to_string(t.j + 1) + ")"; };
  if (v.kind == NiceViolation::MultipleTargets)
    return pair(v.first) + " hits e" + std::to_string(v.first.k + 1) + " and e" + std::to_string(v.second.k + 1);
  return pair(v.first) + " and " + pair(v.second) + " both hit e" + std::to_string(v.first.k + 1) + " and overlap";
}

template <class T>
NiceReport nice_basis_check(const BasicBracket<T>& b) {
  NiceReport r;
  std::map<std::pair<int, int>, std::vector<Triple>> by_pair;
  std::map<int, std::vector<Triple>> by_target;
  for (const auto& t : b.support()) {
    by_pair[{t.i, t.j}].push_back(t);
    by_target[t.k].push_back(t);
  }
  for (const auto& [p, ts] : by_pair)
    for (std::size_t a = 1; a < ts.size(); ++a) r.violations.push_back({NiceViolation::MultipleTargets, ts[0], ts[a]});
  for (const auto& [k, ts] : by_target)
    for (std::size_t a = 0; a < ts.size(); ++a)
      for (std::size_t c = a + 1; c < ts.size(); ++c) {
        bool disjoint = ts[a].i != ts[c].i && ts[a].i != ts[c].j && ts[a].j != ts[c].i && ts[a].j != ts[c].j;
        if (!disjoint) r.violations.push_back({NiceViolation::OverlappingPairs, ts[a], ts[c]});
      }
  r.nice = r.violations.empty();
  return r;
}

// ---------------------------------------------------------------------------
// Faces of CH_mu and their degenerations lambda_J

template <class T>
struct ClosureFace {
  poly::Face face;
  std::vector<Triple> triples;
  BasicBracket<T> lambda;
};

/// One lambda_J per face of CH_mu (constants restricted to the triples whose
/// weights lie on the face), largest faces first.
template <class T>
std::vector<ClosureFace<T>> closure_faces(const BasicBracket<T>& b) {
  auto wp = weight_polytope(b);
  std::vector<ClosureFace<T>> out;
  for (auto it = wp.lattice.faces.rbegin(); it != wp.lattice.faces.rend(); ++it) {
    ClosureFace<T> cf{*it, {}, BasicBracket<T>(b.dim())};
    for (int p : it->points)
      for (const auto& t : wp.triples[p]) cf.triples.push_back(t);
    std::sort(cf.triples.begin(), cf.triples.end());
    cf.lambda = b.restricted(cf.triples);
    out.push_back(std::move(cf));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Orbit sampling

enum class GroupTag { DiagPositive, TorusCentralizer, DerivationCentralizer };

inline std::string to_string(GroupTag t) {
  switch (t) {
    case GroupTag::DiagPositive: return "diag";
    case GroupTag::TorusCentralizer: return "torus";
    case GroupTag::DerivationCentralizer: return "derivation";
  }
  return "?";
}

struct OrbitPoint {
  Eigen::MatrixXd g;   // group element applied to the face bracket
  int face = 0;        // index into closure_faces
  Bracket acted;
  MomentValue moment;
  std::vector<double> hull_coords;  // c_a^2 / sum c^2 over the support triples of the input
  double offdiag = 0.0;
};

struct OrbitSample {
  GroupTag tag = GroupTag::DiagPositive;
  std::uint64_t seed = 0;
  std::vector<Triple> triples;            // labels of hull_coords
  std::vector<std::vector<int>> blocks;   // block structure of the group
  std::vector<OrbitPoint> points;

  std::vector<std::vector<double>> diagonals() const {
    std::vector<std::vector<double>> out;
    for (const auto& p : points) {
      std::vector<double> d(p.moment.rows());
      for (int i = 0; i < p.moment.rows(); ++i) d[i] = p.moment(i, i);
      out.push_back(d);
    }
    return out;
  }
};

/// Groups of indices forming the diagonal blocks of the sampled group.
inline std::vector<std::vector<int>> group_blocks(GroupTag tag, const Torus& t, const std::optional<std::vector<double>>& d) {
  std::vector<std::vector<int>> blocks;
  switch (tag) {
    case GroupTag::DiagPositive:
      for (int i = 0; i < t.n; ++i) blocks.push_back({i});
      break;
    case GroupTag::TorusCentralizer:
      for (const auto& w : t.weights) blocks.push_back(w.indices);
      break;
    case GroupTag::DerivationCentralizer: {
      if (!d || static_cast<int>(d->size()) != t.n) throw PreconditionError("derivation centralizer needs a diagonal derivation");
      double scale = 1.0;
      for (double v : *d) scale = std::max(scale, std::abs(v));
      std::vector<bool> done(t.n, false);
      for (int i = 0; i < t.n; ++i) {
        if (done[i]) continue;
        std::vector<int> blk;
        for (int j = i; j < t.n; ++j)
          if (!done[j] && std::abs((*d)[j] - (*d)[i]) <= 1e-9 * scale) {
            blk.push_back(j);
            done[j] = true;
          }
        blocks.push_back(blk);
      }
      break;
    }
  }
  return blocks;
}

inline double offdiag_norm(const Eigen::MatrixXd& m) {
  double s = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (i != j) s = std::max(s, std::abs(m(i, j)));
  return s;
}

namespace detail {

inline Eigen::MatrixXd random_block_element(const std::vector<std::vector<int>>& blocks, int n, CounterRng& rng) {
  std::uniform_real_distribution<double> logu(-6.0, 6.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (const auto& blk : blocks) {
    const int s = static_cast<int>(blk.size());
    while (true) {
      Eigen::MatrixXd a(s, s);
      for (int r = 0; r < s; ++r)
        for (int c = 0; c < s; ++c) a(r, c) = r == c ? std::exp(logu(rng)) : gauss(rng);
      if (s > 1) {
        double det = a.determinant();
        double vol = 1.0;
        for (int c = 0; c < s; ++c) vol *= a.col(c).norm();
        if (std::abs(det) < 1e-6 * vol) continue;  // near singular
        if (det < 0) a.col(0) *= -1.0;
      }
      for (int r = 0; r < s; ++r)
        for (int c = 0; c < s; ++c) g(blk[r], blk[c]) = a(r, c);
      break;
    }
  }
  // unit determinant: m is scale invariant and this keeps act() well conditioned
  g *= std::pow(std::abs(g.determinant()), -1.0 / n);
  return g;
}

/// Gauss-Newton with Levenberg damping in log-diagonal coordinates, driving
/// the off-diagonal part of m(diag(e^s) . lambda) to zero. Each off-diagonal
/// Ricci entry is divided by the sum of the absolute values of its terms, which
/// turns the typical two-term balance into a tanh of a linear form.
inline std::optional<Eigen::VectorXd> steer_to_diagonal(const Bracket& lambda, Eigen::VectorXd s, double target) {
  const int n = lambda.dim();
  auto moment_at = [&](const Eigen::VectorXd& x) {
    std::vector<double> h(n);
    for (int i = 0; i < n; ++i) h[i] = std::exp(x(i));
    return act_diagonal(h, lambda);
  };
  auto residual = [&](const Eigen::VectorXd& x) {
    StructureTensor c(moment_at(x));
    Eigen::VectorXd r(n * (n - 1) / 2);
    int slot = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b, ++slot) {
        double value = 0.0, size = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            double t1 = -0.5 * c.at(a, i, j) * c.at(b, i, j);
            double t2 = 0.25 * c.at(i, j, a) * c.at(i, j, b);
            value += t1 + t2;
            size += std::abs(t1) + std::abs(t2);
          }
        r(slot) = size > 0.0 ? value / size : 0.0;
      }
    return r;
  };
  auto done = [&](const Eigen::VectorXd& x) { return offdiag_norm(moment_map_ricci(moment_at(x))) < target; };
  double damping = 1e-3;
  Eigen::VectorXd r = residual(s);
  for (int iter = 0; iter < 200; ++iter) {
    if (done(s)) return s;
    Eigen::MatrixXd jac(r.size(), n);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd sp = s;
      sp(i) += 1e-7;
      jac.col(i) = (residual(sp) - r) / 1e-7;
    }
    Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::VectorXd jtr = jac.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 20; ++tries) {
      Eigen::MatrixXd lhs = jtj + damping * Eigen::MatrixXd::Identity(n, n);
      Eigen::VectorXd step = lhs.ldlt().solve(-jtr);
      Eigen::VectorXd cand = s + step;
      if (cand.cwiseAbs().maxCoeff() > 40.0) {
        damping *= 10;
        continue;
      }
      Eigen::VectorXd rc = residual(cand);
      if (rc.norm() < r.norm()) {
        s = cand;
        r = rc;
        damping = std::max(1e-12, damping * 0.3);
        improved = true;
        break;
      }
      damping *= 10;
    }
    if (!improved) break;
  }
  if (done(s)) return s;
  return std::nullopt;
}

}  // namespace detail

inline std::vector<double> natural_hull_coords(const Bracket& acted, const std::vector<Triple>& triples) {
  double total = 0.0;
  for (const auto& [t, c] : acted.constants()) total += c * c;
  std::vector<double> out;
  for (const auto& t : triples) {
    double c = acted(t.i, t.j, t.k);
    out.push_back(total > 0 ? c * c / total : 0.0);
  }
  return out;
}

inline constexpr double kDiagonalTarget = 1e-12;

/// `count` points of m(closure(G . mu)) cap Diag(n), G the group selected by
/// `tag`. Points cycle over the faces of CH_mu (each lambda_J lies in the
/// orbit closure); moment values are made diagonal by a block-orthogonal
/// rotation inside G when G allows it, otherwise by steering the diagonal
/// scaling.
inline OrbitSample orbit_sample(GroupTag tag, const Bracket& b, int count, std::uint64_t seed,
                                const std::optional<std::vector<double>>& d = std::nullopt, int jobs = 1) {
  if (b.is_zero()) throw PreconditionError("orbit sampling needs a nonzero bracket");
  if (count < 0) throw PreconditionError("sample count must be nonnegative");
  const int n = b.dim();
  Torus torus = diagonal_torus(b);
  OrbitSample out;
  out.tag = tag;
  out.seed = seed;
  out.triples = b.support();
  out.blocks = group_blocks(tag, torus, d);
  auto faces = closure_faces(b);
  bool rotations = std::any_of(out.blocks.begin(), out.blocks.end(), [](const auto& blk) { return blk.size() > 1; });
  CounterRng base(seed);

  auto draw = [&](std::size_t s) {
    CounterRng rng = base.substream(s);
    for (int attempt = 0; attempt < 50; ++attempt) {
      // a face whose own orbit has no diagonal moment value hands over to the next one
      const int f = static_cast<int>((s + attempt) % faces.size());
      const Bracket& lambda = faces[f].lambda;
      Eigen::MatrixXd g = detail::random_block_element(out.blocks, n, rng);
      Eigen::VectorXd gd = g.diagonal();
      Bracket acted = tag == GroupTag::DiagPositive ? act_diagonal(std::vector<double>(gd.data(), gd.data() + n), lambda) : act(g, lambda);
      MomentValue m = moment_map(acted);
      if (offdiag_norm(m) > kDiagonalTarget && rotations) {
        Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
        for (const auto& blk : out.blocks) {
          const int sz = static_cast<int>(blk.size());
          Eigen::MatrixXd sub(sz, sz);
          for (int r = 0; r < sz; ++r)
            for (int c = 0; c < sz; ++c) sub(r, c) = m(blk[r], blk[c]);
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
          Eigen::MatrixXd v = es.eigenvectors().transpose();
          if (v.determinant() < 0) v.row(0) *= -1.0;
          for (int r = 0; r < sz; ++r)
            for (int c = 0; c < sz; ++c) k(blk[r], blk[c]) = v(r, c);
        }
        g = k * g;
        acted = act(g, lambda);
        m = moment_map(acted);
      } else if (offdiag_norm(m) > kDiagonalTarget) {
        Eigen::VectorXd s0 = g.diagonal().array().log();
        auto steered = detail::steer_to_diagonal(lambda, s0, kDiagonalTarget);
        if (!steered) continue;
        Eigen::VectorXd h = steered->array().exp();
        g = h.asDiagonal();
        acted = act_diagonal(std::vector<double>(h.data(), h.data() + n), lambda);
        m = moment_map(acted);
      }
      double off = offdiag_norm(m);
      if (off > 1e-10) continue;
      OrbitPoint p;
      p.g = g;
      p.face = f;
      p.acted = acted;
      p.moment = m;
      p.hull_coords = natural_hull_coords(acted, out.triples);
      p.offdiag = off;
      return p;
    }
    throw NumericalError("orbit sampler could not reach a diagonal moment value", 1.0);
  };
  out.points = parallel_map(static_cast<std::size_t>(count), jobs, draw);
  return out;
}

// ---------------------------------------------------------------------------
// Diagonal image checks

struct DiagImageReport {
  bool nice = false;
  bool contained = true;
  double worst_distance = 0.0;  // max hull distance of a sample diagonal
  int worst_index = -1;
  std::vector<double> vertex_distance;  // best steered approach per hull vertex
  bool covered = false;
  bool equality_asserted = false;  // only for nice bases
};

/// Containment of sampled diagonals in CH_mu (LP distance <= 1e-9) and
/// coverage of every vertex F by the steering curve exp(t F) (within 1e-3).
inline DiagImageReport diag_image_check(const Bracket& b, const OrbitSample& sample) {
  DiagImageReport r;
  r.nice = nice_basis_check(b).nice;
  auto wp = weight_polytope(b);
  auto pts = wp.points_double();
  auto diags = sample.diagonals();
  for (std::size_t i = 0; i < diags.size(); ++i) {
    double dist = poly::hull_distance(pts, diags[i]);
    if (dist > r.worst_distance) {
      r.worst_distance = dist;
      r.worst_index = static_cast<int>(i);
    }
  }
  r.contained = r.worst_distance <= 1e-9;
  const int n = b.dim();
  for (int v : wp.lattice.vertices) {
    const auto& f = pts[v];
    double best = 1e300;
    for (double t = 1.0; t <= 64.0; t *= 2.0) {
      std::vector<double> h(n);
      for (int i = 0; i < n; ++i) h[i] = std::exp(t * f[i]);
      MomentValue m = moment_map(act_diagonal(h, b));
      double dist = 0.0;
      for (int i = 0; i < n; ++i) dist = std::max(dist, std::abs(m(i, i) - f[i]));
      best = std::min(best, dist);
      if (best < 1e-3) break;
    }
    r.vertex_distance.push_back(best);
  }
  r.covered = std::all_of(r.vertex_distance.begin(), r.vertex_distance.end(), [](double x) { return x < 1e-3; });
  r.equality_asserted = r.nice && r.contained && r.covered;
  return r;
}

}  // namespace rnlie
