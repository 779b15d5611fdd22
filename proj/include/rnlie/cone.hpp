#pragma once

// The open convex cone C(n) of trace-positive diagonal derivations of the
// form (positive multiple of a diagonal moment value) + (positive diagonal):
// membership, cross-sections at fixed trace, Weyl invariance and the audit
// that every section point carries a Ricci negative metric.

#include "rnlie/certify.hpp"
#include "rnlie/derivations.hpp"
#include "rnlie/moment.hpp"
#include "rnlie/parallel.hpp"
#include "rnlie/polytope.hpp"
#include "rnlie/random.hpp"

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace rnlie {

enum class Membership { In, Out, Unknown };

inline std::string to_string(Membership m) {
  switch (m) {
    case Membership::In: return "in";
    case Membership::Out: return "out";
    case Membership::Unknown: return "unknown";
  }
  return "?";
}

struct MembershipReport {
  Membership verdict = Membership::Unknown;
  bool exact_regime = false;  // nice basis and multiplicity-free torus
  std::string reason;
  double margin = 0.0;        // LP margin of the deciding LP
};

inline constexpr int kMembershipSamples = 48;

/// Decides D in C(n) for D in the diagonal torus. Out is only reported when
/// tr D <= 0 or when the weight LP is infeasible in the exact regime.
template <class T>
MembershipReport cone_membership(const std::vector<T>& d, const BasicBracket<T>& b, std::uint64_t seed = kDefaultSeed) {
  const int n = b.dim();
  if (static_cast<int>(d.size()) != n) throw PreconditionError("derivation has wrong size");
  require_lie(b);
  Torus torus = diagonal_torus(b);
  if (!torus.coordinates(d)) throw PreconditionError("derivation is not in the diagonal torus");
  MembershipReport r;
  if (!(trace_of(d) > T(0))) {
    r.verdict = Membership::Out;
    r.exact_regime = true;
    r.reason = "trace is not positive";
    return r;
  }
  if (b.is_zero()) {
    r.exact_regime = true;
    T lo = *std::min_element(d.begin(), d.end());
    r.margin = to_double(lo);
    r.verdict = margin_accepts(lo) ? Membership::In : Membership::Out;
    r.reason = "zero bracket: C is the positive diagonal";
    return r;
  }
  bool nice = nice_basis_check(b).nice;
  r.exact_regime = nice && torus.multiplicity_free();
  if (nice) {
    auto lp = nice_lp(d, b);
    r.margin = to_double(lp.epsilon);
    if (lp.certified) {
      r.verdict = Membership::In;
      r.reason = "weight LP certificate";
      return r;
    }
    if (r.exact_regime) {
      r.verdict = Membership::Out;
      r.reason = "weight LP infeasible in the exact regime";
      return r;
    }
  }
  std::vector<double> dd;
  for (const auto& v : d) dd.push_back(to_double(v));
  Bracket bd = b.template cast<double>();
  auto sample = orbit_sample(GroupTag::TorusCentralizer, bd, kMembershipSamples, seed);
  auto lp = certify_srn_sampled(dd, bd, sample);
  r.margin = lp.epsilon;
  if (lp.certified) {
    r.verdict = Membership::In;
    r.reason = "sampled orbit certificate";
  } else {
    r.verdict = Membership::Unknown;
    r.reason = "no certificate from the sampled orbit";
  }
  return r;
}

// ---------------------------------------------------------------------------
// Sections

enum class Exactness { Exact, SampledInner };

inline std::string to_string(Exactness e) { return e == Exactness::Exact ? "exact" : "sampled-inner"; }

/// Closure of C_t(n) = C(n) cap {tr = t}, in torus coordinates.
struct ConeSection {
  Torus torus;
  double trace_level = 1.0;
  Exactness exactness = Exactness::Exact;
  std::vector<std::vector<Rational>> vertices_exact;  // Exact mode only
  std::vector<std::vector<double>> vertices;
  std::vector<std::pair<int, int>> edges;             // Exact mode only
  std::vector<poly::Halfspace> inequalities;          // Exact mode only: a.x <= b in torus coordinates
  int dim = 0;                                         // affine dimension

  std::vector<double> diagonal(const std::vector<double>& x) const { return torus.diagonal(x); }

  /// Combinatorially a k-cube (k = dim).
  bool is_hypercube() const {
    if (exactness != Exactness::Exact) return false;
    return poly::is_hypercube_graph(static_cast<int>(vertices.size()), edges, dim);
  }
};

inline constexpr int kSectionTorusBound = 4;

/// Rows of {x : D(x) - sum b_a F_a >= 0, b >= 0} over variables (x, b), as a.(x,b) <= 0.
template <class B>
std::vector<poly::Halfspace> section_rows(const Torus& torus, const BasicBracket<B>& b) {
  const int n = b.dim();
  const int r = torus.dim();
  auto support = b.support();
  const int m = static_cast<int>(support.size());
  std::vector<poly::Halfspace> rows;
  for (int i = 0; i < n; ++i) {
    poly::Halfspace h{std::vector<Rational>(r + m, Rational(0)), Rational(0)};
    for (int j = 0; j < r; ++j) h.a[j] = -torus.basis(i, j);
    for (int a = 0; a < m; ++a) h.a[r + a] = Rational(weight_vector(n, support[a])[i]);
    rows.push_back(h);
  }
  for (int a = 0; a < m; ++a) {
    poly::Halfspace h{std::vector<Rational>(r + m, Rational(0)), Rational(0)};
    h.a[r + a] = Rational(-1);
    rows.push_back(h);
  }
  return rows;
}

/// Exact section of the closure of C_t: Fourier-Motzkin elimination of the LP
/// multipliers followed by vertex enumeration. Needs a nice basis and a
/// multiplicity-free torus (or the zero bracket).
template <class B>
ConeSection cone_section_exact(const BasicBracket<B>& b, const Rational& t) {
  if (!(t > 0)) throw PreconditionError("trace level must be positive");
  require_lie(b);
  Torus torus = diagonal_torus(b);
  const int r = torus.dim();
  if (r > kSectionTorusBound) throw PreconditionError("exact sections are bounded to torus dimension " + std::to_string(kSectionTorusBound));
  if (!b.is_zero()) {
    if (!nice_basis_check(b).nice) throw PreconditionError("exact section needs a nice basis");
    if (!torus.multiplicity_free()) throw PreconditionError("exact section needs a multiplicity-free torus");
  }
  auto rows = section_rows(torus, b);
  const int m = static_cast<int>(rows.empty() ? 0 : rows[0].a.size()) - r;
  for (int a = 0; a < m; ++a) rows = poly::fourier_motzkin(rows, r);
  poly::Halfspace trace_row{std::vector<Rational>(r, Rational(0)), t};
  for (int i = 0; i < torus.n; ++i)
    for (int j = 0; j < r; ++j) trace_row.a[j] += torus.basis(i, j);
  if (std::all_of(trace_row.a.begin(), trace_row.a.end(), [](const Rational& v) { return v == 0; }))
    throw PreconditionError("the torus has no trace-positive element");

  // boundedness: every coordinate has finite range on the section
  for (int j = 0; j < r; ++j)
    for (int s : {1, -1}) {
      lp::Problem<Rational> p(r);
      p.free.assign(r, true);
      p.objective[j] = Rational(s);
      for (const auto& h : rows) p.add(h.a, lp::Relation::LessEq, h.b);
      p.add(trace_row.a, lp::Relation::Equal, trace_row.b);
      auto res = lp::solve(p);
      if (res.status == lp::Status::Unbounded) throw PreconditionError("cone section is unbounded");
      if (res.status == lp::Status::Infeasible) throw PreconditionError("cone section is empty");
    }

  auto vs = poly::enumerate_vertices(rows, {trace_row}, r);
  ConeSection out;
  out.torus = torus;
  out.trace_level = to_double(t);
  out.exactness = Exactness::Exact;
  out.vertices_exact = vs.vertices;
  for (const auto& v : vs.vertices) {
    std::vector<double> x;
    for (const auto& c : v) x.push_back(to_double(c));
    out.vertices.push_back(x);
  }
  out.edges = vs.edges;
  out.inequalities = rows;
  out.dim = vs.dim;
  return out;
}

/// Probe directions in torus coordinates: +-e_j, all sign vectors (hypercube
/// vertices), then `resolution` seeded random unit vectors.
inline std::vector<Eigen::VectorXd> probe_directions(int r, int resolution, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> dirs;
  for (int j = 0; j < r; ++j)
    for (double s : {1.0, -1.0}) {
      Eigen::VectorXd u = Eigen::VectorXd::Zero(r);
      u(j) = s;
      dirs.push_back(u);
    }
  for (int mask = 0; mask < (1 << r); ++mask) {
    Eigen::VectorXd u(r);
    for (int j = 0; j < r; ++j) u(j) = (mask >> j & 1) ? -1.0 : 1.0;
    dirs.push_back(u / std::sqrt(static_cast<double>(r)));
  }
  CounterRng rng(seed, 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k < resolution; ++k) {
    Eigen::VectorXd u(r);
    for (int j = 0; j < r; ++j) u(j) = gauss(rng);
    if (u.norm() > 0) dirs.push_back(u.normalized());
  }
  return dirs;
}

/// Inner approximation of the section from a torus-centralizer orbit sample:
/// each direction maximizes u.x over {x : tr = t, D(x) - sum b_s p_s >= 0, b >= 0}
/// and the section is the hull of the optimizers.
inline ConeSection cone_section_sampled(const Bracket& b, double t, int resolution, std::uint64_t seed, int samples = kMembershipSamples,
                                        int jobs = 1) {
  if (!(t > 0)) throw PreconditionError("trace level must be positive");
  require_lie(b);
  Torus torus = diagonal_torus(b);
  const int n = b.dim();
  const int r = torus.dim();
  std::vector<std::vector<double>> pts;
  if (!b.is_zero()) pts = orbit_sample(GroupTag::TorusCentralizer, b, samples, seed, std::nullopt, jobs).diagonals();
  const int m = static_cast<int>(pts.size());
  std::vector<double> trace_row(r + m, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < r; ++j) trace_row[j] += to_double(torus.basis(i, j));
  auto dirs = probe_directions(r, resolution, seed);

  auto probe = [&](std::size_t k) -> std::optional<std::vector<double>> {
    lp::Problem<double> p(r + m);
    for (int j = 0; j < r; ++j) {
      p.free[j] = true;
      p.objective[j] = dirs[k](j);
    }
    for (int i = 0; i < n; ++i) {
      std::vector<double> row(r + m, 0.0);
      for (int j = 0; j < r; ++j) row[j] = -to_double(torus.basis(i, j));
      for (int q = 0; q < m; ++q) row[r + q] = pts[q][i];
      p.add(row, lp::Relation::LessEq, 0.0);
    }
    p.add(trace_row, lp::Relation::Equal, t);
    auto res = lp::solve(p, 1e-11);
    if (res.status != lp::Status::Optimal) return std::nullopt;
    return std::vector<double>(res.x.begin(), res.x.begin() + r);
  };
  auto found = parallel_map(dirs.size(), jobs, probe);

  std::vector<std::vector<double>> cand;
  for (const auto& f : found) {
    if (!f) continue;
    bool dup = false;
    for (const auto& c : cand) {
      double dist = 0.0;
      for (int j = 0; j < r; ++j) dist = std::max(dist, std::abs(c[j] - (*f)[j]));
      if (dist < 1e-7) dup = true;
    }
    if (!dup) cand.push_back(*f);
  }
  if (cand.empty()) throw NumericalError("no probe reached the section", 1.0);
  ConeSection out;
  out.torus = torus;
  out.trace_level = t;
  out.exactness = Exactness::SampledInner;
  for (std::size_t c = 0; c < cand.size(); ++c) {
    std::vector<std::vector<double>> others;
    for (std::size_t o = 0; o < cand.size(); ++o)
      if (o != c) others.push_back(cand[o]);
    if (others.empty() || poly::hull_distance(others, cand[c]) > 1e-9) out.vertices.push_back(cand[c]);
  }
  Eigen::MatrixXd diffs(r, std::max<int>(1, static_cast<int>(out.vertices.size()) - 1));
  diffs.setZero();
  for (std::size_t v = 1; v < out.vertices.size(); ++v)
    for (int j = 0; j < r; ++j) diffs(j, static_cast<int>(v) - 1) = out.vertices[v][j] - out.vertices[0][j];
  out.dim = out.vertices.size() > 1 ? static_cast<int>(Eigen::FullPivLU<Eigen::MatrixXd>(diffs).setThreshold(1e-9).rank()) : 0;
  return out;
}

/// Exact when the regime allows it, otherwise the sampled inner approximation.
inline ConeSection cone_section(const Bracket& b, double t, int resolution, std::uint64_t seed, bool want_exact, int jobs = 1) {
  Torus torus = diagonal_torus(b);
  bool exact_ok = torus.dim() <= kSectionTorusBound && (b.is_zero() || (nice_basis_check(b).nice && torus.multiplicity_free()));
  if (want_exact && !exact_ok) throw PreconditionError("exact section needs a nice basis, a multiplicity-free torus and torus dimension <= 4");
  if (exact_ok) return cone_section_exact(b, from_double<Rational>(t));
  return cone_section_sampled(b, t, resolution, seed, kMembershipSamples, jobs);
}

// ---------------------------------------------------------------------------
// Weyl invariance

struct WeylReport {
  bool invariant = true;
  double max_distance = 0.0;    // Hausdorff distance between vertex set and image
  std::vector<int> violations;  // indices into WeylGroup::induced
};

inline WeylReport weyl_invariance_check(const ConeSection& s, const WeylGroup& w) {
  WeylReport rep;
  const double tol = s.exactness == Exactness::Exact ? 0.0 : 1e-6;
  for (std::size_t g = 0; g < w.induced.size(); ++g) {
    const auto& m = w.induced[g];
    double dist = 0.0;
    if (s.exactness == Exactness::Exact) {
      std::set<std::vector<Rational>> verts(s.vertices_exact.begin(), s.vertices_exact.end()), image;
      for (const auto& v : s.vertices_exact) {
        std::vector<Rational> y(v.size(), Rational(0));
        for (int r = 0; r < m.rows(); ++r)
          for (int c = 0; c < m.cols(); ++c) y[r] += m(r, c) * v[c];
        image.insert(y);
      }
      if (image != verts) dist = std::numeric_limits<double>::infinity();
    } else {
      std::vector<std::vector<double>> image;
      for (const auto& v : s.vertices) {
        std::vector<double> y(v.size(), 0.0);
        for (int r = 0; r < m.rows(); ++r)
          for (int c = 0; c < m.cols(); ++c) y[r] += to_double(m(r, c)) * v[c];
        image.push_back(y);
      }
      auto one_way = [](const auto& a, const auto& bset) {
        double worst = 0.0;
        for (const auto& x : a) {
          double best = std::numeric_limits<double>::infinity();
          for (const auto& y : bset) {
            double d = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) d = std::max(d, std::abs(x[j] - y[j]));
            best = std::min(best, d);
          }
          worst = std::max(worst, best);
        }
        return worst;
      };
      dist = std::max(one_way(image, s.vertices), one_way(s.vertices, image));
    }
    rep.max_distance = std::max(rep.max_distance, dist);
    if (dist > tol) {
      rep.invariant = false;
      rep.violations.push_back(static_cast<int>(g));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Containment audit

struct AuditProbe {
  std::vector<double> derivation;  // diagonal
  bool witnessed = false;
  double lambda_max = 0.0;
  int evaluations = 0;
};

struct AuditReport {
  int probes = 0;
  int excluded = 0;   // probes with tr <= 0
  int witnessed = 0;
  double worst_lambda = -std::numeric_limits<double>::infinity();
  std::vector<AuditProbe> results;

  bool all_witnessed() const { return witnessed == probes - excluded; }
};

/// Interior points of the section (random convex combinations of the
/// vertices pulled toward the barycenter) must each carry a Ricci negative
/// metric found by search_rn_metric, warm-started from their LP certificate.
inline AuditReport containment_audit(const Bracket& b, const ConeSection& s, int probes, std::uint64_t seed, int budget = kDefaultSearchBudget,
                                     int jobs = 1) {
  if (s.vertices.empty()) throw PreconditionError("empty section");
  const int r = s.torus.dim();
  const int nv = static_cast<int>(s.vertices.size());
  std::vector<double> bary(r, 0.0);
  for (const auto& v : s.vertices)
    for (int j = 0; j < r; ++j) bary[j] += v[j] / nv;
  CounterRng base(seed, 2);
  const bool nice = !b.is_zero() && nice_basis_check(b).nice;

  auto run = [&](std::size_t k) {
    CounterRng rng = base.substream(k);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> w(nv);
    double tot = 0.0;
    for (auto& x : w) tot += (x = expo(rng));
    std::vector<double> x(r, 0.0);
    for (int v = 0; v < nv; ++v)
      for (int j = 0; j < r; ++j) x[j] += w[v] / tot * s.vertices[v][j];
    for (int j = 0; j < r; ++j) x[j] = 0.1 * bary[j] + 0.9 * x[j];
    AuditProbe pr;
    pr.derivation = s.torus.diagonal(x);
    if (!(trace_of(pr.derivation) > 0)) return pr;
    Eigen::MatrixXd dm = Eigen::VectorXd::Map(pr.derivation.data(), b.dim()).asDiagonal();
    std::vector<MetricParams> hints;
    if (nice) {
      auto lp = nice_lp(pr.derivation, b);
      if (lp.certified)
        if (auto h = srn_hint(pr.derivation, b, lp.certificate)) hints.push_back(*h);
    } else if (!b.is_zero()) {
      auto sample = orbit_sample(GroupTag::DerivationCentralizer, b, kMembershipSamples, rng(), pr.derivation);
      auto lp = certify_srn_sampled(pr.derivation, b, sample);
      if (lp.certified)
        if (auto h = srn_sampled_hint(pr.derivation, b, lp.certificate, sample)) hints.push_back(*h);
    }
    auto res = search_rn_metric(dm, b, budget, seed + k, hints);
    pr.witnessed = res.success;
    pr.lambda_max = res.lambda_max;
    pr.evaluations = res.evaluations;
    return pr;
  };
  AuditReport rep;
  rep.probes = probes;
  rep.results = parallel_map(static_cast<std::size_t>(probes), jobs, run);
  for (const auto& pr : rep.results) {
    if (!(trace_of(pr.derivation) > 0)) {
      ++rep.excluded;
      continue;
    }
    if (pr.witnessed) ++rep.witnessed;
    rep.worst_lambda = std::max(rep.worst_lambda, pr.lambda_max);
  }
  return rep;
}

}  // namespace rnlie
