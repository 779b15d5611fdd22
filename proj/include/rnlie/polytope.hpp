#pragma once

// Exact polytope routines: face lattices of point hulls (V side),
// Fourier-Motzkin projection and vertex enumeration (H side), plus a
// floating-point hull membership LP.

#include "rnlie/dense.hpp"
#include "rnlie/errors.hpp"
#include "rnlie/lp.hpp"
#include "rnlie/rational.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <vector>

namespace rnlie::poly {

using Point = std::vector<Rational>;

inline constexpr long long kMaxSubsets = 500000;

inline long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > kMaxSubsets * 100) return r;
  }
  return r;
}

/// Calls fn(subset) for each k-subset of {0..n-1} in lexicographic order.
template <class Fn>
void for_each_subset(int n, int k, Fn fn) {
  if (k > n || k < 0) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// Affine rank of a point set.
inline int affine_dim(const std::vector<Point>& pts) {
  if (pts.size() <= 1) return 0;
  dense::Matrix<Rational> m;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    Point d(pts[i].size());
    for (std::size_t c = 0; c < d.size(); ++c) d[c] = pts[i][c] - pts[0][c];
    m.append_row(d);
  }
  return dense::rank(m, 0.0);
}

struct Face {
  std::vector<int> points;    // indices of input points lying on the face
  std::vector<int> vertices;  // the subset that are vertices of the whole hull
  int dim = 0;
};

struct FaceLattice {
  int dim = 0;
  std::vector<int> vertices;
  std::vector<Face> faces;  // all nonempty faces including the polytope itself, ordered by (dim, points)
  std::vector<Face> facets;
};

/// Face lattice of conv(points). Facets come from affinely independent
/// d-subsets in affine-hull coordinates; lower faces are their intersections.
inline FaceLattice hull_faces(const std::vector<Point>& points) {
  FaceLattice out;
  const int m = static_cast<int>(points.size());
  if (m == 0) throw PreconditionError("hull of an empty point set");
  // affine coordinates: pivot columns of the rref of the difference rows
  dense::Matrix<Rational> diffs;
  for (int i = 1; i < m; ++i) {
    Point d(points[i].size());
    for (std::size_t c = 0; c < d.size(); ++c) d[c] = points[i][c] - points[0][c];
    diffs.append_row(d);
  }
  std::vector<int> pivots;
  if (diffs.rows() > 0) pivots = dense::rref(diffs, 0.0);
  const int d = static_cast<int>(pivots.size());
  out.dim = d;
  std::vector<Point> q(m, Point(d));
  for (int i = 0; i < m; ++i)
    for (int r = 0; r < d; ++r) q[i][r] = points[i][pivots[r]] - points[0][pivots[r]];

  std::vector<int> all(m);
  for (int i = 0; i < m; ++i) all[i] = i;
  if (d == 0) {
    out.vertices = {0};
    out.faces.push_back({all, {0}, 0});
    return out;
  }
  if (binomial(m, d) > kMaxSubsets) throw PreconditionError("hull too large for exact facet enumeration");

  std::set<std::vector<int>> facet_sets;
  for_each_subset(m, d, [&](const std::vector<int>& s) {
    dense::Matrix<Rational> rows(d - 1, d);
    for (int r = 1; r < d; ++r)
      for (int c = 0; c < d; ++c) rows(r - 1, c) = q[s[r]][c] - q[s[0]][c];
    dense::Matrix<Rational> normal = d == 1 ? dense::Matrix<Rational>::identity(1) : dense::null_space(rows, 0.0);
    if (normal.cols() != 1) return;
    auto w = normal.column(0);
    Rational offset = dense::dot(w, q[s[0]]);
    bool above = false, below = false;
    std::vector<int> on;
    for (int i = 0; i < m; ++i) {
      Rational v = dense::dot(w, q[i]) - offset;
      if (v > 0) above = true;
      else if (v < 0) below = true;
      else on.push_back(i);
    }
    if (above && below) return;
    facet_sets.insert(on);
  });

  std::set<std::vector<int>> face_sets(facet_sets.begin(), facet_sets.end());
  std::vector<std::vector<int>> frontier(facet_sets.begin(), facet_sets.end());
  while (!frontier.empty()) {
    std::vector<std::vector<int>> next;
    for (const auto& a : frontier)
      for (const auto& f : facet_sets) {
        std::vector<int> inter;
        std::set_intersection(a.begin(), a.end(), f.begin(), f.end(), std::back_inserter(inter));
        if (!inter.empty() && face_sets.insert(inter).second) next.push_back(inter);
      }
    frontier = std::move(next);
  }
  face_sets.insert(all);

  auto face_dim = [&](const std::vector<int>& idx) {
    std::vector<Point> pts;
    for (int i : idx) pts.push_back(q[i]);
    return affine_dim(pts);
  };
  // coincident input points: keep the first index as the vertex
  std::set<int> vertices;
  for (const auto& f : face_sets)
    if (face_dim(f) == 0) vertices.insert(f.front());
  out.vertices.assign(vertices.begin(), vertices.end());
  for (const auto& f : face_sets) {
    Face face;
    face.points = f;
    face.dim = face_dim(f);
    for (int i : f)
      if (vertices.count(i)) face.vertices.push_back(i);
    out.faces.push_back(face);
    if (facet_sets.count(f)) out.facets.push_back(face);
  }
  std::stable_sort(out.faces.begin(), out.faces.end(), [](const Face& a, const Face& b) {
    return a.dim != b.dim ? a.dim < b.dim : a.points < b.points;
  });
  return out;
}

// ---------------------------------------------------------------------------
// H-representations

/// a . x <= b
struct Halfspace {
  std::vector<Rational> a;
  Rational b;
  friend bool operator<(const Halfspace& x, const Halfspace& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  }
  friend bool operator==(const Halfspace&, const Halfspace&) = default;
};

/// Scales so the largest |a_i| is 1.
inline Halfspace normalized(Halfspace h) {
  Rational m(0);
  for (const auto& v : h.a) m = std::max(m, abs_value(v));
  if (m == 0) return h;
  for (auto& v : h.a) v /= m;
  h.b /= m;
  return h;
}

/// Drops trivially true rows and rows implied by the others (exact LP). Throws if
/// a constant row is violated.
inline std::vector<Halfspace> remove_redundant(std::vector<Halfspace> rows) {
  std::set<Halfspace> uniq;
  for (auto& r : rows) {
    bool zero = std::all_of(r.a.begin(), r.a.end(), [](const Rational& v) { return v == 0; });
    if (zero) {
      if (r.b < 0) throw PreconditionError("inequality system is infeasible");
      continue;
    }
    uniq.insert(normalized(r));
  }
  std::vector<Halfspace> cur(uniq.begin(), uniq.end());
  for (std::size_t r = 0; r < cur.size();) {
    const int nv = static_cast<int>(cur[r].a.size());
    lp::Problem<Rational> p(nv);
    p.free.assign(nv, true);
    p.objective = cur[r].a;
    for (std::size_t o = 0; o < cur.size(); ++o)
      if (o != r) p.add(cur[o].a, lp::Relation::LessEq, cur[o].b);
    // keep the row itself relaxed by one so the LP stays bounded when it is essential
    p.add(cur[r].a, lp::Relation::LessEq, cur[r].b + 1);
    auto res = lp::solve(p);
    if (res.status == lp::Status::Infeasible) throw PreconditionError("inequality system is infeasible");
    if (res.status == lp::Status::Optimal && res.value <= cur[r].b) {
      cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(r));
    } else {
      ++r;
    }
  }
  return cur;
}

/// Projects {x : rows} onto the variables other than `var` (which is removed).
inline std::vector<Halfspace> fourier_motzkin(const std::vector<Halfspace>& rows, int var) {
  std::vector<Halfspace> pos, neg, out;
  auto drop = [var](const Halfspace& h) {
    Halfspace r{h.a, h.b};
    r.a.erase(r.a.begin() + var);
    return r;
  };
  for (const auto& h : rows) {
    if (h.a[var] > 0) pos.push_back(h);
    else if (h.a[var] < 0) neg.push_back(h);
    else out.push_back(drop(h));
  }
  for (const auto& p : pos)
    for (const auto& q : neg) {
      Rational sp = -q.a[var], sq = p.a[var];
      Halfspace comb{std::vector<Rational>(p.a.size()), sp * p.b + sq * q.b};
      for (std::size_t c = 0; c < p.a.size(); ++c) comb.a[c] = sp * p.a[c] + sq * q.a[c];
      out.push_back(drop(comb));
    }
  return remove_redundant(out);
}

struct VertexSet {
  std::vector<Point> vertices;
  std::vector<std::vector<int>> tight;           // indices of tight inequality rows per vertex
  std::vector<std::pair<int, int>> edges;
  int dim = 0;
};

/// Vertices of {x : ineq, eq} (bounded assumed; checked by the caller).
inline VertexSet enumerate_vertices(const std::vector<Halfspace>& ineq, const std::vector<Halfspace>& eq, int nvars) {
  VertexSet out;
  const int k = static_cast<int>(eq.size());
  const int need = nvars - k;
  const int m = static_cast<int>(ineq.size());
  if (need < 0) throw PreconditionError("too many equality constraints");
  if (binomial(m, need) > kMaxSubsets) throw PreconditionError("vertex enumeration too large");
  std::map<Point, std::set<int>> found;
  auto feasible = [&](const Point& x, std::set<int>& tight) {
    for (int r = 0; r < m; ++r) {
      Rational v = dense::dot(ineq[r].a, x);
      if (v > ineq[r].b) return false;
      if (v == ineq[r].b) tight.insert(r);
    }
    return true;
  };
  for_each_subset(m, need, [&](const std::vector<int>& s) {
    dense::Matrix<Rational> a(nvars, nvars);
    std::vector<Rational> rhs(nvars);
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < nvars; ++c) a(r, c) = eq[r].a[c];
      rhs[r] = eq[r].b;
    }
    for (int r = 0; r < need; ++r) {
      for (int c = 0; c < nvars; ++c) a(k + r, c) = ineq[s[r]].a[c];
      rhs[k + r] = ineq[s[r]].b;
    }
    auto x = dense::solve(a, rhs, 0.0);
    if (!x) return;
    std::set<int> tight;
    if (feasible(*x, tight)) found[*x] = tight;
  });
  for (const auto& [x, t] : found) {
    out.vertices.push_back(x);
    out.tight.emplace_back(t.begin(), t.end());
  }
  out.dim = affine_dim(out.vertices);
  // adjacency: common tight rows plus equalities pin down a line
  for (std::size_t u = 0; u < out.vertices.size(); ++u)
    for (std::size_t v = u + 1; v < out.vertices.size(); ++v) {
      std::vector<int> common;
      std::set_intersection(out.tight[u].begin(), out.tight[u].end(), out.tight[v].begin(), out.tight[v].end(),
                            std::back_inserter(common));
      dense::Matrix<Rational> sys;
      for (const auto& e : eq) sys.append_row(e.a);
      for (int r : common) sys.append_row(ineq[r].a);
      if (sys.rows() > 0 && dense::rank(sys, 0.0) == nvars - 1) out.edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
    }
  return out;
}

/// True when the graph on `count` vertices is isomorphic to the k-cube graph.
inline bool is_hypercube_graph(int count, const std::vector<std::pair<int, int>>& edges, int k) {
  if (count != (1 << k)) return false;
  std::vector<std::set<int>> adj(count);
  for (auto [u, v] : edges) {
    adj[u].insert(v);
    adj[v].insert(u);
  }
  for (const auto& a : adj)
    if (static_cast<int>(a.size()) != k) return false;
  std::vector<int> label(count, -1), owner(count, -1);
  auto cube_adj = [](int a, int b) { return __builtin_popcount(static_cast<unsigned>(a ^ b)) == 1; };
  auto assign = [&](auto&& self, int v) -> bool {
    if (v == count) return true;
    for (int l = 0; l < count; ++l) {
      if (owner[l] >= 0) continue;
      bool ok = true;
      for (int u = 0; u < v && ok; ++u) ok = (adj[v].count(u) > 0) == cube_adj(label[u], l);
      if (!ok) continue;
      label[v] = l;
      owner[l] = v;
      if (self(self, v + 1)) return true;
      owner[l] = -1;
      label[v] = -1;
    }
    return false;
  };
  return assign(assign, 0);
}

// ---------------------------------------------------------------------------
// Floating-point hull membership

/// Smallest delta such that x is within delta (max norm) of conv(points).
inline double hull_distance(const std::vector<std::vector<double>>& points, const std::vector<double>& x) {
  const int m = static_cast<int>(points.size());
  const int n = static_cast<int>(x.size());
  // variables: lambda_0..m-1 >= 0, delta >= 0; maximize -delta
  lp::Problem<double> p(m + 1);
  p.objective[m] = -1.0;
  std::vector<double> sum(m + 1, 0.0);
  for (int i = 0; i < m; ++i) sum[i] = 1.0;
  p.add(sum, lp::Relation::Equal, 1.0);
  for (int c = 0; c < n; ++c) {
    std::vector<double> up(m + 1), lo(m + 1);
    for (int i = 0; i < m; ++i) up[i] = lo[i] = points[i][c];
    up[m] = -1.0;
    lo[m] = 1.0;
    p.add(up, lp::Relation::LessEq, x[c]);
    p.add(lo, lp::Relation::GreaterEq, x[c]);
  }
  auto r = lp::solve(p, 1e-12);
  if (r.status != lp::Status::Optimal) throw NumericalError("hull membership LP failed", 1.0);
  return -r.value;
}

}  // namespace rnlie::poly
