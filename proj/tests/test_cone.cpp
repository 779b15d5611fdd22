#include "rnlie/cone.hpp"
#include "rnlie/corpus.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace rnlie;

namespace {

using Q = std::vector<Rational>;

bool has_vertex(const ConeSection& s, const Q& v) {
  return std::find(s.vertices_exact.begin(), s.vertices_exact.end(), v) != s.vertices_exact.end();
}

}  // namespace

TEST(Membership, Heisenberg3) {
  auto h3 = corpus("heisenberg:3").bracket;
  auto in = cone_membership(Q{1, 1, 2}, h3);
  EXPECT_EQ(in.verdict, Membership::In);
  EXPECT_TRUE(in.exact_regime);
  auto out = cone_membership(Q{-1, 2, 1}, h3);
  EXPECT_EQ(out.verdict, Membership::Out);
  EXPECT_EQ(cone_membership(Q{-1, -1, -2}, h3).verdict, Membership::Out);
  EXPECT_THROW(cone_membership(Q{1, 1, 1}, h3), PreconditionError);
  EXPECT_EQ(to_string(Membership::Unknown), "unknown");
}

TEST(Membership, AbelianIsThePositiveOrthant) {
  ExactBracket a(3);
  EXPECT_EQ(cone_membership(Q{1, 2, 3}, a).verdict, Membership::In);
  EXPECT_EQ(cone_membership(Q{-1, 2, 3}, a).verdict, Membership::Out);
  EXPECT_EQ(cone_membership(Q{0, 2, 3}, a).verdict, Membership::Out);
}

TEST(Membership, Tricky5UsesTheSampledCertificate) {
  Bracket b = corpus("tricky5").numeric();
  auto r = cone_membership(std::vector<double>{1, 1, 2, 2, 3}, b);
  EXPECT_EQ(r.verdict, Membership::In);
  EXPECT_FALSE(r.exact_regime);
  // outside the nice regime a failed LP is never reported as Out
  auto neg = cone_membership(std::vector<double>{1, -0.9, 0.1, 0.1, 1.1}, b);
  EXPECT_NE(neg.verdict, Membership::Out);
}

TEST(MembershipProperty, Heisenberg3GridMatchesClosedForm) {
  auto h3 = corpus("heisenberg:3").bracket;
  for (int i = -6; i <= 6; ++i)
    for (int j = -6; j <= 6; ++j) {
      Rational a(i, 3), b(j, 3);
      auto r = cone_membership(Q{a, b, a + b}, h3);
      bool closed = 2 * a + b > 0 && a + 2 * b > 0;
      EXPECT_EQ(r.verdict, closed ? Membership::In : Membership::Out) << a << " " << b;
    }
}

TEST(MembershipProperty, ConvexAndScaleInvariant) {
  auto h5 = corpus("heisenberg:5").bracket;
  Torus t = diagonal_torus(h5);
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> u(-8, 8);
  std::vector<Q> inside;
  for (int trial = 0; trial < 60; ++trial) {
    Q x;
    for (int j = 0; j < t.dim(); ++j) x.push_back(Rational(u(rng), 4));
    auto d = t.diagonal(x);
    auto r = cone_membership(d, h5);
    Q scaled;
    for (const auto& v : d) scaled.push_back(v * Rational(7, 3));
    EXPECT_EQ(cone_membership(scaled, h5).verdict, r.verdict);
    if (r.verdict == Membership::In) inside.push_back(d);
  }
  ASSERT_GE(inside.size(), 2u);
  for (std::size_t k = 0; k + 1 < inside.size(); ++k) {
    Q mid;
    for (std::size_t i = 0; i < inside[k].size(); ++i) mid.push_back((inside[k][i] + inside[k + 1][i]) / 2);
    EXPECT_EQ(cone_membership(mid, h5).verdict, Membership::In);
  }
}

TEST(Section, Heisenberg3IsASegment) {
  auto s = cone_section_exact(corpus("heisenberg:3").bracket, Rational(1));
  EXPECT_EQ(s.dim, 1);
  ASSERT_EQ(s.vertices_exact.size(), 2u);
  EXPECT_TRUE(has_vertex(s, Q{Rational(-1, 2), 1}));
  EXPECT_TRUE(has_vertex(s, Q{1, Rational(-1, 2)}));
  EXPECT_TRUE(s.is_hypercube());
  EXPECT_EQ(to_string(s.exactness), "exact");
  auto w = orthogonal_weyl_group(corpus("heisenberg:3").bracket, s.torus);
  EXPECT_TRUE(weyl_invariance_check(s, w).invariant);
}

TEST(Section, Heisenberg3ScalesWithTraceLevel) {
  auto s = cone_section_exact(corpus("heisenberg:3").bracket, Rational(4));
  EXPECT_TRUE(has_vertex(s, Q{-2, 4}));
  EXPECT_TRUE(has_vertex(s, Q{4, -2}));
  EXPECT_THROW(cone_section_exact(corpus("heisenberg:3").bracket, Rational(0)), PreconditionError);
}

TEST(Section, Heisenberg5IsAWeylInvariantOctagon) {
  auto h5 = corpus("heisenberg:5").bracket;
  auto s = cone_section_exact(h5, Rational(1));
  EXPECT_EQ(s.dim, 2);
  EXPECT_EQ(s.vertices_exact.size(), 8u);
  EXPECT_FALSE(s.is_hypercube());
  auto w = orthogonal_weyl_group(h5, s.torus);
  auto rep = weyl_invariance_check(s, w);
  EXPECT_TRUE(rep.invariant);
  EXPECT_EQ(rep.max_distance, 0.0);
  // every vertex has trace 1 and lies on the closure of the LP region
  for (const auto& v : s.vertices_exact) {
    auto d = s.torus.diagonal(v);
    Rational tr(0);
    for (const auto& x : d) tr += x;
    EXPECT_EQ(tr, 1);
    EXPECT_EQ(nice_lp(d, h5).epsilon, 0);
  }
}

TEST(Section, AbelianIsASimplex) {
  auto s = cone_section_exact(ExactBracket(3), Rational(1));
  EXPECT_EQ(s.dim, 2);
  EXPECT_EQ(s.vertices_exact.size(), 3u);
}

TEST(Section, ExactPreconditions) {
  EXPECT_THROW(cone_section_exact(corpus("tricky5").bracket, Rational(1)), PreconditionError);
  EXPECT_THROW(cone_section_exact(ExactBracket(6), Rational(1)), PreconditionError);
  EXPECT_THROW(cone_section(corpus("tricky5").numeric(), 1.0, 8, 1, true), PreconditionError);
}

TEST(Section, SampledInnerAgreesWithExact) {
  for (const char* name : {"heisenberg:3", "heisenberg:5"}) {
    auto entry = corpus(name);
    auto exact = cone_section_exact(entry.bracket, Rational(1));
    auto sampled = cone_section_sampled(entry.numeric(), 1.0, 16, kDefaultSeed);
    EXPECT_EQ(sampled.exactness, Exactness::SampledInner);
    EXPECT_FALSE(sampled.is_hypercube());
    EXPECT_EQ(sampled.dim, exact.dim) << name;
    EXPECT_EQ(sampled.vertices.size(), exact.vertices.size()) << name;
    for (const auto& v : sampled.vertices) EXPECT_LE(poly::hull_distance(exact.vertices, v), 1e-7) << name;
  }
}

TEST(Section, Tricky5SampledIsWeylInvariant) {
  Bracket b = corpus("tricky5").numeric();
  auto s = cone_section(b, 1.0, 16, kDefaultSeed, false);
  EXPECT_EQ(s.exactness, Exactness::SampledInner);
  EXPECT_GE(s.vertices.size(), 2u);
  auto w = orthogonal_weyl_group(b, s.torus);
  EXPECT_TRUE(weyl_invariance_check(s, w).invariant);
}

TEST(Section, ProbeDirectionsAreDeterministic) {
  auto a = probe_directions(3, 5, 17), b = probe_directions(3, 5, 17);
  ASSERT_EQ(a.size(), 6u + 8u + 5u);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]);
}

TEST(Audit, Heisenberg3InteriorIsWitnessed) {
  auto entry = corpus("heisenberg:3");
  auto s = cone_section_exact(entry.bracket, Rational(1));
  auto rep = containment_audit(entry.numeric(), s, 6, kDefaultSeed);
  EXPECT_EQ(rep.probes, 6);
  EXPECT_TRUE(rep.all_witnessed());
  EXPECT_LT(rep.worst_lambda, kWitnessThreshold);
}

TEST(Audit, Tricky5SampledInteriorIsWitnessed) {
  Bracket b = corpus("tricky5").numeric();
  auto s = cone_section(b, 1.0, 8, kDefaultSeed, false);
  auto rep = containment_audit(b, s, 4, kDefaultSeed);
  EXPECT_TRUE(rep.all_witnessed());
}
