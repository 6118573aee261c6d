#include <algorithm>
#include <set>

#include "gtest/gtest.h"
#include "nbw/diagrams.hpp"
#include "nbw/error.hpp"

using namespace nbw;

namespace {

TruncSeries poly(std::initializer_list<std::pair<int, long>> terms) {
  std::map<int, mpz_class> c;
  for (auto [e, v] : terms)
    c[e] += v;
  return TruncSeries::polynomial(c);
}

// Crossings of the minimal realization counted on the boundary circle:
// bottom points 1..s left to right, then top points right to left. Two
// arcs of a minimal planar tangle cross exactly when their endpoints
// interleave around the circle.
int circle_crossings(const CapDiagram &d) {
  std::vector<std::pair<int, int>> arcs;
  for (auto [a, b] : d.caps)
    arcs.emplace_back(a, b);
  auto prop = d.propagating();
  int s = d.source;
  int m = static_cast<int>(prop.size());
  for (int i = 0; i < m; ++i)
    arcs.emplace_back(prop[i], s + (m - i)); // top point i+1 sits at s+m-i
  int count = 0;
  for (std::size_t i = 0; i < arcs.size(); ++i)
    for (std::size_t j = i + 1; j < arcs.size(); ++j) {
      auto [a, b] = arcs[i];
      auto [c, e] = arcs[j];
      bool c_in = a < c && c < b, e_in = a < e && e < b;
      if (c_in != e_in)
        ++count;
    }
  return count;
}

long binom(int n, int k) {
  if (k < 0 || k > n)
    return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i)
    r = r * (n - k + i) / i;
  return r;
}

long double_factorial_odd(int m) { // (m-1)!! perfect matchings of m points
  long r = 1;
  for (int i = m - 1; i > 0; i -= 2)
    r *= i;
  return r;
}

} // namespace

TEST(EnumerateCaps, Examples) {
  auto one = enumerate_caps(2, 1, 0);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], CapDiagram::single(2, 1, 2));
  EXPECT_EQ(enumerate_caps(4, 1, 0).size(), 6u);
  auto full = enumerate_caps(4, 2, 0);
  ASSERT_EQ(full.size(), 3u);
  std::set<std::vector<std::pair<int, int>>> got;
  for (auto &d : full)
    got.insert(d.caps);
  std::set<std::vector<std::pair<int, int>>> want = {
      {{1, 2}, {3, 4}}, {{1, 3}, {2, 4}}, {{1, 4}, {2, 3}}};
  EXPECT_EQ(got, want);
}

TEST(EnumerateCaps, RejectsTooManyCaps) {
  try {
    enumerate_caps(3, 2, 0);
    FAIL() << "expected InvalidWeights";
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidWeights);
  }
}

TEST(EnumerateCaps, CountsMatchCombinatorics) {
  for (int s = 0; s <= 10; ++s)
    for (int c = 0; 2 * c <= s; ++c) {
      auto ds = enumerate_caps(s, c, 0);
      long expect = binom(s, 2 * c) * double_factorial_odd(2 * c);
      EXPECT_EQ(static_cast<long>(ds.size()), expect) << s << " " << c;
      std::set<CapDiagram> uniq(ds.begin(), ds.end());
      EXPECT_EQ(uniq.size(), ds.size());
      EXPECT_TRUE(std::is_sorted(ds.begin(), ds.end()));
      for (auto &d : ds)
        EXPECT_TRUE(d.is_basis());
    }
  for (int j = 2; j <= 12; ++j)
    EXPECT_EQ(static_cast<long>(enumerate_caps(j, 1, 0).size()), binom(j, 2));
}

TEST(EnumerateCaps, DottedCountsAreStarsAndBars) {
  // each of the c caps takes any number of dots, total at most D
  for (int s = 2; s <= 6; ++s)
    for (int c = 1; 2 * c <= s; ++c)
      for (int D = 0; D <= 3; ++D) {
        long per_matching = binom(D + c, c);
        EXPECT_EQ(static_cast<long>(enumerate_caps(s, c, D).size()),
                  per_matching * static_cast<long>(enumerate_matchings(s, c).size()));
      }
}

TEST(DiagramDegree, Examples) {
  auto a = diagram_degree(CapDiagram::single(2, 1, 2, 3));
  EXPECT_EQ(a.crossings, 0);
  EXPECT_EQ(a.degree, 6);
  EXPECT_EQ(a.q_weight, -6);
  auto b = diagram_degree(CapDiagram::single(4, 1, 4));
  EXPECT_EQ(b.crossings, 2);
  EXPECT_EQ(b.degree, -4);
  EXPECT_EQ(b.q_weight, 4);
  CapDiagram c{4, {{1, 3}, {2, 4}}, {0, 0}};
  auto cd = diagram_degree(c);
  EXPECT_EQ(cd.crossings, 1);
  EXPECT_EQ(cd.degree, -2);
  EXPECT_EQ(cd.q_weight, 2);
}

TEST(DiagramDegree, AgreesWithCircleOracleAndIsEven) {
  for (int s = 0; s <= 9; ++s)
    for (int c = 0; 2 * c <= s; ++c)
      for (auto &d : enumerate_caps(s, c, 2)) {
        auto info = diagram_degree(d);
        EXPECT_EQ(info.crossings, circle_crossings(d)) << d.to_string();
        EXPECT_EQ(info.degree % 2, 0);
        EXPECT_EQ(info.q_weight, -info.degree);
        EXPECT_EQ(info.degree, 2 * d.total_dots() - 2 * info.crossings);
      }
}

TEST(YGenfun, Examples) {
  EXPECT_EQ(y_genfun(0, 2).coeffs(), TruncSeries::constant(1).coeffs());
  EXPECT_EQ(y_genfun(1, 3).coeffs(), poly({{0, 2}, {2, 1}}).coeffs());
  EXPECT_EQ(y_genfun(2, 4).coeffs(), poly({{0, 3}, {2, 2}, {4, 1}}).coeffs());
  EXPECT_TRUE(y_genfun(2, 4).is_polynomial());
}

TEST(YGenfun, Errors) {
  try {
    y_genfun(1, 4);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParityMismatch);
  }
  try {
    y_genfun(4, 2);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidWeights);
  }
}

TEST(YGenfun, ChordRecursion) {
  for (int f = 1; f <= 4; ++f)
    for (int n = 1; n <= 6; ++n) {
      auto lhs = t_genfun(f, n);
      auto rhs = series_add(
          t_genfun(f, n - 1),
          series_mul(series_shift(qint(n + 1), n), t_genfun(f - 1, n + 1)));
      EXPECT_EQ(lhs.coeffs(), rhs.coeffs()) << f << " " << n;
    }
}

TEST(YGenfun, ValueAtOneCountsDiagrams) {
  for (int s = 0; s <= 10; ++s)
    for (int c = 0; 2 * c <= s; ++c) {
      mpz_class total = 0;
      auto y = y_genfun(s - 2 * c, s);
      for (auto &[e, v] : y.coeffs())
        total += v;
      EXPECT_EQ(total, static_cast<long>(enumerate_matchings(s, c).size()));
    }
}

TEST(XDottedDim, Examples) {
  for (int th = 0; th <= 6; ++th)
    EXPECT_EQ(x_dotted_dim(th, th, -10).coeffs(), TruncSeries::constant(1).coeffs());
  auto x20 = x_dotted_dim(2, 0, -8);
  EXPECT_EQ(x20.coeffs(), geometric(2, -8).coeffs());
  EXPECT_EQ(x20.trust_min(), -8);
  auto x40 = x_dotted_dim(4, 0, -10);
  auto expect = series_mul(poly({{0, 2}, {2, 1}}), series_pow(geometric(2, -14), 2, -14));
  EXPECT_TRUE(equal_on_window(x40, expect, -10));
  EXPECT_EQ(x40.coeff(2), 1);
  EXPECT_EQ(x40.coeff(0), 2 + 2);
}

TEST(XDottedDim, MatchesEnumerationPerDegree) {
  // brute force: enumerate dotted diagrams and bin by q-weight
  for (int top = 0; top <= 6; ++top)
    for (int bottom = top % 2; bottom <= top; bottom += 2) {
      int w = -8;
      auto s = x_dotted_dim(top, bottom, w);
      std::map<int, long> count;
      int caps = (top - bottom) / 2;
      for (auto &d : enumerate_caps(top, caps, 12)) {
        int qw = diagram_degree(d).q_weight;
        if (qw >= w)
          ++count[qw];
      }
      for (int e = w; e <= s.max_deg(); ++e)
        EXPECT_EQ(s.coeff(e), count[e]) << top << " " << bottom << " " << e;
    }
}

TEST(XDottedDim, TrivialOnlyOnDiagonal) {
  for (int a = 0; a <= 6; ++a)
    for (int b = a % 2; b <= a; b += 2) {
      bool is_one = x_dotted_dim(a, b, -6).coeffs() == TruncSeries::constant(1).coeffs();
      EXPECT_EQ(is_one, a == b);
    }
}

TEST(NestingPattern, Examples) {
  auto nested = nesting_pattern(CapDiagram{4, {{1, 4}, {2, 3}}, {0, 0}});
  EXPECT_EQ(nested.rel(0, 1), SegmentRelation::Inside);
  auto disjoint = nesting_pattern(CapDiagram{4, {{1, 2}, {3, 4}}, {0, 0}});
  EXPECT_EQ(disjoint.rel(0, 1), SegmentRelation::Disjoint);
  auto crossing = nesting_pattern(CapDiagram{4, {{1, 3}, {2, 4}}, {0, 0}});
  EXPECT_EQ(crossing.rel(0, 1), SegmentRelation::Crossing);
}

TEST(NestingPattern, DiagramsGiveRealizableTransitivePatterns) {
  for (int s = 2; s <= 8; ++s)
    for (int c = 1; 2 * c <= s; ++c)
      for (auto &d : enumerate_matchings(s, c)) {
        auto p = nesting_pattern(d);
        EXPECT_TRUE(p.transitive());
        EXPECT_TRUE(p.realizable()) << d.to_string();
      }
}

TEST(NestingPattern, NonTransitiveIsRejected) {
  NestingPattern p(3);
  p.set(0, 1, SegmentRelation::Inside);
  p.set(1, 2, SegmentRelation::Inside);
  p.set(0, 2, SegmentRelation::Disjoint);
  EXPECT_FALSE(p.transitive());
  EXPECT_FALSE(p.realizable());
}

TEST(NestingPattern, RealizablePatternCounts) {
  // n=1: one; n=2: disjoint, crossing, nested
  EXPECT_EQ(all_realizable_patterns(1).size(), 1u);
  EXPECT_EQ(all_realizable_patterns(2).size(), 3u);
  for (int n = 1; n <= 4; ++n) {
    auto pats = all_realizable_patterns(n);
    std::set<NestingPattern> uniq(pats.begin(), pats.end());
    EXPECT_EQ(uniq.size(), pats.size());
    for (auto &p : pats) {
      EXPECT_TRUE(p.transitive());
      EXPECT_TRUE(p.realizable());
    }
  }
}

TEST(CapDiagramJson, RoundTrip) {
  CapDiagram d{6, {{1, 5}, {2, 3}}, {2, 0}};
  auto j = d.to_json();
  EXPECT_EQ(j["source"], 6);
  EXPECT_EQ(j["caps"], nlohmann::json::parse("[[1,5],[2,3]]"));
  EXPECT_EQ(j["dots"], nlohmann::json::parse("[2,0]"));
  EXPECT_EQ(CapDiagram::from_json(j), d);
}

TEST(CapDiagram, ValidateRejectsBadData) {
  CapDiagram overlap{4, {{1, 2}, {2, 3}}, {0, 0}};
  EXPECT_THROW(overlap.validate(), Error);
  CapDiagram range{3, {{1, 4}}, {0}};
  EXPECT_THROW(range.validate(), Error);
  CapDiagram dots{4, {{1, 2}}, {}};
  EXPECT_THROW(dots.validate(), Error);
  CapDiagram unsorted{4, {{2, 3}, {1, 4}}, {1, 0}};
  EXPECT_FALSE(unsorted.is_basis());
  unsorted.canonicalize();
  EXPECT_EQ(unsorted, (CapDiagram{4, {{1, 4}, {2, 3}}, {0, 1}}));
}
