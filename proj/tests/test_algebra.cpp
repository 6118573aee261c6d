#include <random>

#include "gtest/gtest.h"
#include "nbw/algebra.hpp"
#include "nbw/error.hpp"

using namespace nbw;

namespace {

AlgebraElement elem(std::initializer_list<std::pair<CapDiagram, long>> terms) {
  AlgebraElement e;
  bool first = true;
  for (auto &[d, c] : terms) {
    if (first) {
      e = AlgebraElement(d.source, d.target());
      first = false;
    }
    e.add(d, mpq_class(c));
  }
  return e;
}

AlgebraElement B(const CapDiagram &d) { return AlgebraElement::basis(d); }

CapDiagram cap(int source, int a, int b, int dots = 0) {
  return CapDiagram::single(source, a, b, dots);
}

// Every basis diagram from `source` with at least one cap and at most
// `max_dots` dots in total, over all admissible cap counts.
std::vector<CapDiagram> ideal_basis(int source, int max_dots) {
  std::vector<CapDiagram> out;
  for (int c = 1; 2 * c <= source; ++c)
    for (auto &d : enumerate_caps(source, c, max_dots))
      out.push_back(d);
  return out;
}

int max_dots_of(const AlgebraElement &e) {
  int m = -1;
  for (auto &[d, c] : e.terms)
    m = std::max(m, d.total_dots());
  return m;
}

AlgebraElement top_dot_part(const AlgebraElement &e, int dots) {
  AlgebraElement out(e.source, e.target);
  for (auto &[d, c] : e.terms)
    if (d.total_dots() == dots)
      out.add(d, c);
  return out;
}

// Rank over Q of a list of sparse rows keyed by diagram.
std::size_t rank_of(std::vector<AlgebraElement> rows) {
  std::size_t rank = 0;
  std::vector<std::pair<CapDiagram, AlgebraElement>> pivots;
  for (auto &r : rows) {
    for (auto &[pk, pr] : pivots) {
      auto c = r.coeff(pk);
      if (c != 0)
        r.add(pr, -c / pr.coeff(pk));
    }
    if (!r.is_zero()) {
      auto key = r.terms.begin()->first;
      // keep pivots reduced against the new one
      for (auto &[pk, pr] : pivots) {
        auto c = pr.coeff(key);
        if (c != 0)
          pr.add(r, -c / r.coeff(key));
      }
      pivots.emplace_back(key, r);
      ++rank;
    }
  }
  return rank;
}

} // namespace

TEST(Multiply, DisjointStacking) {
  auto p = multiply(B(cap(2, 1, 2)), B(cap(4, 3, 4)), 0);
  EXPECT_EQ(p, B(CapDiagram{4, {{1, 2}, {3, 4}}, {0, 0}}));
  EXPECT_EQ(p.source, 4);
  EXPECT_EQ(p.target, 0);
}

TEST(Multiply, IdentityIsNeutral) {
  for (int t : {0, 1})
    for (auto &d : ideal_basis(5, 1)) {
      EXPECT_EQ(multiply(B(CapDiagram::identity(d.target())), B(d), t), B(d));
      EXPECT_EQ(multiply(B(d), B(CapDiagram::identity(d.source)), t), B(d));
    }
}

TEST(Multiply, AdjacentOutermostCapsVanish) {
  for (int t : {0, 1}) {
    EXPECT_TRUE(multiply(B(cap(2, 1, 2)), B(cap(4, 1, 4)), t).is_zero());
    EXPECT_TRUE(gr_multiply(B(cap(2, 1, 2)), B(cap(4, 1, 4)), t).is_zero());
    EXPECT_TRUE(multiply(B(cap(4, 1, 4)), B(cap(6, 1, 6)), t).is_zero());
  }
}

TEST(Multiply, DotSlideCorrectionTerms) {
  // A dotted cap on the left meets a cap crossing the strand below it.
  auto p = multiply(B(cap(2, 1, 2, 1)), B(cap(4, 1, 3)), 0);
  CapDiagram slid{4, {{1, 3}, {2, 4}}, {0, 1}};
  CapDiagram disjoint{4, {{1, 2}, {3, 4}}, {0, 0}};
  CapDiagram nested{4, {{1, 4}, {2, 3}}, {0, 0}};
  EXPECT_EQ(p, elem({{slid, 1}, {disjoint, -1}, {nested, 1}}));
  // moving the slid term across gives the two-term relation
  auto rest = p;
  rest.add(slid, -1);
  EXPECT_EQ(rest.terms.size(), 2u);
  for (auto &[d, c] : rest.terms) {
    EXPECT_EQ(d.total_dots(), 0);
    EXPECT_TRUE(c == 1 || c == -1);
  }
  EXPECT_EQ(gr_multiply(B(cap(2, 1, 2, 1)), B(cap(4, 1, 3)), 0), B(slid));
}

TEST(Multiply, DottedCapOverNestedPair) {
  auto p = multiply(B(cap(2, 1, 2, 1)), B(cap(4, 1, 4)), 0);
  EXPECT_EQ(p, B(CapDiagram{4, {{1, 3}, {2, 4}}, {0, 0}}));
  EXPECT_TRUE(gr_multiply(B(cap(2, 1, 2, 1)), B(cap(4, 1, 4)), 0).is_zero());
}

TEST(Multiply, QuadraticRelations) {
  for (int t : {0, 1})
    for (auto mult : {MultMode::Full, MultMode::Graded}) {
      auto &alg = half_algebra(t, mult);
      EXPECT_EQ(alg.multiply_basis(cap(2, 1, 2), cap(4, 1, 2)),
                alg.multiply_basis(cap(2, 1, 2), cap(4, 3, 4)));
      EXPECT_EQ(alg.multiply_basis(cap(2, 1, 2), cap(4, 1, 3)),
                alg.multiply_basis(cap(2, 1, 2), cap(4, 2, 4)));
      EXPECT_TRUE(alg.multiply_basis(cap(2, 1, 2), cap(4, 1, 4)).is_zero());
      // dotted variants
      EXPECT_EQ(alg.multiply_basis(cap(2, 1, 2, 1), cap(4, 1, 2)),
                alg.multiply_basis(cap(2, 1, 2), cap(4, 3, 4, 1)));
      EXPECT_EQ(alg.multiply_basis(cap(2, 1, 2), cap(4, 1, 2, 2)),
                alg.multiply_basis(cap(2, 1, 2, 2), cap(4, 3, 4)));
      EXPECT_EQ(alg.multiply_basis(cap(2, 1, 2), cap(4, 1, 3, 1)),
                alg.multiply_basis(cap(2, 1, 2, 1), cap(4, 2, 4)));
      EXPECT_TRUE(alg.multiply_basis(cap(2, 1, 2), cap(4, 1, 4, 1)).is_zero());
    }
  auto &gr = half_algebra(0, MultMode::Graded);
  EXPECT_TRUE(gr.multiply_basis(cap(2, 1, 2, 1), cap(4, 1, 4)).is_zero());
}

TEST(Multiply, WeightMismatch) {
  try {
    multiply(B(cap(2, 1, 2)), B(cap(6, 1, 2)), 0);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::WeightMismatch);
  }
}

TEST(Normalize, FreeLoopEvaluatesToT) {
  // a cup followed by a cap on zero strands is a closed loop
  RawDiagram loop{0, {{SliceKind::Cup, 0}, {SliceKind::Cap, 0}}};
  EXPECT_TRUE(normalize(loop, 0).is_zero());
  EXPECT_EQ(normalize(loop, 1), B(CapDiagram::identity(0)));
  RawDiagram with_strands{2, {{SliceKind::Cup, 2}, {SliceKind::Cap, 2}, {SliceKind::Cap, 0}}};
  EXPECT_TRUE(normalize(with_strands, 0).is_zero());
  EXPECT_EQ(normalize(with_strands, 1), B(cap(2, 1, 2)));
}

TEST(Normalize, DottedBubbleOnTheRightVanishes) {
  RawDiagram bubble{0, {{SliceKind::Cup, 0}, {SliceKind::Dot, 0}, {SliceKind::Cap, 0}}};
  for (int t : {0, 1})
    EXPECT_TRUE(normalize(bubble, t).is_zero());
  RawDiagram right_of_cap{2, {{SliceKind::Cup, 2}, {SliceKind::Dot, 2}, {SliceKind::Dot, 2},
                              {SliceKind::Cap, 2}, {SliceKind::Cap, 0}}};
  for (int t : {0, 1})
    EXPECT_TRUE(normalize(right_of_cap, t).is_zero());
}

TEST(Normalize, LoopThroughStrandVanishesWhateverTheDots) {
  // a loop crossing one strand twice has a dot-free lobe, hence is zero;
  // moving the dots to the other lobe exercises every bubble slide
  for (int t : {0, 1})
    for (int dots = 0; dots <= 8; ++dots)
      for (int lobe : {0, 2}) {
        RawDiagram z{1, {{SliceKind::Cup, 0}, {SliceKind::Cross, 1}}};
        for (int i = 0; i < dots; ++i)
          z.slices.push_back({SliceKind::Dot, lobe});
        z.slices.push_back({SliceKind::Cross, 1});
        z.slices.push_back({SliceKind::Cap, 0});
        NormalForm nf = normal_form(z, t);
        EXPECT_TRUE(nf.inside.is_zero() && nf.outside.empty())
            << "dots=" << dots << " lobe=" << lobe << " t=" << t;
      }
}

TEST(Normalize, DottedBubbleLeftOfStrand) {
  // one-dot bubble left of a strand: minus twice a dot on the strand at
  // t = 0 and plus twice at t = 1, modulo bubbles on the right
  RawDiagram raw{1, {{SliceKind::Cup, 0}, {SliceKind::Dot, 0}, {SliceKind::Cap, 0}}};
  for (int t : {0, 1}) {
    NormalForm nf = normal_form(raw, t);
    EXPECT_TRUE(nf.inside.is_zero());
    ASSERT_EQ(nf.outside.size(), 1u);
    const auto &[term, c] = *nf.outside.begin();
    EXPECT_EQ(term.perm, std::vector<int>{0});
    EXPECT_EQ(term.dots, std::vector<int>{1});
    EXPECT_EQ(c, t == 0 ? -2 : 2);
  }
}

TEST(Normalize, ZigzagStraightens) {
  // strand 1 and a cup at positions 1,2, then cap at 0: a zigzag
  RawDiagram zig{1, {{SliceKind::Cup, 1}, {SliceKind::Cap, 0}}};
  EXPECT_EQ(normalize(zig, 0), B(CapDiagram::identity(1)));
}

TEST(Normalize, RightFootDotMovesLeftWithSign) {
  RawDiagram raw{2, {{SliceKind::Dot, 1}, {SliceKind::Cap, 0}}};
  EXPECT_EQ(normalize(raw, 0), elem({{cap(2, 1, 2, 1), -1}}));
}

TEST(Normalize, CrossingUnderCapVanishes) {
  RawDiagram raw{2, {{SliceKind::Cross, 0}, {SliceKind::Cap, 0}}};
  EXPECT_TRUE(normalize(raw, 0).is_zero());
}

TEST(Normalize, RejectsMalformedWords) {
  RawDiagram bad{2, {{SliceKind::Cap, 1}}};
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Normalize, BasisRealizationRoundTrips) {
  for (int s = 0; s <= 8; ++s)
    for (int c = 0; 2 * c <= s; ++c)
      for (auto &d : enumerate_caps(s, c, 2))
        EXPECT_EQ(normalize(RawDiagram::from_basis(d), 0), B(d)) << d.to_string();
}

TEST(NormalForm, DoublyDottedCapLeavesCapSpan) {
  NormalForm nf = half_algebra(0, MultMode::Full).product(cap(4, 2, 4, 2), cap(6, 1, 4));
  OutsideTerm crossing;
  crossing.lower = CapDiagram{6, {{1, 2}, {3, 4}}, {0, 0}};
  crossing.perm = {1, 0};
  crossing.dots = {0, 0};
  ASSERT_TRUE(nf.outside.count(crossing));
  EXPECT_EQ(nf.outside.at(crossing), 1);
  // single-dot caps stay inside
  for (int s = 2; s <= 6; ++s)
    for (auto &v : ideal_basis(s, 1))
      for (auto &u : ideal_basis(v.target(), 1 - v.total_dots()))
        EXPECT_TRUE(half_algebra(0, MultMode::Full).product(u, v).outside.empty());
}

TEST(NormalForm, OutsideTermsRoundTrip) {
  for (int t : {0, 1})
    for (int s = 2; s <= 6; ++s)
      for (auto &v : ideal_basis(s, 3))
        for (auto &u : ideal_basis(v.target(), 3 - v.total_dots()))
          for (const auto &[term, c] : half_algebra(t, MultMode::Full).product(u, v).outside) {
            NormalForm back = normal_form(term.raw(), t);
            ASSERT_TRUE(back.inside.is_zero()) << term.to_string();
            ASSERT_EQ(back.outside.size(), 1u) << term.to_string();
            EXPECT_EQ(back.outside.begin()->first, term);
            EXPECT_EQ(back.outside.begin()->second, 1);
          }
}

TEST(Multiply, GradedProductsStayInCapSpan) {
  for (int s = 2; s <= 7; ++s)
    for (auto &v : ideal_basis(s, 3))
      for (auto &u : ideal_basis(v.target(), 3 - v.total_dots()))
        EXPECT_TRUE(half_algebra(0, MultMode::Graded).product(u, v).outside.empty());
}

TEST(Multiply, AssociativityOnSmallTriples) {
  // exhaustive for bottom weight <= 6 and <= 2 dots in total; the
  // acceptance battery covers weight 8
  for (int t : {0, 1})
    for (int s = 2; s <= 6; ++s)
      for (auto &c : ideal_basis(s, 2))
        for (auto &b : ideal_basis(c.target(), 2 - c.total_dots()))
          for (auto &a : ideal_basis(b.target(), 2 - c.total_dots() - b.total_dots())) {
            auto left = multiply(multiply(B(a), B(b), t), B(c), t);
            auto right = multiply(B(a), multiply(B(b), B(c), t), t);
            ASSERT_EQ(left, right) << a.to_string() << " * " << b.to_string()
                                   << " * " << c.to_string() << " t=" << t;
            auto gl = gr_multiply(gr_multiply(B(a), B(b), t), B(c), t);
            auto gr = gr_multiply(B(a), gr_multiply(B(b), B(c), t), t);
            ASSERT_EQ(gl, gr);
          }
}

TEST(Multiply, FiltrationAndHomogeneity) {
  for (int t : {0, 1})
    for (int s = 2; s <= 7; ++s)
      for (auto &v : ideal_basis(s, 2))
        for (auto &u : ideal_basis(v.target(), 2)) {
          auto p = multiply(B(u), B(v), t);
          int deg = diagram_degree(u).degree + diagram_degree(v).degree;
          int dots = u.total_dots() + v.total_dots();
          for (auto &[d, c] : p.terms) {
            EXPECT_TRUE(d.is_basis());
            EXPECT_EQ(d.source, v.source);
            EXPECT_EQ(d.target(), u.target());
            EXPECT_EQ(diagram_degree(d).degree, deg);
            EXPECT_LE(d.total_dots(), dots);
          }
          auto g = gr_multiply(B(u), B(v), t);
          EXPECT_EQ(top_dot_part(p, dots), g)
              << u.to_string() << " * " << v.to_string();
          if (u.total_dots() == 0 && v.total_dots() == 0)
            EXPECT_EQ(p, g);
          if (!g.is_zero())
            EXPECT_EQ(max_dots_of(g), dots);
        }
}

TEST(Multiply, SingleCapsGenerate) {
  // every diagram with k caps lies in the span of single caps times
  // diagrams with k-1 caps, checked per degree
  for (int theta = 4; theta <= 8; ++theta)
    for (int psi = theta % 2; psi + 4 <= theta; psi += 2) {
      int k = (theta - psi) / 2;
      std::map<int, std::vector<AlgebraElement>> rows;
      std::map<int, std::size_t> want;
      for (auto &d : enumerate_caps(theta, k, 3))
        if (d.total_dots() <= 1)
          ++want[diagram_degree(d).degree];
      for (auto &v : enumerate_caps(theta, k - 1, 3))
        for (auto &u : enumerate_caps(psi + 2, 1, 3)) {
          int deg = diagram_degree(u).degree + diagram_degree(v).degree;
          if (!want.contains(deg) || u.total_dots() + v.total_dots() > 3)
            continue;
          rows[deg].push_back(multiply(B(u), B(v), 0));
        }
      // degrees reachable with at most one dot are complete once three
      // dots are allowed in the factors
      for (auto &[deg, n] : want) {
        std::size_t basis_in_degree = 0;
        for (auto &d : enumerate_caps(theta, k, 12))
          if (diagram_degree(d).degree == deg)
            ++basis_in_degree;
        if (basis_in_degree != n)
          continue;
        EXPECT_EQ(rank_of(rows[deg]), n) << theta << "->" << psi << " deg " << deg;
      }
    }
}

TEST(Multiply, RandomProductsAreHomogeneousBasisSums) {
  std::mt19937 rng(2024);
  std::vector<std::vector<CapDiagram>> by_source(9);
  for (int s = 2; s <= 8; ++s)
    by_source[s] = ideal_basis(s, 2);
  for (int trial = 0; trial < 2000; ++trial) {
    int s = std::uniform_int_distribution<int>(2, 8)(rng);
    auto &vs = by_source[s];
    auto v = vs[std::uniform_int_distribution<std::size_t>(0, vs.size() - 1)(rng)];
    if (v.target() < 2)
      continue;
    auto us = ideal_basis(v.target(), 2);
    auto u = us[std::uniform_int_distribution<std::size_t>(0, us.size() - 1)(rng)];
    int t = trial % 2;
    auto p = multiply(B(u), B(v), t);
    for (auto &[d, c] : p.terms) {
      EXPECT_TRUE(d.is_basis());
      EXPECT_NE(c, 0);
      EXPECT_EQ(diagram_degree(d).degree,
                diagram_degree(u).degree + diagram_degree(v).degree);
    }
  }
}

TEST(VPlus, Shape) {
  auto v1 = vplus(1);
  ASSERT_EQ(v1.factors.size(), 1u);
  EXPECT_EQ(v1.factors[0], cap(2, 1, 2));
  EXPECT_EQ(v1.q_weight(), 0);
  auto v2 = vplus(2);
  ASSERT_EQ(v2.factors.size(), 2u);
  EXPECT_EQ(v2.factors[0], cap(2, 1, 2));
  EXPECT_EQ(v2.factors[1], cap(4, 1, 4));
  EXPECT_EQ(v2.q_weight(), 4);
  auto v3 = vplus(3);
  ASSERT_EQ(v3.factors.size(), 3u);
  EXPECT_EQ(v3.factors[2], cap(6, 1, 6));
  EXPECT_EQ(v3.q_weight(), 12);
  for (int n = 1; n <= 5; ++n) {
    auto v = vplus(n);
    v.validate();
    EXPECT_EQ(v.q_weight(), 4 * n * (n - 1) / 2);
    EXPECT_EQ(v.source(), 2 * n);
    EXPECT_EQ(v.target(), 0);
  }
}

TEST(VPlus, AdjacentFactorsMultiplyToZero) {
  for (int t : {0, 1})
    for (int n = 2; n <= 5; ++n) {
      auto v = vplus(n);
      for (std::size_t i = 0; i + 1 < v.factors.size(); ++i)
        EXPECT_TRUE(multiply(B(v.factors[i]), B(v.factors[i + 1]), t).is_zero());
    }
}

TEST(AlgebraElementJson, Format) {
  auto e = elem({{cap(2, 1, 2, 1), -1}});
  e.add(cap(2, 1, 2), mpq_class(1, 2));
  auto j = e.to_json();
  ASSERT_TRUE(j.is_array());
  ASSERT_EQ(j.size(), 2u);
  bool saw_half = false;
  for (auto &row : j) {
    ASSERT_TRUE(row.contains("coeff"));
    ASSERT_TRUE(row.contains("diagram"));
    if (row["coeff"] == "1/2")
      saw_half = true;
  }
  EXPECT_TRUE(saw_half);
}
