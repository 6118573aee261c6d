#include <random>

#include "gtest/gtest.h"
#include "nbw/error.hpp"
#include "nbw/homology.hpp"

using namespace nbw;

namespace {

TruncSeries ext_one(int window) { return geometric(2, window); }

TruncSeries ext_two(int window) {
  TruncSeries g = geometric(2, window - 4);
  return series_mul(TruncSeries::polynomial({{0, 1}, {2, 1}, {4, 1}}), series_mul(g, g, window - 4),
                    window);
}

SparseMatrix dense(std::initializer_list<std::initializer_list<long>> rows) {
  SparseMatrix m;
  int r = 0;
  for (const auto &row : rows) {
    int c = 0;
    for (long v : row) {
      if (v != 0)
        m.entries.push_back({r, c, mpq_class(v)});
      ++c;
    }
    m.cols = std::max(m.cols, c);
    ++r;
  }
  m.rows = r;
  return m;
}

} // namespace

TEST(Rank, SmallMatrices) {
  EXPECT_EQ(exact_rank(dense({{1, 2}, {2, 4}})), 1u);
  EXPECT_EQ(exact_rank(dense({{1, 2}, {3, 4}})), 2u);
  EXPECT_EQ(exact_rank(dense({{0, 0}, {0, 0}})), 0u);
  EXPECT_EQ(exact_rank(dense({{1, 1, 0}, {0, 1, 1}, {1, 0, -1}})), 2u);
}

TEST(Rank, ModPAgreesOnRandomIntegerMatrices) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> v(-2, 2), size(1, 9);
  for (int trial = 0; trial < 100; ++trial) {
    SparseMatrix m;
    m.rows = size(rng);
    m.cols = size(rng);
    for (int r = 0; r < m.rows; ++r)
      for (int c = 0; c < m.cols; ++c)
        if (int x = v(rng) * (trial % 3 ? 1 : v(rng)); x != 0)
          m.entries.push_back({r, c, mpq_class(x)});
    std::size_t r = exact_rank(m);
    EXPECT_EQ(rank_mod_p(m), r);
    EXPECT_LE(r, static_cast<std::size_t>(std::min(m.rows, m.cols)));
    // transposing keeps the rank
    SparseMatrix t;
    t.rows = m.cols;
    t.cols = m.rows;
    for (const auto &e : m.entries)
      t.entries.push_back({e.col, e.row, e.value});
    EXPECT_EQ(exact_rank(t), r);
  }
}

TEST(BarComplex, TwoStrands) {
  GradedComplex c = build_bar_complex(0, 2, -6, 0, MultMode::Full);
  ASSERT_EQ(c.basis.size(), 1u);
  ASSERT_EQ(c.basis.at(1).size(), 4u);
  for (const auto &w : c.basis.at(1)) {
    ASSERT_EQ(w.factors.size(), 1u);
    EXPECT_EQ(w.factors[0].caps, (std::vector<std::pair<int, int>>{{1, 2}}));
  }
  EXPECT_TRUE(c.differential.empty());
  HomologyTable h = homology_table(c);
  for (int q : {0, -2, -4, -6})
    EXPECT_EQ(h.dim(1, q), 1) << q;
  EXPECT_TRUE(equal_on_window(h.series(1), ext_one(-6)));
}

TEST(BarComplex, ParityAndOrder) {
  EXPECT_TRUE(build_bar_complex(0, 3, -6, 0, MultMode::Full).empty());
  EXPECT_TRUE(build_bar_complex(4, 4, -6, 0, MultMode::Full).empty());
  EXPECT_TRUE(build_bar_complex(4, 2, -6, 0, MultMode::Full).empty());
  EXPECT_TRUE(homology_table(build_bar_complex(0, 3, -6, 0, MultMode::Full)).entries.empty());
}

TEST(BarComplex, FourStrandsShape) {
  GradedComplex c = build_bar_complex(0, 4, -4, 0, MultMode::Full);
  ASSERT_EQ(c.basis.size(), 2u);
  for (const auto &w : c.basis.at(2)) {
    EXPECT_EQ(w.factors[0].source, 2);
    EXPECT_EQ(w.factors[1].source, 4);
    EXPECT_EQ(w.factors[1].target(), 2);
  }
  for (std::size_t i = 0; i < c.basis.at(1).size(); ++i) {
    EXPECT_EQ(c.basis.at(1)[i].factors[0].source, 4);
    EXPECT_GE(c.degree.at(1)[i], -4);
  }
  EXPECT_TRUE(boundary_squared_zero(c));
}

TEST(BarComplex, BasisContainsEveryWordInWindow) {
  // the graded dimensions of the positions match the dotted cap counts
  for (int theta : {2, 4, 6}) {
    GradedComplex c = build_bar_complex(0, theta, -8, 0, MultMode::Full);
    EXPECT_TRUE(equal_on_window(euler_characteristic(c), chain_euler_series(0, theta, -8)))
        << theta;
  }
  GradedComplex c = build_bar_complex(2, 6, -6, 0, MultMode::Full);
  EXPECT_TRUE(equal_on_window(euler_characteristic(c), chain_euler_series(2, 6, -6)));
}

TEST(Homology, FourStrandsConcentrated) {
  for (MultMode mode : {MultMode::Full, MultMode::Graded}) {
    ConcentrationReport r = concentration_report(0, 4, -8, 0, mode);
    EXPECT_TRUE(r.concentrated);
    EXPECT_EQ(r.at, 2);
    EXPECT_TRUE(equal_on_window(r.dims, ext_two(-8))) << r.dims.to_string();
  }
}

TEST(Homology, WeightBlockTwoFour) {
  ConcentrationReport r = concentration_report(2, 4, -8, 0);
  EXPECT_TRUE(r.concentrated);
  EXPECT_EQ(r.at, 1);
  // one step: H_1 is the whole position
  GradedComplex c = build_bar_complex(2, 4, -8, 0, MultMode::Full);
  EXPECT_TRUE(equal_on_window(r.dims, c.graded_dim(1)));
}

TEST(Homology, EulerCharacteristicMatchesHomology) {
  for (auto [psi, theta] : {std::pair{0, 4}, {0, 6}, {2, 6}}) {
    GradedComplex c = build_bar_complex(psi, theta, -6, 0, MultMode::Full);
    HomologyTable h = homology_table(c);
    TruncSeries chi = TruncSeries::truncated({}, -6, 0);
    for (int k = 1; k <= c.top_position(); ++k)
      chi = series_add(chi, k % 2 ? -h.series(k) : h.series(k));
    EXPECT_TRUE(equal_on_window(chi, euler_characteristic(c))) << psi << " " << theta;
  }
}

TEST(Homology, IndependentOfBasisOrder) {
  GradedComplex c = build_bar_complex(0, 6, -4, 0, MultMode::Full);
  HomologyTable h = homology_table(c);
  // reverse every basis and reindex the differentials
  GradedComplex r = c;
  for (auto &[k, b] : r.basis) {
    std::reverse(b.begin(), b.end());
    std::reverse(r.degree[k].begin(), r.degree[k].end());
  }
  for (auto &[k, m] : r.differential)
    for (auto &e : m.entries) {
      e.row = m.rows - 1 - e.row;
      e.col = m.cols - 1 - e.col;
    }
  EXPECT_EQ(homology_table(r).entries, h.entries);
}

TEST(Homology, EmptyComplexHasEmptyTable) {
  GradedComplex c;
  EXPECT_TRUE(homology_table(c).entries.empty());
  EXPECT_TRUE(euler_characteristic(c).is_zero());
}

TEST(CycleClass, VPlus) {
  for (int n : {2, 3}) {
    GradedComplex c = build_bar_complex(0, 2 * n, 4 * n * (n - 1) / 2 - 2, 0, MultMode::Full);
    CycleClass r = cycle_class_check({{vplus(n), 1}}, c);
    EXPECT_TRUE(r.is_cycle) << n;
    EXPECT_TRUE(r.nonzero_class) << n;
  }
}

TEST(CycleClass, BoundariesHaveZeroClass) {
  GradedComplex c = build_bar_complex(0, 4, -4, 0, MultMode::Full);
  BarDifferential d(0, MultMode::Full);
  int checked = 0;
  for (const auto &w : c.basis.at(2)) {
    Chain b = d.apply(w);
    if (b.empty())
      continue;
    CycleClass r = cycle_class_check(b, c);
    EXPECT_TRUE(r.is_cycle);
    EXPECT_FALSE(r.nonzero_class);
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(CycleClass, RejectsForeignWords) {
  GradedComplex c = build_bar_complex(0, 4, -4, 0, MultMode::Full);
  try {
    cycle_class_check({{vplus(1), 1}}, c);
    FAIL() << "expected PositionMismatch";
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::PositionMismatch);
  }
}

TEST(BarDifferential, SquaresToZeroAtTZero) {
  for (MultMode mode : {MultMode::Full, MultMode::Graded})
    for (auto [psi, theta] : {std::pair{0, 4}, {0, 6}, {2, 6}}) {
      GradedComplex c = build_bar_complex(psi, theta, -6, 0, mode);
      EXPECT_TRUE(boundary_squared_zero(c)) << psi << " " << theta;
    }
}

TEST(BarDifferential, SquaresToZeroAtTOne) {
  for (MultMode mode : {MultMode::Full, MultMode::Graded})
    for (auto [psi, theta] : {std::pair{0, 4}, {0, 6}, {2, 6}}) {
      GradedComplex c = build_bar_complex(psi, theta, -6, 1, mode);
      EXPECT_TRUE(boundary_squared_zero(c)) << psi << " " << theta;
    }
}

TEST(HomologyTableJson, Rows) {
  HomologyTable h = homology_table(build_bar_complex(0, 2, -2, 0, MultMode::Full));
  auto j = h.to_json();
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0]["theta"], 2);
  EXPECT_EQ(j[0]["psi"], 0);
  EXPECT_EQ(j[0]["hom_degree"], 1);
  EXPECT_EQ(j[0]["dim"], 1);
  EXPECT_EQ(j[0]["trusted"], true);
}

TEST(ChainEuler, MatchesExtFormulaUpToSign) {
  EXPECT_TRUE(equal_on_window(chain_euler_series(0, 2, -10), -ext_one(-10)));
  EXPECT_TRUE(equal_on_window(chain_euler_series(0, 4, -10), ext_two(-10)));
}

TEST(DotLabels, DotlessWordsFormASubcomplex) {
  for (auto [psi, theta] : {std::pair{0, 4}, {0, 6}, {2, 6}}) {
    GradedComplex c = build_dotless_bar_complex(psi, theta, 0, MultMode::Graded);
    EXPECT_FALSE(c.empty());
    for (const auto &[k, words] : c.basis)
      for (const auto &w : words)
        for (const auto &f : w.factors)
          for (int d : f.dots)
            EXPECT_EQ(d, 0);
    EXPECT_TRUE(boundary_squared_zero(c));
  }
}

TEST(DotLabels, ReportMatchesTheGradedComplex) {
  for (auto [psi, theta] : {std::pair{0, 2}, {0, 4}, {0, 6}, {2, 6}, {2, 4}}) {
    HomologyTable direct = homology_table(build_bar_complex(psi, theta, -8, 0, MultMode::Graded));
    ConcentrationReport r = dot_label_report(psi, theta, -8);
    EXPECT_EQ(r.table.entries, direct.entries) << psi << " " << theta;
    EXPECT_TRUE(r.concentrated);
  }
}

TEST(DotLabels, FullDifferentialIsAFilteredDeformation) {
  for (auto [psi, theta] : {std::pair{0, 4}, {0, 6}, {2, 6}})
    EXPECT_TRUE(lowers_dots_beyond_graded(build_bar_complex(psi, theta, -6, 0, MultMode::Full)))
        << psi << " " << theta;
  EXPECT_TRUE(lowers_dots_beyond_graded(build_bar_complex(0, 8, 12, 0, MultMode::Full)));
}

TEST(DotLabels, DetectsSameDotEntries) {
  GradedComplex c = build_bar_complex(0, 4, -4, 0, MultMode::Full);
  auto dots = [](const TensorWord &w) {
    int n = 0;
    for (const auto &f : w.factors)
      for (int d : f.dots)
        n += d;
    return n;
  };
  const auto &cols = c.basis.at(2);
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (dots(cols[i]) == 0) {
      c.differential.at(2).entries.push_back({0, static_cast<int>(i), mpq_class(7)});
      break;
    }
  EXPECT_FALSE(lowers_dots_beyond_graded(c));
}

TEST(BarComplex, EightStrandsTopOfWindow) {
  GradedComplex c = build_bar_complex(0, 8, 12, 0, MultMode::Full);
  EXPECT_TRUE(boundary_squared_zero(c));
  ConcentrationReport labels = dot_label_report(0, 8, 12);
  EXPECT_EQ(homology_table(c).entries, labels.table.entries);
}

TEST(BarDifferential, SquaresToZeroAtWeightEight) {
  // (2,8) is the first weight pair whose top products leave the cap span
  // with a nonzero remainder after a second merge
  for (auto [psi, theta] : {std::pair{0, 8}, {2, 8}, {4, 8}}) {
    GradedComplex c = build_bar_complex(psi, theta, 10, 0, MultMode::Full);
    EXPECT_TRUE(boundary_squared_zero(c)) << psi << " " << theta;
  }
}
