#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nbw/algebra.hpp"
#include "nbw/koszul.hpp"
#include "nbw/qseries.hpp"

namespace nbw {

/** A rational combination of tensor words. */
using Chain = std::map<TensorWord, mpq_class>;

/** Sparse rational matrix in triplet form; entry (row, col, value). */
struct SparseMatrix {
  struct Entry {
    int row;
    int col;
    mpq_class value;
  };
  int rows = 0;
  int cols = 0;
  std::vector<Entry> entries;
};

/** Exact rank over the rationals. */
std::size_t exact_rank(const SparseMatrix &m);

/** Rank modulo the prime `p` (< 2^31); a lower bound for exact_rank. */
std::size_t rank_mod_p(const SparseMatrix &m, std::uint64_t p = 2147483647);

/**
 * The bar differential on words of e^psi I^{(x)k} e^theta:
 * a_1 (x) ... (x) a_k maps to sum_i (-1)^i a_1 (x) ... a_i a_{i+1} ... (x) a_k.
 *
 * In the full mode a product a_i a_{i+1} can have terms outside the cap
 * span, each of the form U o L with L a cap diagram and U cap-free. L takes
 * the place of the pair and U is multiplied into the factor above,
 * recursively; terms pushed past the top factor act by zero on the trivial
 * module and are dropped, as are factors without caps.
 */
class BarDifferential {
public:
  BarDifferential(int t, MultMode mode);

  Chain apply(const TensorWord &w) const;
  Chain apply(const Chain &c) const;

  /** Counters accumulated since construction. */
  std::size_t pushed_terms() const { return pushed_; }
  std::size_t dropped_at_top() const { return dropped_; }

private:
  void push_up(std::vector<CapDiagram> &factors, int j, const OutsideTerm &term,
               const mpq_class &c, Chain &out) const;

  HalfAlgebra *algebra_;
  mutable std::size_t pushed_ = 0;
  mutable std::size_t dropped_ = 0;
};

/**
 * GradedComplex: the words of e^psi I^{(x)k} e^theta for k = 1 .. (theta -
 * psi) / 2 with q-contribution >= q_min, and the differentials between
 * them. Every word of q-degree >= q_min is present, so each such degree
 * block is the exact complex; all degrees of the complex are trusted.
 */
struct GradedComplex {
  int psi = 0;
  int theta = 0;
  int q_min = 0;
  int t = 0;
  MultMode mode = MultMode::Full;

  /** basis[k]: words with k factors, sorted. */
  std::map<int, std::vector<TensorWord>> basis;

  /** degree[k][i]: q-contribution exponent of basis[k][i]. */
  std::map<int, std::vector<int>> degree;

  /** differential[k]: position k to position k-1, rows index basis[k-1]. */
  std::map<int, SparseMatrix> differential;

  std::size_t pushed_terms = 0;
  std::size_t dropped_at_top = 0;

  int top_position() const { return (theta - psi) / 2; }
  bool empty() const { return basis.empty(); }
  std::size_t size() const;

  /** Index of `w` in basis[k], or -1. */
  int index_of(int k, const TensorWord &w) const;

  /** The q-degrees occurring at any position, ascending. */
  std::vector<int> q_degrees() const;

  /** Graded dimension of position k, exact on exponents >= q_min. */
  TruncSeries graded_dim(int k) const;
};

/** Largest q-contribution of a word from theta down to psi (dotless). */
int max_word_weight(int psi, int theta);

/** Builds the complex; parity mismatch or psi >= theta gives an empty one.
 *  Words are differentiated on `threads` workers (0: hardware count). */
GradedComplex build_bar_complex(int psi, int theta, int q_min, int t,
                                MultMode mode, unsigned threads = 0);

/** The words whose factors carry no dots, in every q-degree. In the graded
 *  mode these span a subcomplex. */
GradedComplex build_dotless_bar_complex(int psi, int theta, int t, MultMode mode,
                                        unsigned threads = 0);

/** True when every composite differential vanishes exactly. */
bool boundary_squared_zero(const GradedComplex &c);

/**
 * HomologyTable: dimensions of H_k at each q-degree. Entries are only
 * stored where nonzero; degrees >= q_min are trusted.
 */
struct HomologyTable {
  int psi = 0;
  int theta = 0;
  int q_min = 0;
  std::map<std::pair<int, int>, long> entries; // (hom_degree, q_degree)

  long dim(int k, int q) const;

  /** Positions with a nonzero entry. */
  std::vector<int> nonzero_positions() const;

  /** sum_q dim H_k(q) q^q, exact on exponents >= q_min. */
  TruncSeries series(int k) const;

  /** Rows {theta, psi, hom_degree, q_degree, dim, trusted}. */
  nlohmann::json to_json() const;
};

/** Per q-degree block ranks, computed in parallel on `threads` workers. */
HomologyTable homology_table(const GradedComplex &c, unsigned threads = 0);

struct ConcentrationReport {
  bool concentrated = false;
  int at = 0;
  TruncSeries dims;
  HomologyTable table;
};

/** Homology vanishes in the window except at k = (theta - psi) / 2. */
ConcentrationReport concentration_report(int psi, int theta, int q_min,
                                         int t = 0,
                                         MultMode mode = MultMode::Full);

/** True when, on every word, the differential of `full` minus the graded
 *  differential is supported on words with strictly fewer dots. Then the
 *  dot filtration makes the graded complex the associated graded of `full`,
 *  and homology concentrated in one position for the graded complex is
 *  concentrated there, with the same dimensions, for `full`. */
bool lowers_dots_beyond_graded(const GradedComplex &full, unsigned threads = 0);

/**
 * Homology of the graded-mode complex at t = 0 from its dotless words.
 * Every arc of the composite of a word is one cap of one factor, and dots
 * travel with their arc through graded products, so the complex splits into
 * copies of the dotless complex, one per labelling of the (theta - psi) / 2
 * arcs by dot counts, shifted by q^{-2 dots}. The table is exact on q >= q_min.
 */
ConcentrationReport dot_label_report(int psi, int theta, int q_min, unsigned threads = 0);

/** sum_k (-1)^k graded_dim(k). */
TruncSeries euler_characteristic(const GradedComplex &c);

/** sum_k (-1)^k dim_q e^psi I^{(x)k} e^theta from the dotted cap counts,
 *  without building the complex. */
TruncSeries chain_euler_series(int psi, int theta, int window_min);

struct CycleClass {
  bool is_cycle = false;
  bool nonzero_class = false;
};

/** Throws PositionMismatch unless every word of `w` has k factors and
 *  lies in basis[k]. */
CycleClass cycle_class_check(const Chain &w, const GradedComplex &c);

/**
 * Bar homology Ext^i_j(k, k) of a quadratic algebra for i <= hom_max,
 * keyed (i, j) with j the generator weight.
 */
std::map<std::pair<int, int>, long>
quad_bar_homology(const QuadraticPresentation &p, int hom_max);

} // namespace nbw
