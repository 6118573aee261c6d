#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "nbw/diagrams.hpp"

namespace nbw {

/**
 * AlgebraElement: a rational combination of basis diagrams, all with
 * the same source and target weights. Zero coefficients are never stored.
 */
struct AlgebraElement {
  int source = 0;
  int target = 0;
  std::map<CapDiagram, mpq_class> terms;

  AlgebraElement() = default;
  AlgebraElement(int source_weight, int target_weight);

  /** The element 1 * d. */
  static AlgebraElement basis(const CapDiagram &d);

  bool is_zero() const { return terms.empty(); }
  mpq_class coeff(const CapDiagram &d) const;

  /** Adds c * d, dropping the key when the coefficient cancels. */
  void add(const CapDiagram &d, const mpq_class &c);
  void add(const AlgebraElement &other, const mpq_class &c = 1);

  AlgebraElement scaled(const mpq_class &c) const;

  std::string to_string() const;
  nlohmann::json to_json() const;

  bool operator==(const AlgebraElement &) const = default;
};

enum class SliceKind : std::uint8_t { Cap, Cup, Cross, Dot };

/** One horizontal slice of a planar tangle, acting at strand positions
 *  pos and pos+1 (pos only for dots). Positions are 0-based. */
struct Slice {
  SliceKind kind;
  int pos;
  bool operator==(const Slice &) const = default;
};

/**
 * RawDiagram: a planar tangle before normalization, stored as a stack
 * of slices from bottom to top over `source` bottom strands. A Cap joins
 * two strands from below, a Cup creates two strands on top, a Cross swaps
 * two neighbours, a Dot sits on one strand.
 */
struct RawDiagram {
  int source = 0;
  std::vector<Slice> slices;

  int target() const;

  /** Throws MalformedRaw when a slice position is out of range. */
  void validate() const;

  /** A minimal-crossing realization of a basis diagram with every dot
   *  at the left foot of its cap. */
  static RawDiagram from_basis(const CapDiagram &d);

  /** `top` placed above `bottom`; needs bottom.target() == top.source. */
  static RawDiagram stack(const RawDiagram &top, const RawDiagram &bottom);

  std::string key() const;
};

/** Full multiplication or the associated graded one for the dot
 *  filtration, which discards every correction term with fewer dots. */
enum class MultMode { Full, Graded };

/**
 * OutsideTerm: a basis tangle of the full category that factors as
 * upper() o lower with lower a cap basis diagram. The upper part has no
 * caps: the propagating strand starting at the i-th free top point of
 * lower ends at top position perm[i] with dots[i] dots at its top end.
 * Cups are top-top arcs at 0-based positions, dotted at their left end.
 */
struct OutsideTerm {
  struct Cup {
    int left;
    int right;
    int dots;
    auto operator<=>(const Cup &) const = default;
    bool operator==(const Cup &) const = default;
  };
  CapDiagram lower;
  std::vector<int> perm;
  std::vector<int> dots;
  std::vector<Cup> cups;

  int target() const;
  RawDiagram upper() const;
  RawDiagram raw() const;
  std::string to_string() const;

  auto operator<=>(const OutsideTerm &) const = default;
  bool operator==(const OutsideTerm &) const = default;
};

/**
 * NormalForm: a rewritten tangle split into its part in the cap span and
 * the remaining basis tangles of the full category, which carry a dotted
 * propagating strand, crossing propagating strands or a cup.
 */
struct NormalForm {
  AlgebraElement inside;
  std::map<OutsideTerm, mpq_class> outside;
};

/** Rewrites a tangle in the full category. Positive-degree bubbles are
 *  set to zero and an undotted free loop evaluates to t. */
NormalForm normal_form(const RawDiagram &raw, int t,
                       MultMode mode = MultMode::Full);

/** As normal_form, throwing OutsideHalfAlgebra when a term leaves the cap
 *  span. */
AlgebraElement normalize(const RawDiagram &raw, int t,
                         MultMode mode = MultMode::Full);

/**
 * HalfAlgebra: multiplication in the half algebra at a fixed t and mode,
 * with caches that are safe for concurrent use.
 *
 * product() is the exact product of two basis diagrams in the full
 * category. It can leave the cap span in the full mode once a cap carries
 * two or more dots: {4,(2,4),x2} * {6,(1,4)} contains caps (1,2),(3,4)
 * below a crossing of the two remaining strands. multiply() keeps the
 * cap-span part only, so it is not associative in general; the bar
 * complexes use product() and absorb() instead.
 */
class HalfAlgebra {
public:
  HalfAlgebra(int t, MultMode mode);

  int t() const { return t_; }
  MultMode mode() const { return mode_; }

  /** u above v with source(u) = target(v), exact. */
  const NormalForm &product(const CapDiagram &u, const CapDiagram &v);

  /** u above the upper part of `outside`, exact. */
  const NormalForm &absorb(const CapDiagram &u, const OutsideTerm &outside);

  /** Cap-span part of the exact product. */
  AlgebraElement multiply_basis(const CapDiagram &u, const CapDiagram &v);
  AlgebraElement multiply(const AlgebraElement &u, const AlgebraElement &v);

  std::size_t cache_size() const;

  /** Number of cached basis products with a nonzero outside part. */
  std::size_t projected_products() const;

private:
  int t_;
  MultMode mode_;
  mutable std::shared_mutex mutex_;
  std::map<std::pair<CapDiagram, CapDiagram>, NormalForm> products_;
  std::map<std::pair<CapDiagram, OutsideTerm>, NormalForm> absorbed_;
};

/** Process-wide instance for the given parameters. */
HalfAlgebra &half_algebra(int t, MultMode mode);

AlgebraElement multiply(const AlgebraElement &u, const AlgebraElement &v,
                        int t);
AlgebraElement gr_multiply(const AlgebraElement &u, const AlgebraElement &v,
                           int t = 0);

/**
 * TensorWord: factors d_1 (top) ... d_k (bottom) with
 * target(d_{i+1}) = source(d_i), each having at least one cap.
 */
struct TensorWord {
  std::vector<CapDiagram> factors;

  int source() const { return factors.back().source; }
  int target() const { return factors.front().target(); }
  int q_weight() const;
  void validate() const;

  std::string to_string() const;
  nlohmann::json to_json() const;

  auto operator<=>(const TensorWord &) const = default;
  bool operator==(const TensorWord &) const = default;
};

/** Dotless word capping the outermost pair of 2n, 2n-2, ..., 2 strands;
 *  factors listed top first. */
TensorWord vplus(int n);

} // namespace nbw
