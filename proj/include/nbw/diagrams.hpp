#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nbw/qseries.hpp"

namespace nbw {

/**
 * CapDiagram: a basis element of the half algebra.
 *
 * `source` strands at the bottom; `caps` join pairs of bottom points
 * (1-based, a < b, sorted by left endpoint); `dots[i]` is the number of
 * dots at the left foot of caps[i]. Uncapped bottom points propagate to
 * the top in increasing order. The planar realization is always the one
 * with the fewest crossings.
 */
struct CapDiagram {
  int source = 0;
  std::vector<std::pair<int, int>> caps;
  std::vector<int> dots;

  int target() const { return source - 2 * static_cast<int>(caps.size()); }
  int total_dots() const;

  /** Sort caps by left endpoint (keeping dots attached) and validate. */
  void canonicalize();

  /** Throws InvalidWeights when the data is not a valid diagram. */
  void validate() const;

  /** True when caps are sorted, endpoints distinct and in range. */
  bool is_basis() const;

  /** Identity idempotent on `theta` strands. */
  static CapDiagram identity(int theta);

  /** Single cap (a,b) on `source` strands with `dots` dots. */
  static CapDiagram single(int source, int a, int b, int dots = 0);

  /** Bottom points that are not endpoints of a cap, ascending. */
  std::vector<int> propagating() const;

  std::string to_string() const;
  nlohmann::json to_json() const;
  static CapDiagram from_json(const nlohmann::json &j);

  auto operator<=>(const CapDiagram &) const = default;
  bool operator==(const CapDiagram &) const = default;
};

struct CapDiagramHash {
  std::size_t operator()(const CapDiagram &d) const;
};

/** Crossing count and degrees of a diagram. */
struct DegreeInfo {
  int crossings = 0;
  int degree = 0;   // 2 * dots - 2 * crossings
  int q_weight = 0; // contribution exponent to dim_q, equals -degree
};

DegreeInfo diagram_degree(const CapDiagram &d);

/** All diagrams with the given source, cap count and total dots at most
 *  `max_total_dots`, in canonical order. */
std::vector<CapDiagram> enumerate_caps(int source, int cap_count,
                                       int max_total_dots);

/** Dotless diagrams only, i.e. the matchings. */
std::vector<CapDiagram> enumerate_matchings(int source, int cap_count);

/** Y_{target,source}: sum over dotless diagrams of q^{2 crossings}. */
TruncSeries y_genfun(int target, int source);

/** T_{f,n} = Y_{n, 2f+n}. */
TruncSeries t_genfun(int f, int n);

/** Graded dimension of the dotted cup span from `bottom` up to `top`,
 *  exact on exponents >= window_min. */
TruncSeries x_dotted_dim(int top, int bottom, int window_min);

/** Graded dimension of e^target Y e^source including dots. */
TruncSeries y_dotted_dim(int target, int source, int window_min);

/** Pairwise relation between two segments i < j of a nesting pattern. */
enum class SegmentRelation { Disjoint, Crossing, Inside };

/**
 * NestingPattern: pairwise relations between n segments on a line.
 * rel(i,j) for i < j is Disjoint, Crossing, or Inside (segment j lies
 * inside segment i). Segments are 0-based.
 */
class NestingPattern {
public:
  explicit NestingPattern(int n = 0);

  int size() const { return n_; }
  SegmentRelation rel(int i, int j) const;
  void set(int i, int j, SegmentRelation r);

  /** k inside j and j inside i imply k inside i. */
  bool transitive() const;

  /** Searches for an interval configuration inducing the relations. */
  bool realizable() const;

  std::string to_string() const;
  nlohmann::json to_json() const;

  bool operator==(const NestingPattern &) const = default;
  auto operator<=>(const NestingPattern &) const = default;

private:
  int n_;
  std::vector<SegmentRelation> rel_;
};

/** Relations read from cap endpoints; propagating strands ignored. */
NestingPattern nesting_pattern(const CapDiagram &d);

/** Every pattern induced by a perfect matching on 2n points, with
 *  segments labeled by left endpoint, without repetition. */
std::vector<NestingPattern> all_realizable_patterns(int n);

} // namespace nbw
