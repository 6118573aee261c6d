#pragma once

#include <gmpxx.h>

#include <array>
#include <string>
#include <vector>

#include "json.hpp"
#include "nbw/diagrams.hpp"

namespace nbw {

/**
 * QuadraticPresentation: the algebra generated by x_1 .. x_n modulo a
 * subspace of quadratic relations. A relation is a vector of length n^2
 * whose entry i * n + j is the coefficient of x_i x_j (0-based). The
 * relations are kept in reduced row echelon form.
 */
struct QuadraticPresentation {
  int n_gen = 0;
  std::vector<std::vector<mpq_class>> relations;
  std::vector<std::string> labels;

  QuadraticPresentation() = default;
  QuadraticPresentation(int n, std::vector<std::vector<mpq_class>> rows);

  /** Coordinate of x_i x_j. */
  int index(int i, int j) const { return i * n_gen + j; }

  /** Brings the relations to reduced row echelon form. */
  void reduce();

  /** Equal relation subspaces (both sides are reduced). */
  bool same_relations(const QuadraticPresentation &o) const {
    return n_gen == o.n_gen && relations == o.relations;
  }

  std::string to_string() const;

  /** {"n_gen": n, "relations": [[["p/q", i, j], ...], ...]}, 1-based. */
  nlohmann::json to_json() const;
  static QuadraticPresentation from_json(const nlohmann::json &j);
};

/** x_i^2 = 0; for i < j, x_j x_i = 0 when j lies inside i, otherwise
 *  x_i x_j = x_j x_i. Throws TransitivityViolation for a pattern whose
 *  containments are not transitive. */
QuadraticPresentation pattern_algebra(const NestingPattern &p);

/** Relations of the dual: the annihilator of the relations under
 *  <x_i x_j, theta_k theta_l> = delta_ik delta_jl. */
QuadraticPresentation quadratic_dual(const QuadraticPresentation &p);

/** dim A_m for m = 0 .. deg_max. */
std::vector<long> hilbert_series(const QuadraticPresentation &p, int deg_max);

struct KoszulCheck {
  bool hilbert_ok = false;
  bool diagonal_ok = false;
  std::vector<long> hilbert;
  std::vector<long> dual_hilbert;
  /** Nonzero Ext^i_j with i != j as (i, j, dim). */
  std::vector<std::array<long, 3>> off_diagonal;
};

/** hilbert_ok: H_A(t) H_{A^!}(-t) = 1 mod t^{deg_max + 1}; diagonal_ok:
 *  the bar homology vanishes off the diagonal up to weight deg_max. */
KoszulCheck koszul_check(const QuadraticPresentation &p, int deg_max);

/** k<x_1, x_2, x_3>/(x_1 x_3 - x_3 x_1, x_1 x_2, x_2 x_1). */
QuadraticPresentation non_koszul_example();

/** k[x]/(x^2). */
QuadraticPresentation dual_numbers();

/** Free algebra on n generators. */
QuadraticPresentation free_algebra(int n);

/** Number of m-element sets of segments that admit an ordering with no
 *  adjacent pair x_a x_b killed by the pattern. */
long pattern_subset_count(const NestingPattern &p, int m);

} // namespace nbw
