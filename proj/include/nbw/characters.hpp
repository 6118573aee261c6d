#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "json.hpp"
#include "nbw/qseries.hpp"

namespace nbw {

/** Graded dimension of a weight space of some module. */
struct CharacterRow {
  int psi = 0;
  TruncSeries series;
};

/** Weight-psi space of the proper standard module of weight theta:
 *  x_dotted_dim(psi, theta) [theta]!, zero unless psi >= theta with the
 *  same parity. Exact on exponents >= window_min. */
TruncSeries oldelta_char(int theta, int psi, int window_min);

/** sum_k (-1)^k m_{2k}(q) oldelta_char(2k, psi), which should be 1 at
 *  psi = 0 and 0 otherwise. */
TruncSeries bww_check(int psi, int window_min);

/** q^{-n} [2n]! / prod_{i=1..n} (1 - q^{-4i}). */
TruncSeries ext_dim_formula(unsigned n, int window_min);

/** prod_{j=2..n} (1 + q^2 + ... + q^{4j-4}) / (1 - q^{-2})^n. */
TruncSeries ext_dim_product_form(unsigned n, int window_min);

/** (1 - q^-2)(1 - q^-6)...(1 - q^{-2(theta-1)}) / (1 - q^-2)^theta for
 *  even theta. */
TruncSeries ext_structure_hilbert(int theta, int window_min);

/** Hilbert series of k[X_1..X_theta] / (p_1, p_3, ..., p_{theta-1}) with
 *  deg X_i = q^-2, by exact linear algebra on monomials down to q^deg_bound. */
TruncSeries ext_structure_oracle(int theta, int deg_bound);

struct SymPieces {
  TruncSeries E; // k[p_2, ..., p_theta] in symmetric degree k
  TruncSeries M; // t^k coefficient of the generating function of Sym_Gamma(theta)
};

/** E: deg p_{2i} = q^{-4i}; M: coefficient of t^k in
 *  prod_{i=1..theta} 1/(1 - t q^{-2i}) prod_{0<i=2 mod 4} 1/(1 - t q^{-i}). */
SymPieces sym_piece_dims(int theta, int k, int window_min);

/** sum_{i=0..n} (-1)^{n-i} C(n+1, i+1) i^k with 0^0 = 1; throws
 *  PreconditionViolated when k > n. */
mpz_class pie_identity(int n, int k);

/** sum_{i=0..n} (-1)^i C(n, i) P(i) for P given by its coefficients in
 *  increasing degree. */
mpz_class finite_difference_check(const std::vector<mpz_class> &poly, int n);

/** One line of the resolution report. */
struct BggRow {
  int n = 0;
  int psi = 0;
  TruncSeries series;
  std::string check_name;
  bool pass = true;
};

/**
 * For n <= n_max: the term characters m_{2n} oldelta_char(2n, psi) for
 * psi <= 2 n_max ("term_character"), the filtration identity
 * sum_k q^-n [2n]! E_{2n,k} = ext_dim_formula(n) ("filtration"), the head
 * dimension q^-n [2n]! ("head") and the alternating sum over n of the term
 * characters at each psi ("alternating_sum").
 */
std::vector<BggRow> bgg_report(int n_max, int window_min);

/** {n, psi, series, check_name, pass}. */
nlohmann::json to_json(const BggRow &row);

} // namespace nbw
