#include "nbw/characters.hpp"

#include <map>

#include "nbw/diagrams.hpp"
#include "nbw/error.hpp"
#include "nbw/homology.hpp"

namespace nbw {

namespace {

TruncSeries zero_series(int window_min) { return TruncSeries::truncated({}, window_min, 0); }

/** 1 + q^2 + ... + q^{top}. */
TruncSeries even_run(int top) {
  std::map<int, mpz_class> c;
  for (int e = 0; e <= top; e += 2)
    c[e] = 1;
  return TruncSeries::polynomial(c);
}

mpz_class binomial(int n, int k) {
  if (k < 0 || k > n)
    return 0;
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

/** Coefficient of t^k in prod_g 1/(1 - t q^g) over the given exponents,
 *  dropping exponents below `floor`. */
std::map<int, mpz_class> free_commutative_piece(const std::vector<int> &gens, int k, int floor) {
  std::vector<std::map<int, mpz_class>> coef(static_cast<std::size_t>(k) + 1);
  coef[0][0] = 1;
  for (int g : gens)
    for (int j = 1; j <= k; ++j)
      for (const auto &[e, c] : coef[static_cast<std::size_t>(j) - 1])
        if (e + g >= floor)
          coef[static_cast<std::size_t>(j)][e + g] += c;
  return coef[static_cast<std::size_t>(k)];
}

/** Exponent vectors of total degree d in `vars` variables. */
void monomials(int vars, int d, std::vector<int> &cur, std::vector<std::vector<int>> &out) {
  if (static_cast<int>(cur.size()) == vars - 1) {
    cur.push_back(d);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int a = d; a >= 0; --a) {
    cur.push_back(a);
    monomials(vars, d - a, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> monomials(int vars, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  if (vars == 0) {
    if (d == 0)
      out.push_back({});
    return out;
  }
  monomials(vars, d, cur, out);
  return out;
}

} // namespace

TruncSeries oldelta_char(int theta, int psi, int window_min) {
  if (theta < 0 || psi < theta || (psi - theta) % 2 != 0)
    return zero_series(window_min);
  TruncSeries f = qfact(static_cast<unsigned>(theta));
  TruncSeries x = x_dotted_dim(psi, theta, window_min - f.max_deg());
  return series_mul(x, f, window_min);
}

TruncSeries bww_check(int psi, int window_min) {
  TruncSeries sum = zero_series(window_min);
  for (int k = 0; 2 * k <= psi; ++k) {
    TruncSeries od = oldelta_char(2 * k, psi, window_min + k);
    TruncSeries m = m_theta(static_cast<unsigned>(k), window_min - od.max_deg());
    TruncSeries term = series_mul(m, od, window_min);
    sum = k % 2 ? series_sub(sum, term) : series_add(sum, term);
  }
  return sum;
}

TruncSeries ext_dim_formula(unsigned n, int window_min) {
  TruncSeries f = qfact(2 * n);
  return series_mul(f, m_theta(n, window_min - f.max_deg()), window_min);
}

TruncSeries ext_dim_product_form(unsigned n, int window_min) {
  TruncSeries num = TruncSeries::constant(1);
  for (unsigned j = 2; j <= n; ++j)
    num = series_mul(num, even_run(4 * static_cast<int>(j) - 4));
  const int w = window_min - num.max_deg();
  TruncSeries den = series_pow(geometric(2, w), n, w);
  return series_mul(num, den, window_min);
}

TruncSeries ext_structure_hilbert(int theta, int window_min) {
  if (theta < 0 || theta % 2 != 0)
    throw Error(ErrorKind::PreconditionViolated, "theta must be even");
  TruncSeries num = TruncSeries::constant(1);
  for (int i = 1; 2 * i <= theta; ++i)
    num = series_mul(num, TruncSeries::polynomial({{0, 1}, {-2 * (2 * i - 1), -1}}));
  TruncSeries den = series_pow(geometric(2, window_min), static_cast<unsigned>(theta), window_min);
  return series_mul(num, den, window_min);
}

TruncSeries ext_structure_oracle(int theta, int deg_bound) {
  if (theta < 0 || theta % 2 != 0)
    throw Error(ErrorKind::PreconditionViolated, "theta must be even");
  std::map<int, mpz_class> dims;
  for (int d = 0; -2 * d >= deg_bound; ++d) {
    std::vector<std::vector<int>> monos = monomials(theta, d);
    std::map<std::vector<int>, int> index;
    for (std::size_t i = 0; i < monos.size(); ++i)
      index[monos[i]] = static_cast<int>(i);
    SparseMatrix m;
    m.cols = static_cast<int>(monos.size());
    for (int j = 1; j <= theta - 1 && j <= d; j += 2)
      for (const auto &base : monomials(theta, d - j)) {
        for (int v = 0; v < theta; ++v) {
          std::vector<int> e = base;
          e[static_cast<std::size_t>(v)] += j;
          m.entries.push_back({m.rows, index.at(e), mpq_class(1)});
        }
        ++m.rows;
      }
    long dim = static_cast<long>(monos.size()) - static_cast<long>(exact_rank(m));
    if (dim != 0)
      dims[-2 * d] = dim;
  }
  return TruncSeries::truncated(dims, deg_bound, 0);
}

SymPieces sym_piece_dims(int theta, int k, int window_min) {
  if (theta < 0 || theta % 2 != 0)
    throw Error(ErrorKind::PreconditionViolated, "theta must be even");
  if (k < 0)
    throw Error(ErrorKind::PreconditionViolated, "k must be nonnegative");
  SymPieces out;
  std::vector<int> power_sums;
  for (int i = 1; 2 * i <= theta; ++i)
    power_sums.push_back(-4 * i);
  const int lowest = k * (power_sums.empty() ? 0 : power_sums.back());
  out.E = TruncSeries::polynomial(free_commutative_piece(power_sums, k, lowest));

  std::vector<int> gamma;
  for (int i = 1; i <= theta; ++i)
    gamma.push_back(-2 * i);
  for (int i = 2; -i >= window_min; i += 4)
    gamma.push_back(-i);
  out.M = TruncSeries::truncated(free_commutative_piece(gamma, k, window_min), window_min, 0);
  return out;
}

mpz_class pie_identity(int n, int k) {
  if (k < 0 || n < 0 || k > n)
    throw Error(ErrorKind::PreconditionViolated, "need 0 <= k <= n");
  mpz_class sum = 0;
  for (int i = 0; i <= n; ++i) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(i), static_cast<unsigned long>(k));
    mpz_class term = binomial(n + 1, i + 1) * p;
    sum += (n - i) % 2 ? -term : term;
  }
  return sum;
}

mpz_class finite_difference_check(const std::vector<mpz_class> &poly, int n) {
  mpz_class sum = 0;
  for (int i = 0; i <= n; ++i) {
    mpz_class value = 0, power = 1;
    for (const auto &c : poly) {
      value += c * power;
      power *= i;
    }
    mpz_class term = binomial(n, i) * value;
    sum += i % 2 ? -term : term;
  }
  return sum;
}

std::vector<BggRow> bgg_report(int n_max, int window_min) {
  std::vector<BggRow> rows;
  for (int n = 0; n <= n_max; ++n) {
    const unsigned un = static_cast<unsigned>(n);
    for (int psi = 2 * n; psi <= 2 * n_max; psi += 2) {
      TruncSeries od = oldelta_char(2 * n, psi, window_min + n);
      TruncSeries m = m_theta(un, window_min - od.max_deg());
      rows.push_back({n, psi, series_mul(m, od, window_min), "term_character", true});
    }

    TruncSeries head = series_shift(qfact(2 * un), -n);
    TruncSeries filtered = zero_series(window_min);
    for (int k = 0; -4 * k + head.max_deg() >= window_min; ++k) {
      SymPieces s = sym_piece_dims(2 * n, k, window_min);
      TruncSeries piece = series_mul(head, s.E);
      filtered = series_add(filtered, piece.truncate(window_min));
    }
    rows.push_back({n, 2 * n, filtered, "filtration",
                    equal_on_window(filtered, ext_dim_formula(un, window_min), window_min)});

    TruncSeries gr0 = series_mul(series_shift(oldelta_char(2 * n, 2 * n, window_min), -n),
                                 sym_piece_dims(2 * n, 0, window_min).E);
    rows.push_back({n, 2 * n, gr0, "head", equal_on_window(gr0, head, window_min)});
  }
  for (int psi = 0; psi <= 2 * n_max; psi += 2) {
    TruncSeries alt = bww_check(psi, window_min);
    TruncSeries expect = psi == 0 ? TruncSeries::constant(1) : zero_series(window_min);
    rows.push_back({psi / 2, psi, alt, "alternating_sum", equal_on_window(alt, expect, window_min)});
  }
  return rows;
}

nlohmann::json to_json(const BggRow &row) {
  return {{"n", row.n},
          {"psi", row.psi},
          {"series", row.series.to_json()},
          {"check_name", row.check_name},
          {"pass", row.pass}};
}

} // namespace nbw
