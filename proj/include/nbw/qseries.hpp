#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>

#include "json.hpp"

namespace nbw {

/**
 * TruncSeries: an integer Laurent series in q, exact on a window.
 *
 * Represents S(q) = sum_e coeff_e q^e with every exponent <= max_deg.
 * Coefficients are exact for exponents >= trust_min; a series with no
 * trust_min is a finitely supported Laurent polynomial, exact everywhere.
 * Coefficients below trust_min are never stored.
 */
class TruncSeries {
public:
  /** The zero polynomial. */
  TruncSeries();

  /** The constant polynomial c. */
  static TruncSeries constant(long c);

  /** The monomial c q^e. */
  static TruncSeries monomial(int e, long c = 1);

  /** A polynomial from an exponent to coefficient map. */
  static TruncSeries polynomial(const std::map<int, mpz_class> &coeffs);

  /**
   * A truncated series: coefficients exact for exponents >= trust_min,
   * max_deg the largest possibly nonzero exponent.
   */
  static TruncSeries truncated(const std::map<int, mpz_class> &coeffs,
                               int trust_min, int max_deg);

  const std::map<int, mpz_class> &coeffs() const { return coeffs_; }
  int max_deg() const { return max_deg_; }
  std::optional<int> trust_min() const { return trust_min_; }
  bool is_polynomial() const { return !trust_min_.has_value(); }

  /** Coefficient of q^e (zero when not stored). */
  mpz_class coeff(int e) const;

  /** True when no coefficient is stored. */
  bool is_zero() const { return coeffs_.empty(); }

  /** Smallest stored exponent; max_deg when the series is zero. */
  int min_stored() const;

  /** Drop every coefficient below `window_min` and mark the series
   *  as trusted only from there on. */
  TruncSeries truncate(int window_min) const;

  TruncSeries operator-() const;

  /** Compact human-readable rendering, e.g. "q^2 - 2q^-4 + O(q^-7)". */
  std::string to_string() const;

  nlohmann::json to_json() const;
  static TruncSeries from_json(const nlohmann::json &j);

private:
  void normalize();

  std::map<int, mpz_class> coeffs_;
  int max_deg_ = 0;
  std::optional<int> trust_min_;
};

TruncSeries series_add(const TruncSeries &a, const TruncSeries &b);
TruncSeries series_sub(const TruncSeries &a, const TruncSeries &b);
TruncSeries series_mul(const TruncSeries &a, const TruncSeries &b);

/** Multiplication that also drops everything below `window_min`. */
TruncSeries series_mul(const TruncSeries &a, const TruncSeries &b,
                       int window_min);

/** a^k for k >= 0, truncated at `window_min` after each step. */
TruncSeries series_pow(const TruncSeries &a, unsigned k, int window_min);

/** Bar involution q -> q^-1; only defined on polynomials. */
TruncSeries series_bar(const TruncSeries &a);

/** Multiplicative inverse of a series with constant term +-1 and no
 *  positive exponents, exact on exponents >= window_min. */
TruncSeries geom_inverse(const TruncSeries &a, int window_min);

/** Multiply by q^shift. */
TruncSeries series_shift(const TruncSeries &a, int shift);

/** Multiply by an integer. */
TruncSeries series_scale(const TruncSeries &a, const mpz_class &c);

/** Lowest exponent on which both series are trusted. */
std::optional<int> common_trust(const TruncSeries &a, const TruncSeries &b);

/**
 * Equality on the common trusted window: coefficients agree for every
 * exponent >= common_trust(a, b), and also >= `floor` when given.
 */
bool equal_on_window(const TruncSeries &a, const TruncSeries &b,
                     std::optional<int> floor = std::nullopt);

/** Balanced quantum integer [m] = q^{m-1} + q^{m-3} + ... + q^{1-m}. */
TruncSeries qint(unsigned m);

/** Quantum factorial [m]! = [1][2]...[m]. */
TruncSeries qfact(unsigned m);

/** 1/(1 - q^{-step}) exact on exponents >= window_min. */
TruncSeries geometric(int step, int window_min);

/** m_{2n}(q) = q^{-n} / prod_{i=1..n} (1 - q^{-4i}). */
TruncSeries m_theta(unsigned n, int window_min);

} // namespace nbw
