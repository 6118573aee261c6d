#include "nbw/qseries.hpp"

#include <algorithm>
#include <climits>
#include <sstream>

#include "nbw/error.hpp"

namespace nbw {

TruncSeries::TruncSeries() = default;

TruncSeries TruncSeries::constant(long c) { return monomial(0, c); }

TruncSeries TruncSeries::monomial(int e, long c) {
  TruncSeries s;
  s.coeffs_[e] = c;
  s.normalize();
  return s;
}

TruncSeries TruncSeries::polynomial(const std::map<int, mpz_class> &coeffs) {
  TruncSeries s;
  s.coeffs_ = coeffs;
  s.normalize();
  return s;
}

TruncSeries TruncSeries::truncated(const std::map<int, mpz_class> &coeffs,
                                   int trust_min, int max_deg) {
  TruncSeries s;
  s.coeffs_ = coeffs;
  s.trust_min_ = trust_min;
  s.max_deg_ = max_deg;
  s.normalize();
  return s;
}

void TruncSeries::normalize() {
  for (auto it = coeffs_.begin(); it != coeffs_.end();) {
    bool below = trust_min_ && it->first < *trust_min_;
    if (it->second == 0 || below)
      it = coeffs_.erase(it);
    else
      ++it;
  }
  if (!trust_min_) {
    max_deg_ = coeffs_.empty() ? 0 : coeffs_.rbegin()->first;
  } else {
    if (!coeffs_.empty())
      max_deg_ = std::max(max_deg_, coeffs_.rbegin()->first);
  }
}

mpz_class TruncSeries::coeff(int e) const {
  auto it = coeffs_.find(e);
  return it == coeffs_.end() ? mpz_class(0) : it->second;
}

int TruncSeries::min_stored() const {
  return coeffs_.empty() ? max_deg_ : coeffs_.begin()->first;
}

TruncSeries TruncSeries::truncate(int window_min) const {
  TruncSeries s = *this;
  s.trust_min_ = trust_min_ ? std::max(*trust_min_, window_min) : window_min;
  s.max_deg_ = max_deg_;
  s.normalize();
  return s;
}

TruncSeries TruncSeries::operator-() const {
  TruncSeries s = *this;
  for (auto &[e, c] : s.coeffs_)
    c = -c;
  return s;
}

std::string TruncSeries::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    const auto &[e, c] = *it;
    mpz_class mag = abs(c);
    if (first)
      out << (c < 0 ? "-" : "");
    else
      out << (c < 0 ? " - " : " + ");
    first = false;
    if (e == 0) {
      out << mag.get_str();
      continue;
    }
    if (mag != 1)
      out << mag.get_str();
    out << "q";
    if (e != 1)
      out << "^" << e;
  }
  if (first)
    out << "0";
  if (trust_min_)
    out << " + O(q^" << (*trust_min_ - 1) << ")";
  return out.str();
}

nlohmann::json TruncSeries::to_json() const {
  nlohmann::json j;
  j["trust_min"] = trust_min_ ? nlohmann::json(*trust_min_) : nlohmann::json();
  j["max_deg"] = max_deg_;
  nlohmann::json cs = nlohmann::json::object();
  for (const auto &[e, c] : coeffs_) {
    if (c.fits_slong_p())
      cs[std::to_string(e)] = c.get_si();
    else
      cs[std::to_string(e)] = c.get_str();
  }
  j["coeffs"] = cs;
  return j;
}

TruncSeries TruncSeries::from_json(const nlohmann::json &j) {
  std::map<int, mpz_class> coeffs;
  for (const auto &[key, value] : j.at("coeffs").items()) {
    mpz_class c = value.is_string() ? mpz_class(value.get<std::string>())
                                    : mpz_class(value.get<long>());
    coeffs[std::stoi(key)] = c;
  }
  if (j.at("trust_min").is_null())
    return polynomial(coeffs);
  return truncated(coeffs, j.at("trust_min").get<int>(),
                   j.at("max_deg").get<int>());
}

TruncSeries series_add(const TruncSeries &a, const TruncSeries &b) {
  std::map<int, mpz_class> out = a.coeffs();
  for (const auto &[e, c] : b.coeffs())
    out[e] += c;
  auto trust = common_trust(a, b);
  if (!trust)
    return TruncSeries::polynomial(out);
  return TruncSeries::truncated(out, *trust, std::max(a.max_deg(), b.max_deg()));
}

TruncSeries series_sub(const TruncSeries &a, const TruncSeries &b) {
  return series_add(a, -b);
}

std::optional<int> common_trust(const TruncSeries &a, const TruncSeries &b) {
  if (a.trust_min() && b.trust_min())
    return std::max(*a.trust_min(), *b.trust_min());
  if (a.trust_min())
    return a.trust_min();
  return b.trust_min();
}

TruncSeries series_mul(const TruncSeries &a, const TruncSeries &b) {
  std::optional<int> trust;
  if (a.trust_min())
    trust = *a.trust_min() + b.max_deg();
  if (b.trust_min()) {
    int tb = *b.trust_min() + a.max_deg();
    trust = trust ? std::max(*trust, tb) : tb;
  }
  std::map<int, mpz_class> out;
  for (const auto &[ea, ca] : a.coeffs())
    for (const auto &[eb, cb] : b.coeffs()) {
      int e = ea + eb;
      if (trust && e < *trust)
        continue;
      out[e] += ca * cb;
    }
  if (!trust)
    return TruncSeries::polynomial(out);
  return TruncSeries::truncated(out, *trust, a.max_deg() + b.max_deg());
}

TruncSeries series_mul(const TruncSeries &a, const TruncSeries &b,
                       int window_min) {
  std::map<int, mpz_class> out;
  for (const auto &[ea, ca] : a.coeffs())
    for (const auto &[eb, cb] : b.coeffs())
      if (ea + eb >= window_min)
        out[ea + eb] += ca * cb;
  int trust = window_min;
  if (a.trust_min())
    trust = std::max(trust, *a.trust_min() + b.max_deg());
  if (b.trust_min())
    trust = std::max(trust, *b.trust_min() + a.max_deg());
  return TruncSeries::truncated(out, trust, a.max_deg() + b.max_deg());
}

TruncSeries series_pow(const TruncSeries &a, unsigned k, int window_min) {
  TruncSeries r = TruncSeries::constant(1);
  if (a.is_polynomial()) {
    for (unsigned i = 0; i < k; ++i)
      r = series_mul(r, a);
    return r.min_stored() < window_min ? r.truncate(window_min) : r;
  }
  for (unsigned i = 0; i < k; ++i)
    r = series_mul(r, a, window_min);
  return r;
}

TruncSeries series_bar(const TruncSeries &a) {
  if (!a.is_polynomial())
    throw Error(ErrorKind::BarOfInfiniteSeries,
                "bar involution needs a finitely supported series");
  std::map<int, mpz_class> out;
  for (const auto &[e, c] : a.coeffs())
    out[-e] = c;
  return TruncSeries::polynomial(out);
}

TruncSeries geom_inverse(const TruncSeries &a, int window_min) {
  mpz_class c0 = a.coeff(0);
  bool positive = !a.coeffs().empty() && a.coeffs().rbegin()->first > 0;
  if (positive || a.max_deg() > 0 || (c0 != 1 && c0 != -1))
    throw Error(ErrorKind::NotInvertible,
                "constant term must be +-1 with no positive exponents");
  int trust = window_min;
  if (a.trust_min())
    trust = std::max(trust, *a.trust_min());
  // b_0 = 1/c0, b_{-n} = -(1/c0) sum_{i=1..n} a_{-i} b_{-(n-i)}
  std::map<int, mpz_class> b;
  b[0] = c0;
  for (int n = 1; -n >= trust; ++n) {
    mpz_class acc = 0;
    for (const auto &[e, c] : a.coeffs()) {
      int i = -e;
      if (i < 1 || i > n)
        continue;
      auto it = b.find(-(n - i));
      if (it != b.end())
        acc += c * it->second;
    }
    b[-n] = -c0 * acc;
  }
  if (a.is_polynomial() && a.coeffs().size() == 1)
    return TruncSeries::polynomial(b);
  return TruncSeries::truncated(b, trust, 0);
}

TruncSeries series_shift(const TruncSeries &a, int shift) {
  std::map<int, mpz_class> out;
  for (const auto &[e, c] : a.coeffs())
    out[e + shift] = c;
  if (a.is_polynomial())
    return TruncSeries::polynomial(out);
  return TruncSeries::truncated(out, *a.trust_min() + shift, a.max_deg() + shift);
}

TruncSeries series_scale(const TruncSeries &a, const mpz_class &c) {
  std::map<int, mpz_class> out;
  for (const auto &[e, v] : a.coeffs())
    out[e] = v * c;
  if (a.is_polynomial())
    return TruncSeries::polynomial(out);
  return TruncSeries::truncated(out, *a.trust_min(), a.max_deg());
}

bool equal_on_window(const TruncSeries &a, const TruncSeries &b,
                     std::optional<int> floor) {
  auto trust = common_trust(a, b);
  if (floor)
    trust = trust ? std::max(*trust, *floor) : *floor;
  auto in_window = [&](int e) { return !trust || e >= *trust; };
  for (const auto &[e, c] : a.coeffs())
    if (in_window(e) && b.coeff(e) != c)
      return false;
  for (const auto &[e, c] : b.coeffs())
    if (in_window(e) && a.coeff(e) != c)
      return false;
  return true;
}

TruncSeries qint(unsigned m) {
  std::map<int, mpz_class> out;
  for (int e = static_cast<int>(m) - 1; e >= 1 - static_cast<int>(m); e -= 2)
    out[e] = 1;
  return TruncSeries::polynomial(out);
}

TruncSeries qfact(unsigned m) {
  TruncSeries r = TruncSeries::constant(1);
  for (unsigned i = 2; i <= m; ++i)
    r = series_mul(r, qint(i));
  return r;
}

TruncSeries geometric(int step, int window_min) {
  std::map<int, mpz_class> out;
  for (int e = 0; e >= window_min; e -= step)
    out[e] = 1;
  return TruncSeries::truncated(out, window_min, 0);
}

TruncSeries m_theta(unsigned n, int window_min) {
  TruncSeries r = TruncSeries::monomial(-static_cast<int>(n));
  if (n == 0)
    return r;
  for (unsigned i = 1; i <= n; ++i)
    r = series_mul(r, geometric(4 * static_cast<int>(i), window_min), window_min);
  return r;
}

} // namespace nbw
