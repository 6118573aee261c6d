#include "nbw/koszul.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "nbw/error.hpp"
#include "nbw/homology.hpp"

namespace nbw {

namespace {

using Row = std::vector<mpq_class>;

/** Reduced row echelon form in place; returns the pivot column of each
 *  kept row. Zero rows are removed. */
std::vector<int> rref(std::vector<Row> &rows) {
  std::vector<int> pivots;
  if (rows.empty())
    return pivots;
  const int cols = static_cast<int>(rows.front().size());
  std::size_t r = 0;
  for (int c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && rows[p][c] == 0)
      ++p;
    if (p == rows.size())
      continue;
    std::swap(rows[r], rows[p]);
    mpq_class inv = 1 / rows[r][c];
    for (auto &x : rows[r])
      x *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0)
        continue;
      mpq_class f = rows[i][c];
      for (int k = c; k < cols; ++k)
        if (rows[r][k] != 0)
          rows[i][k] -= f * rows[r][k];
    }
    pivots.push_back(c);
    ++r;
  }
  rows.resize(r);
  return pivots;
}

long ipow(long b, int e) {
  long r = 1;
  while (e-- > 0)
    r *= b;
  return r;
}

/**
 * The graded pieces A_m = V^m / I_m of a quadratic algebra: a reduced
 * basis of I_m, the standard monomials (non-pivot columns) and the
 * reduction of any monomial to standard coordinates.
 */
class GradedQuotient {
public:
  GradedQuotient(const QuadraticPresentation &p, int deg_max) : p_(p) {
    pieces_.resize(static_cast<std::size_t>(deg_max) + 1);
    for (int m = 0; m <= deg_max; ++m)
      build(m);
  }

  long dim(int m) const {
    return static_cast<long>(pieces_[static_cast<std::size_t>(m)].standard.size());
  }

  /** Coordinates of monomial `mono` (base-n digits, length m) in the
   *  standard basis of A_m, as (standard index, coefficient). */
  std::vector<std::pair<int, mpq_class>> reduce(int m, long mono) const {
    const Piece &pc = pieces_[static_cast<std::size_t>(m)];
    std::vector<std::pair<int, mpq_class>> out;
    auto s = pc.standard_index.find(mono);
    if (s != pc.standard_index.end()) {
      out.emplace_back(s->second, 1);
      return out;
    }
    const Row &row = pc.rows[static_cast<std::size_t>(pc.pivot_row.at(mono))];
    for (std::size_t i = 0; i < pc.standard.size(); ++i) {
      const mpq_class &c = row[static_cast<std::size_t>(pc.standard[i])];
      if (c != 0)
        out.emplace_back(static_cast<int>(i), -c);
    }
    return out;
  }

  long standard_monomial(int m, int i) const {
    return pieces_[static_cast<std::size_t>(m)].standard[static_cast<std::size_t>(i)];
  }

private:
  struct Piece {
    std::vector<Row> rows;
    std::map<long, int> pivot_row;
    std::vector<long> standard;
    std::map<long, int> standard_index;
  };

  void build(int m) {
    const int n = p_.n_gen;
    const long size = ipow(n, m);
    Piece &pc = pieces_[static_cast<std::size_t>(m)];
    if (m >= 2) {
      for (int i = 0; i + 2 <= m; ++i) {
        const long left = ipow(n, i), right = ipow(n, m - i - 2);
        for (const Row &rel : p_.relations)
          for (long u = 0; u < left; ++u)
            for (long v = 0; v < right; ++v) {
              Row row(static_cast<std::size_t>(size));
              for (long ab = 0; ab < n * n; ++ab)
                if (rel[static_cast<std::size_t>(ab)] != 0)
                  row[static_cast<std::size_t>((u * n * n + ab) * right + v)] =
                      rel[static_cast<std::size_t>(ab)];
              pc.rows.push_back(std::move(row));
            }
      }
    }
    std::vector<int> pivots = rref(pc.rows);
    for (std::size_t r = 0; r < pivots.size(); ++r)
      pc.pivot_row[pivots[r]] = static_cast<int>(r);
    for (long c = 0; c < size; ++c)
      if (!pc.pivot_row.count(c)) {
        pc.standard_index[c] = static_cast<int>(pc.standard.size());
        pc.standard.push_back(c);
      }
  }

  const QuadraticPresentation &p_;
  std::vector<Piece> pieces_;
};

void compositions(int total, int parts, std::vector<int> &cur,
                  std::vector<std::vector<int>> &out) {
  if (parts == 0) {
    if (total == 0)
      out.push_back(cur);
    return;
  }
  for (int first = 1; first <= total - (parts - 1); ++first) {
    cur.push_back(first);
    compositions(total - first, parts - 1, cur, out);
    cur.pop_back();
  }
}

/** Basis of the bar complex at (hom degree i, weight j): a composition of
 *  j into i parts and one standard monomial index per part. */
struct BarCell {
  std::vector<int> weights;
  std::vector<int> monos;
  auto operator<=>(const BarCell &) const = default;
};

std::vector<BarCell> bar_cells(const GradedQuotient &a, int i, int j) {
  std::vector<std::vector<int>> comps;
  std::vector<int> cur;
  compositions(j, i, cur, comps);
  std::vector<BarCell> cells;
  for (const auto &w : comps) {
    std::vector<int> idx(w.size(), 0);
    bool empty = false;
    for (int x : w)
      if (a.dim(x) == 0)
        empty = true;
    if (empty)
      continue;
    while (true) {
      cells.push_back({w, idx});
      std::size_t r = 0;
      while (r < w.size() && ++idx[r] == a.dim(w[r]))
        idx[r++] = 0;
      if (r == w.size())
        break;
    }
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

} // namespace

QuadraticPresentation::QuadraticPresentation(int n,
                                             std::vector<std::vector<mpq_class>> rows)
    : n_gen(n), relations(std::move(rows)) {
  for (const auto &r : relations)
    if (static_cast<int>(r.size()) != n * n)
      throw Error(ErrorKind::PreconditionViolated, "relation length must be n^2");
  reduce();
}

void QuadraticPresentation::reduce() { rref(relations); }

std::string QuadraticPresentation::to_string() const {
  auto name = [&](int i) {
    return i < static_cast<int>(labels.size()) ? labels[static_cast<std::size_t>(i)]
                                                : "x" + std::to_string(i + 1);
  };
  std::ostringstream out;
  out << "<";
  for (int i = 0; i < n_gen; ++i)
    out << (i ? "," : "") << name(i);
  out << " | ";
  for (std::size_t r = 0; r < relations.size(); ++r) {
    if (r)
      out << ", ";
    bool first = true;
    for (int i = 0; i < n_gen; ++i)
      for (int j = 0; j < n_gen; ++j) {
        const mpq_class &c = relations[r][static_cast<std::size_t>(index(i, j))];
        if (c == 0)
          continue;
        if (c < 0)
          out << (first ? "-" : " - ");
        else if (!first)
          out << " + ";
        if (abs(c) != 1)
          out << mpq_class(abs(c)).get_str();
        out << name(i) << name(j);
        first = false;
      }
  }
  out << ">";
  return out.str();
}

nlohmann::json QuadraticPresentation::to_json() const {
  nlohmann::json rels = nlohmann::json::array();
  for (const auto &r : relations) {
    nlohmann::json terms = nlohmann::json::array();
    for (int i = 0; i < n_gen; ++i)
      for (int j = 0; j < n_gen; ++j) {
        const mpq_class &c = r[static_cast<std::size_t>(index(i, j))];
        if (c != 0)
          terms.push_back({c.get_str(), i + 1, j + 1});
      }
    rels.push_back(terms);
  }
  return {{"n_gen", n_gen}, {"relations", rels}};
}

QuadraticPresentation QuadraticPresentation::from_json(const nlohmann::json &j) {
  int n = j.at("n_gen").get<int>();
  std::vector<std::vector<mpq_class>> rows;
  for (const auto &rel : j.at("relations")) {
    std::vector<mpq_class> row(static_cast<std::size_t>(n * n));
    for (const auto &term : rel) {
      mpq_class c(term.at(0).get<std::string>());
      c.canonicalize();
      int a = term.at(1).get<int>() - 1, b = term.at(2).get<int>() - 1;
      row[static_cast<std::size_t>(a * n + b)] += c;
    }
    rows.push_back(std::move(row));
  }
  return QuadraticPresentation(n, std::move(rows));
}

QuadraticPresentation pattern_algebra(const NestingPattern &p) {
  if (!p.transitive())
    throw Error(ErrorKind::TransitivityViolation,
                "pattern containments are not transitive: " + p.to_string());
  const int n = p.size();
  std::vector<std::vector<mpq_class>> rows;
  auto unit = [&] { return std::vector<mpq_class>(static_cast<std::size_t>(n * n)); };
  for (int i = 0; i < n; ++i) {
    auto r = unit();
    r[static_cast<std::size_t>(i * n + i)] = 1;
    rows.push_back(r);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      auto r = unit();
      if (p.rel(i, j) == SegmentRelation::Inside) {
        r[static_cast<std::size_t>(j * n + i)] = 1;
      } else {
        r[static_cast<std::size_t>(i * n + j)] = 1;
        r[static_cast<std::size_t>(j * n + i)] = -1;
      }
      rows.push_back(r);
    }
  return QuadraticPresentation(n, std::move(rows));
}

QuadraticPresentation quadratic_dual(const QuadraticPresentation &p) {
  const int n = p.n_gen, size = n * n;
  std::vector<int> pivots;
  {
    std::vector<Row> rows = p.relations;
    pivots = rref(rows);
  }
  // null space of the relation matrix: one vector per free column
  std::vector<bool> is_pivot(static_cast<std::size_t>(size), false);
  for (int c : pivots)
    is_pivot[static_cast<std::size_t>(c)] = true;
  std::vector<std::vector<mpq_class>> dual;
  for (int f = 0; f < size; ++f) {
    if (is_pivot[static_cast<std::size_t>(f)])
      continue;
    std::vector<mpq_class> v(static_cast<std::size_t>(size));
    v[static_cast<std::size_t>(f)] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r)
      v[static_cast<std::size_t>(pivots[r])] = -p.relations[r][static_cast<std::size_t>(f)];
    dual.push_back(std::move(v));
  }
  QuadraticPresentation d(n, std::move(dual));
  d.labels.clear();
  for (int i = 0; i < n; ++i)
    d.labels.push_back("t" + std::to_string(i + 1));
  return d;
}

std::vector<long> hilbert_series(const QuadraticPresentation &p, int deg_max) {
  GradedQuotient a(p, deg_max);
  std::vector<long> h;
  for (int m = 0; m <= deg_max; ++m)
    h.push_back(a.dim(m));
  return h;
}

std::map<std::pair<int, int>, long>
quad_bar_homology(const QuadraticPresentation &p, int hom_max) {
  GradedQuotient a(p, hom_max);
  const int n = p.n_gen;
  std::map<std::pair<int, int>, long> ext;
  ext[{0, 0}] = 1;
  for (int j = 1; j <= hom_max; ++j) {
    std::vector<std::vector<BarCell>> cells(static_cast<std::size_t>(j) + 2);
    for (int i = 1; i <= j; ++i)
      cells[static_cast<std::size_t>(i)] = bar_cells(a, i, j);
    // rank[i]: rank of the differential from hom degree i to i - 1
    std::vector<std::size_t> rank(static_cast<std::size_t>(j) + 2, 0);
    for (int i = 2; i <= j; ++i) {
      const auto &src = cells[static_cast<std::size_t>(i)];
      const auto &dst = cells[static_cast<std::size_t>(i - 1)];
      std::map<BarCell, int> index;
      for (std::size_t r = 0; r < dst.size(); ++r)
        index[dst[r]] = static_cast<int>(r);
      SparseMatrix m;
      m.rows = static_cast<int>(dst.size());
      m.cols = static_cast<int>(src.size());
      for (std::size_t c = 0; c < src.size(); ++c) {
        const BarCell &cell = src[c];
        for (int r = 0; r + 1 < i; ++r) {
          int wa = cell.weights[static_cast<std::size_t>(r)];
          int wb = cell.weights[static_cast<std::size_t>(r) + 1];
          long mono = a.standard_monomial(wa, cell.monos[static_cast<std::size_t>(r)]) *
                          ipow(n, wb) +
                      a.standard_monomial(wb, cell.monos[static_cast<std::size_t>(r) + 1]);
          BarCell merged;
          merged.weights = cell.weights;
          merged.monos = cell.monos;
          merged.weights.erase(merged.weights.begin() + r + 1);
          merged.monos.erase(merged.monos.begin() + r + 1);
          merged.weights[static_cast<std::size_t>(r)] = wa + wb;
          const int sign = (r % 2 == 0) ? -1 : 1;
          for (const auto &[s, coeff] : a.reduce(wa + wb, mono)) {
            merged.monos[static_cast<std::size_t>(r)] = s;
            m.entries.push_back({index.at(merged), static_cast<int>(c), sign * coeff});
          }
        }
      }
      rank[static_cast<std::size_t>(i)] = exact_rank(m);
    }
    for (int i = 1; i <= j; ++i) {
      long d = static_cast<long>(cells[static_cast<std::size_t>(i)].size()) -
               static_cast<long>(rank[static_cast<std::size_t>(i)]) -
               static_cast<long>(rank[static_cast<std::size_t>(i) + 1]);
      if (d != 0)
        ext[{i, j}] = d;
    }
  }
  return ext;
}

KoszulCheck koszul_check(const QuadraticPresentation &p, int deg_max) {
  KoszulCheck out;
  out.hilbert = hilbert_series(p, deg_max);
  out.dual_hilbert = hilbert_series(quadratic_dual(p), deg_max);
  out.hilbert_ok = true;
  for (int m = 0; m <= deg_max; ++m) {
    long c = 0;
    for (int i = 0; i <= m; ++i)
      c += out.hilbert[static_cast<std::size_t>(i)] *
           out.dual_hilbert[static_cast<std::size_t>(m - i)] * ((m - i) % 2 ? -1 : 1);
    if (c != (m == 0 ? 1 : 0))
      out.hilbert_ok = false;
  }
  for (const auto &[ij, d] : quad_bar_homology(p, deg_max))
    if (ij.first != ij.second)
      out.off_diagonal.push_back({ij.first, ij.second, d});
  out.diagonal_ok = out.off_diagonal.empty();
  return out;
}

QuadraticPresentation non_koszul_example() {
  const int n = 3;
  auto unit = [&] { return std::vector<mpq_class>(static_cast<std::size_t>(n * n)); };
  auto r1 = unit(), r2 = unit(), r3 = unit();
  r1[0 * n + 2] = 1;
  r1[2 * n + 0] = -1;
  r2[0 * n + 1] = 1;
  r3[1 * n + 0] = 1;
  return QuadraticPresentation(n, {r1, r2, r3});
}

QuadraticPresentation dual_numbers() { return QuadraticPresentation(1, {{mpq_class(1)}}); }

QuadraticPresentation free_algebra(int n) { return QuadraticPresentation(n, {}); }

long pattern_subset_count(const NestingPattern &p, int m) {
  const int n = p.size();
  long count = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i))
        s.push_back(i);
    if (static_cast<int>(s.size()) != m)
      continue;
    bool ok = false;
    do {
      bool good = true;
      for (std::size_t k = 0; k + 1 < s.size() && good; ++k) {
        int a = s[k], b = s[k + 1];
        // x_a x_b vanishes when a lies inside b
        if (a > b && p.rel(b, a) == SegmentRelation::Inside)
          good = false;
      }
      ok = good;
    } while (!ok && std::next_permutation(s.begin(), s.end()));
    if (ok)
      ++count;
  }
  return count;
}

} // namespace nbw
