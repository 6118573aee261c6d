#include "nbw/homology.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

#include "nbw/error.hpp"

namespace nbw {

namespace {

using SparseRow = std::vector<std::pair<int, mpq_class>>;

/** row -= f * pivot, both sorted by column. */
SparseRow axpy(const SparseRow &row, const mpq_class &f, const SparseRow &pivot) {
  SparseRow out;
  out.reserve(row.size() + pivot.size());
  std::size_t a = 0, b = 0;
  while (a < row.size() || b < pivot.size()) {
    if (b == pivot.size() || (a < row.size() && row[a].first < pivot[b].first)) {
      out.push_back(row[a++]);
    } else if (a == row.size() || pivot[b].first < row[a].first) {
      out.emplace_back(pivot[b].first, -f * pivot[b].second);
      ++b;
    } else {
      mpq_class v = row[a].second - f * pivot[b].second;
      if (v != 0)
        out.emplace_back(row[a].first, std::move(v));
      ++a;
      ++b;
    }
  }
  return out;
}

/** Sparse rows (indexed by matrix column) grouped from triplets. */
std::vector<SparseRow> rows_of(const SparseMatrix &m) {
  std::vector<std::map<int, mpq_class>> acc(static_cast<std::size_t>(m.rows));
  for (const auto &e : m.entries)
    acc[static_cast<std::size_t>(e.row)][e.col] += e.value;
  std::vector<SparseRow> rows;
  for (auto &r : acc) {
    SparseRow s;
    for (auto &[c, v] : r)
      if (v != 0)
        s.emplace_back(c, v);
    if (!s.empty())
      rows.push_back(std::move(s));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SparseRow &a, const SparseRow &b) { return a.size() < b.size(); });
  return rows;
}

int hardware_threads(unsigned requested) {
  if (requested > 0)
    return static_cast<int>(requested);
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : static_cast<int>(h);
}

/** Runs body(i) for i in [0, n) on a pool of workers. */
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &body) {
  const int workers = std::min<int>(hardware_threads(threads), static_cast<int>(std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error)
          error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w)
    pool.emplace_back(run);
  run();
  for (auto &th : pool)
    th.join();
  if (error)
    std::rethrow_exception(error);
}

int word_weight(const TensorWord &w) {
  int q = 0;
  for (const auto &f : w.factors)
    q += diagram_degree(f).q_weight;
  return q;
}

/** The sub-matrix of m on the given rows and columns, reindexed. */
SparseMatrix block(const SparseMatrix &m, const std::vector<int> &rows,
                   const std::vector<int> &cols) {
  std::map<int, int> row_index, col_index;
  for (std::size_t i = 0; i < rows.size(); ++i)
    row_index[rows[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < cols.size(); ++i)
    col_index[cols[i]] = static_cast<int>(i);
  SparseMatrix b;
  b.rows = static_cast<int>(rows.size());
  b.cols = static_cast<int>(cols.size());
  for (const auto &e : m.entries) {
    auto r = row_index.find(e.row);
    auto c = col_index.find(e.col);
    if (r != row_index.end() && c != col_index.end())
      b.entries.push_back({r->second, c->second, e.value});
  }
  return b;
}

/** Basis indices of position k grouped by q-degree. */
std::map<int, std::vector<int>> by_degree(const GradedComplex &c, int k) {
  std::map<int, std::vector<int>> out;
  auto it = c.degree.find(k);
  if (it == c.degree.end())
    return out;
  for (std::size_t i = 0; i < it->second.size(); ++i)
    out[it->second[i]].push_back(static_cast<int>(i));
  return out;
}

} // namespace

std::size_t exact_rank(const SparseMatrix &m) {
  std::map<int, SparseRow> pivots; // leading column -> row with leading 1
  for (SparseRow row : rows_of(m)) {
    while (!row.empty()) {
      auto p = pivots.find(row.front().first);
      if (p == pivots.end())
        break;
      row = axpy(row, row.front().second, p->second);
    }
    if (row.empty())
      continue;
    mpq_class inv = 1 / row.front().second;
    for (auto &e : row)
      e.second *= inv;
    int lead = row.front().first;
    pivots.emplace(lead, std::move(row));
  }
  return pivots.size();
}

std::size_t rank_mod_p(const SparseMatrix &m, std::uint64_t p) {
  auto inverse = [p](std::uint64_t a) {
    std::uint64_t r = 1, e = p - 2;
    while (e) {
      if (e & 1)
        r = r * a % p;
      a = a * a % p;
      e >>= 1;
    }
    return r;
  };
  mpz_class mp(static_cast<unsigned long>(p));
  std::vector<std::map<int, std::uint64_t>> rows(static_cast<std::size_t>(m.rows));
  for (const auto &e : m.entries) {
    mpz_class num = e.value.get_num() % mp, den = e.value.get_den() % mp;
    if (num < 0)
      num += mp;
    std::uint64_t v = num.get_ui() * inverse(den.get_ui()) % p;
    auto &slot = rows[static_cast<std::size_t>(e.row)][e.col];
    slot = (slot + v) % p;
  }
  std::map<int, std::map<int, std::uint64_t>> pivots;
  for (auto &row : rows) {
    for (auto it = row.begin(); it != row.end();)
      it = it->second == 0 ? row.erase(it) : std::next(it);
    while (!row.empty()) {
      auto piv = pivots.find(row.begin()->first);
      if (piv == pivots.end())
        break;
      std::uint64_t f = row.begin()->second;
      for (const auto &[c, v] : piv->second) {
        auto &slot = row[c];
        slot = (slot + p - f * v % p) % p;
        if (slot == 0)
          row.erase(c);
      }
    }
    if (row.empty())
      continue;
    std::uint64_t inv = inverse(row.begin()->second);
    for (auto &[c, v] : row)
      v = v * inv % p;
    int lead = row.begin()->first;
    pivots.emplace(lead, std::move(row));
  }
  return pivots.size();
}

BarDifferential::BarDifferential(int t, MultMode mode) : algebra_(&half_algebra(t, mode)) {}

void BarDifferential::push_up(std::vector<CapDiagram> &factors, int j,
                              const OutsideTerm &term, const mpq_class &c,
                              Chain &out) const {
  ++pushed_;
  if (j < 0) {
    ++dropped_;
    return;
  }
  const CapDiagram saved = factors[static_cast<std::size_t>(j)];
  const NormalForm &nf = algebra_->absorb(saved, term);
  for (const auto &[y, cy] : nf.inside.terms) {
    if (y.caps.empty())
      continue;
    factors[static_cast<std::size_t>(j)] = y;
    out[TensorWord{factors}] += c * cy;
  }
  for (const auto &[o, co] : nf.outside) {
    if (o.lower.caps.empty())
      continue;
    factors[static_cast<std::size_t>(j)] = o.lower;
    push_up(factors, j - 1, o, c * co, out);
  }
  factors[static_cast<std::size_t>(j)] = saved;
}

Chain BarDifferential::apply(const TensorWord &w) const {
  Chain out;
  const std::size_t k = w.factors.size();
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const mpq_class sign = (i % 2 == 0) ? -1 : 1;
    const NormalForm &nf = algebra_->product(w.factors[i], w.factors[i + 1]);
    std::vector<CapDiagram> factors;
    factors.reserve(k - 1);
    for (std::size_t j = 0; j < k; ++j)
      if (j != i + 1)
        factors.push_back(w.factors[j]);
    for (const auto &[y, cy] : nf.inside.terms) {
      factors[i] = y;
      out[TensorWord{factors}] += sign * cy;
    }
    for (const auto &[o, co] : nf.outside) {
      if (o.lower.caps.empty())
        continue;
      factors[i] = o.lower;
      push_up(factors, static_cast<int>(i) - 1, o, sign * co, out);
    }
  }
  for (auto it = out.begin(); it != out.end();)
    it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

Chain BarDifferential::apply(const Chain &c) const {
  Chain out;
  for (const auto &[w, cw] : c)
    for (const auto &[v, cv] : apply(w))
      out[v] += cw * cv;
  for (auto it = out.begin(); it != out.end();)
    it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

std::size_t GradedComplex::size() const {
  std::size_t n = 0;
  for (const auto &[k, b] : basis)
    n += b.size();
  return n;
}

int GradedComplex::index_of(int k, const TensorWord &w) const {
  auto it = basis.find(k);
  if (it == basis.end())
    return -1;
  auto pos = std::lower_bound(it->second.begin(), it->second.end(), w);
  if (pos == it->second.end() || !(*pos == w))
    return -1;
  return static_cast<int>(pos - it->second.begin());
}

std::vector<int> GradedComplex::q_degrees() const {
  std::set<int> s;
  for (const auto &[k, d] : degree)
    s.insert(d.begin(), d.end());
  return {s.begin(), s.end()};
}

TruncSeries GradedComplex::graded_dim(int k) const {
  std::map<int, mpz_class> c;
  auto it = degree.find(k);
  if (it != degree.end())
    for (int q : it->second)
      c[q] += 1;
  return TruncSeries::truncated(c, q_min, std::max(q_min, max_word_weight(psi, theta)));
}

int max_word_weight(int psi, int theta) {
  if (theta <= psi)
    return 0;
  // best[s]: largest dotless weight of a chain from s down to psi
  std::vector<int> best(static_cast<std::size_t>(theta) + 1, -1);
  best[static_cast<std::size_t>(psi)] = 0;
  for (int s = psi + 2; s <= theta; s += 2) {
    int b = -1;
    for (int target = psi; target < s; target += 2) {
      TruncSeries y = y_genfun(target, s);
      b = std::max(b, y.max_deg() + best[static_cast<std::size_t>(target)]);
    }
    best[static_cast<std::size_t>(s)] = b;
  }
  return best[static_cast<std::size_t>(theta)];
}

namespace {

GradedComplex build_words(int psi, int theta, int q_min, int t, MultMode mode, unsigned threads,
                          bool dotless) {
  GradedComplex c;
  c.psi = psi;
  c.theta = theta;
  c.q_min = q_min;
  c.t = t;
  c.mode = mode;
  if (psi < 0 || theta <= psi || (theta - psi) % 2 != 0)
    return c;

  std::vector<int> reach(static_cast<std::size_t>(theta) + 1, 0);
  for (int s = psi; s <= theta; s += 2)
    reach[static_cast<std::size_t>(s)] = max_word_weight(psi, s);
  const int max_dots =
      dotless ? 0 : std::max(0, (reach[static_cast<std::size_t>(theta)] - q_min) / 2);

  struct Factor {
    CapDiagram d;
    int q;
  };
  std::map<std::pair<int, int>, std::vector<Factor>> factors;
  for (int s = psi + 2; s <= theta; s += 2)
    for (int caps = 1; 2 * caps <= s - psi; ++caps) {
      auto &list = factors[{s, caps}];
      for (auto &d : enumerate_caps(s, caps, max_dots))
        list.push_back({d, diagram_degree(d).q_weight});
    }

  // words are grown from the bottom factor upwards
  std::vector<CapDiagram> stack;
  std::function<void(int, int)> grow = [&](int src, int q) {
    if (src == psi) {
      TensorWord w{{stack.rbegin(), stack.rend()}};
      int k = static_cast<int>(w.factors.size());
      c.basis[k].push_back(std::move(w));
      return;
    }
    for (int caps = 1; 2 * caps <= src - psi; ++caps) {
      int target = src - 2 * caps;
      for (const Factor &f : factors.at({src, caps})) {
        if (q + f.q + reach[static_cast<std::size_t>(target)] < q_min)
          continue;
        stack.push_back(f.d);
        grow(target, q + f.q);
        stack.pop_back();
      }
    }
  };
  grow(theta, 0);

  for (auto &[k, words] : c.basis) {
    std::sort(words.begin(), words.end());
    auto &deg = c.degree[k];
    for (const auto &w : words)
      deg.push_back(word_weight(w));
  }

  std::atomic<std::size_t> pushed{0}, dropped{0};
  for (auto &[k, words] : c.basis) {
    if (k < 2)
      continue;
    std::vector<std::vector<SparseMatrix::Entry>> columns(words.size());
    parallel_for(words.size(), threads, [&, k = k](std::size_t i) {
      BarDifferential d(t, mode);
      for (const auto &[v, cv] : d.apply(words[i])) {
        int row = c.index_of(k - 1, v);
        if (row < 0)
          throw Error(ErrorKind::PositionMismatch,
                      "boundary word outside the basis: " + v.to_string());
        columns[i].push_back({row, static_cast<int>(i), cv});
      }
      pushed += d.pushed_terms();
      dropped += d.dropped_at_top();
    });
    SparseMatrix &m = c.differential[k];
    m.rows = static_cast<int>(c.basis[k - 1].size());
    m.cols = static_cast<int>(words.size());
    for (auto &col : columns)
      for (auto &e : col)
        m.entries.push_back(std::move(e));
  }
  c.pushed_terms = pushed;
  c.dropped_at_top = dropped;
  return c;
}

} // namespace

GradedComplex build_bar_complex(int psi, int theta, int q_min, int t, MultMode mode,
                                unsigned threads) {
  return build_words(psi, theta, q_min, t, mode, threads, false);
}

GradedComplex build_dotless_bar_complex(int psi, int theta, int t, MultMode mode,
                                        unsigned threads) {
  return build_words(psi, theta, 0, t, mode, threads, true);
}

bool boundary_squared_zero(const GradedComplex &c) {
  for (const auto &[k, outer] : c.differential) {
    auto inner = c.differential.find(k + 1);
    if (inner == c.differential.end())
      continue;
    std::vector<std::vector<std::pair<int, mpq_class>>> cols(static_cast<std::size_t>(outer.cols));
    for (const auto &e : outer.entries)
      cols[static_cast<std::size_t>(e.col)].emplace_back(e.row, e.value);
    std::map<std::pair<int, int>, mpq_class> product;
    for (const auto &e : inner->second.entries)
      for (const auto &[r, v] : cols[static_cast<std::size_t>(e.row)])
        product[{r, e.col}] += v * e.value;
    for (const auto &[rc, v] : product)
      if (v != 0)
        return false;
  }
  return true;
}

long HomologyTable::dim(int k, int q) const {
  auto it = entries.find({k, q});
  return it == entries.end() ? 0 : it->second;
}

std::vector<int> HomologyTable::nonzero_positions() const {
  std::set<int> s;
  for (const auto &[kq, d] : entries)
    if (d != 0)
      s.insert(kq.first);
  return {s.begin(), s.end()};
}

TruncSeries HomologyTable::series(int k) const {
  std::map<int, mpz_class> c;
  for (const auto &[kq, d] : entries)
    if (kq.first == k)
      c[kq.second] += d;
  return TruncSeries::truncated(c, q_min, std::max(q_min, max_word_weight(psi, theta)));
}

nlohmann::json HomologyTable::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto &[kq, d] : entries)
    rows.push_back({{"theta", theta},
                    {"psi", psi},
                    {"hom_degree", kq.first},
                    {"q_degree", kq.second},
                    {"dim", d},
                    {"trusted", kq.second >= q_min}});
  return rows;
}

HomologyTable homology_table(const GradedComplex &c, unsigned threads) {
  HomologyTable table;
  table.psi = c.psi;
  table.theta = c.theta;
  table.q_min = c.q_min;
  if (c.empty())
    return table;

  std::map<int, std::map<int, std::vector<int>>> groups; // k -> q -> indices
  for (const auto &[k, b] : c.basis)
    groups[k] = by_degree(c, k);

  // rank of the differential out of position k at degree q
  struct Task {
    int k;
    int q;
    std::size_t rank = 0;
  };
  std::vector<Task> tasks;
  for (const auto &[k, m] : c.differential)
    for (const auto &[q, cols] : groups[k])
      if (groups[k - 1].count(q))
        tasks.push_back({k, q});
  parallel_for(tasks.size(), threads, [&](std::size_t i) {
    Task &task = tasks[i];
    const auto &cols = groups[task.k].at(task.q);
    const auto &rows = groups[task.k - 1].at(task.q);
    task.rank = exact_rank(block(c.differential.at(task.k), rows, cols));
  });
  std::map<std::pair<int, int>, std::size_t> rank;
  for (const auto &task : tasks)
    rank[{task.k, task.q}] = task.rank;

  for (const auto &[k, by_q] : groups)
    for (const auto &[q, idx] : by_q) {
      long d = static_cast<long>(idx.size());
      auto out = rank.find({k, q});
      if (out != rank.end())
        d -= static_cast<long>(out->second);
      auto in = rank.find({k + 1, q});
      if (in != rank.end())
        d -= static_cast<long>(in->second);
      if (d != 0)
        table.entries[{k, q}] = d;
    }
  return table;
}

ConcentrationReport concentration_report(int psi, int theta, int q_min, int t,
                                         MultMode mode) {
  ConcentrationReport r;
  GradedComplex c = build_bar_complex(psi, theta, q_min, t, mode);
  r.table = homology_table(c);
  r.at = c.top_position();
  r.concentrated = true;
  for (int k : r.table.nonzero_positions())
    if (k != r.at)
      r.concentrated = false;
  r.dims = r.table.series(r.at);
  return r;
}

bool lowers_dots_beyond_graded(const GradedComplex &full, unsigned threads) {
  auto dots = [](const TensorWord &w) {
    int n = 0;
    for (const auto &f : w.factors)
      for (int d : f.dots)
        n += d;
    return n;
  };
  std::atomic<bool> ok{true};
  for (const auto &[k, m] : full.differential) {
    const auto &words = full.basis.at(k);
    const auto &rows = full.basis.at(k - 1);
    std::vector<Chain> diff(words.size());
    for (const auto &e : m.entries)
      diff[static_cast<std::size_t>(e.col)][rows[static_cast<std::size_t>(e.row)]] += e.value;
    parallel_for(words.size(), threads, [&, k = k](std::size_t i) {
      BarDifferential graded(full.t, MultMode::Graded);
      Chain &d = diff[i];
      for (const auto &[v, cv] : graded.apply(words[i]))
        d[v] -= cv;
      const int top = dots(words[i]);
      for (const auto &[v, cv] : d)
        if (cv != 0 && dots(v) >= top)
          ok = false;
    });
  }
  return ok;
}

ConcentrationReport dot_label_report(int psi, int theta, int q_min, unsigned threads) {
  ConcentrationReport r;
  GradedComplex c = build_dotless_bar_complex(psi, theta, 0, MultMode::Graded, threads);
  HomologyTable dotless = homology_table(c, threads);
  r.table.psi = psi;
  r.table.theta = theta;
  r.table.q_min = q_min;
  const int caps = (theta - psi) / 2;
  for (const auto &[kq, d] : dotless.entries) {
    // labellings of `caps` arcs with j dots in total
    mpz_class ways = 1;
    for (int j = 0; kq.second - 2 * j >= q_min; ++j) {
      if (j > 0)
        ways = ways * (caps - 1 + j) / j;
      r.table.entries[{kq.first, kq.second - 2 * j}] += d * ways.get_si();
    }
  }
  std::erase_if(r.table.entries, [](const auto &e) { return e.second == 0; });
  r.at = c.top_position();
  r.concentrated = true;
  for (int k : r.table.nonzero_positions())
    if (k != r.at)
      r.concentrated = false;
  r.dims = r.table.series(r.at);
  return r;
}

TruncSeries euler_characteristic(const GradedComplex &c) {
  TruncSeries chi = TruncSeries::truncated({}, c.q_min,
                                           std::max(c.q_min, max_word_weight(c.psi, c.theta)));
  for (const auto &[k, b] : c.basis) {
    TruncSeries g = c.graded_dim(k);
    chi = series_add(chi, k % 2 ? -g : g);
  }
  return chi;
}

TruncSeries chain_euler_series(int psi, int theta, int window_min) {
  if (theta <= psi || (theta - psi) % 2 != 0)
    return TruncSeries::truncated({}, window_min, 0);
  const int wide = window_min - max_word_weight(psi, theta);
  // e[s]: signed sum over chains from s down to psi
  std::map<int, TruncSeries> e;
  e[psi] = TruncSeries::constant(1);
  for (int s = psi + 2; s <= theta; s += 2) {
    TruncSeries acc = TruncSeries::truncated({}, wide, 0);
    for (int target = psi; target < s; target += 2)
      acc = series_sub(acc, series_mul(e.at(target), y_dotted_dim(target, s, wide), wide));
    e[s] = acc;
  }
  return e.at(theta).truncate(window_min);
}

CycleClass cycle_class_check(const Chain &w, const GradedComplex &c) {
  CycleClass r;
  if (w.empty()) {
    r.is_cycle = true;
    return r;
  }
  const int k = static_cast<int>(w.begin()->first.factors.size());
  std::map<int, std::vector<std::pair<int, mpq_class>>> by_q; // q -> (index, coeff)
  for (const auto &[word, coeff] : w) {
    int i = static_cast<int>(word.factors.size()) == k ? c.index_of(k, word) : -1;
    if (i < 0)
      throw Error(ErrorKind::PositionMismatch,
                  "word not in position " + std::to_string(k) + ": " + word.to_string());
    by_q[c.degree.at(k)[static_cast<std::size_t>(i)]].emplace_back(i, coeff);
  }

  r.is_cycle = true;
  auto out = c.differential.find(k);
  if (out != c.differential.end()) {
    std::map<int, mpq_class> image;
    std::map<int, mpq_class> coeff_of;
    for (const auto &[q, terms] : by_q)
      for (const auto &[i, cf] : terms)
        coeff_of[i] = cf;
    for (const auto &e : out->second.entries) {
      auto it = coeff_of.find(e.col);
      if (it != coeff_of.end())
        image[e.row] += it->second * e.value;
    }
    for (const auto &[row, v] : image)
      if (v != 0)
        r.is_cycle = false;
  }

  auto in = c.differential.find(k + 1);
  auto groups_k = by_degree(c, k);
  auto groups_up = by_degree(c, k + 1);
  for (const auto &[q, terms] : by_q) {
    const auto &rows = groups_k.at(q);
    std::map<int, int> local;
    for (std::size_t i = 0; i < rows.size(); ++i)
      local[rows[i]] = static_cast<int>(i);
    SparseMatrix m;
    if (in != c.differential.end() && groups_up.count(q))
      m = block(in->second, rows, groups_up.at(q));
    else {
      m.rows = static_cast<int>(rows.size());
      m.cols = 0;
    }
    const std::size_t before = exact_rank(m);
    for (const auto &[i, cf] : terms)
      m.entries.push_back({local.at(i), m.cols, cf});
    ++m.cols;
    if (exact_rank(m) > before)
      r.nonzero_class = true;
  }
  return r;
}

} // namespace nbw
