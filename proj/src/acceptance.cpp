#include "nbw/acceptance.hpp"

#include <chrono>
#include <map>
#include <random>
#include <sstream>

#include "nbw/algebra.hpp"
#include "nbw/characters.hpp"
#include "nbw/diagrams.hpp"
#include "nbw/homology.hpp"
#include "nbw/koszul.hpp"

namespace nbw {

std::string CriterionResult::line() const {
  std::ostringstream os;
  os << "criterion " << id << " " << name << ": " << (pass ? "PASS" : "FAIL") << " (" << detail
     << ")";
  return os.str();
}

nlohmann::json CriterionResult::to_json() const {
  return {{"id", id}, {"name", name}, {"pass", pass}, {"detail", detail}, {"seconds", seconds}};
}

namespace {

const char *mode_name(MultMode m) { return m == MultMode::Full ? "full" : "gr"; }

std::vector<CapDiagram> ideal_basis(int source, int max_dots) {
  std::vector<CapDiagram> out;
  for (int c = 1; 2 * c <= source; ++c)
    for (auto &d : enumerate_caps(source, c, max_dots))
      out.push_back(d);
  return out;
}

int raw_degree(const RawDiagram &r) {
  int d = 0;
  for (const auto &s : r.slices)
    d += s.kind == SliceKind::Dot ? 2 : s.kind == SliceKind::Cross ? -2 : 0;
  return d;
}

/** Shared state of one battery run. */
class Battery {
public:
  explicit Battery(const AcceptanceConfig &c) : cfg_(c) {}

  /** Directly built complex on q >= q_min; records whether d^2 = 0. */
  const ConcentrationReport &direct(int psi, int theta, int q_min, int t, MultMode mode) {
    auto key = std::make_tuple(psi, theta, q_min, t, mode);
    auto it = direct_.find(key);
    if (it != direct_.end())
      return it->second;
    GradedComplex c = build_bar_complex(psi, theta, q_min, t, mode, cfg_.threads);
    square_[key] = record_square(c);
    ConcentrationReport r;
    r.table = homology_table(c, cfg_.threads);
    r.at = c.top_position();
    r.concentrated = true;
    for (int k : r.table.nonzero_positions())
      if (k != r.at)
        r.concentrated = false;
    r.dims = r.table.series(r.at);
    if (mode == MultMode::Full && t == 0)
      filtered_[{psi, theta, q_min}] = lowers_dots_beyond_graded(c, cfg_.threads);
    return direct_.emplace(key, std::move(r)).first->second;
  }

  /** Graded homology from the dotless words, plus the full complex on the
   *  top of the window: filtered, and with the same homology there. */
  struct Labelled {
    ConcentrationReport report;
    bool filtered = false;
    bool top_agrees = false;
    bool top_square = false;

    bool ok(int at) const {
      return report.concentrated && report.at == at && filtered && top_agrees && top_square;
    }
  };

  const Labelled &labelled(int psi, int theta) {
    auto it = labelled_.find({psi, theta});
    if (it != labelled_.end())
      return it->second;
    Labelled l;
    l.report = dot_label_report(psi, theta, cfg_.window_min, cfg_.threads);
    const int top = cfg_.direct_top_min;
    const ConcentrationReport &d = direct(psi, theta, top, 0, MultMode::Full);
    l.filtered = filtered_.at({psi, theta, top});
    l.top_square = square_.at({psi, theta, top, 0, MultMode::Full});
    ConcentrationReport top_labels = dot_label_report(psi, theta, top, cfg_.threads);
    l.top_agrees = d.table.entries == top_labels.table.entries;
    return labelled_.emplace(std::pair{psi, theta}, std::move(l)).first->second;
  }

  bool uses_labels(int psi, int theta) const { return theta == 8 && psi <= 4; }

  bool record_square(const GradedComplex &c) {
    std::ostringstream os;
    os << "(" << c.psi << "," << c.theta << ") q>=" << c.q_min << " t=" << c.t << " "
       << mode_name(c.mode);
    bool ok = boundary_squared_zero(c);
    squares_.emplace_back(os.str(), ok);
    return ok;
  }

  const std::vector<std::pair<std::string, bool>> &squares() const { return squares_; }
  const AcceptanceConfig &cfg() const { return cfg_; }

private:
  AcceptanceConfig cfg_;
  std::map<std::tuple<int, int, int, int, MultMode>, ConcentrationReport> direct_;
  std::map<std::tuple<int, int, int>, bool> filtered_;
  std::map<std::tuple<int, int, int, int, MultMode>, bool> square_;
  std::map<std::pair<int, int>, Labelled> labelled_;
  std::vector<std::pair<std::string, bool>> squares_;
};

CriterionResult kostant(Battery &b) {
  CriterionResult r{1, "kostant_concentration", true, "", 0};
  const int w = b.cfg().window_min;
  std::ostringstream os;
  for (int theta = 2; theta <= 8; theta += 2) {
    bool ok;
    if (b.uses_labels(0, theta)) {
      const auto &l = b.labelled(0, theta);
      ok = l.ok(theta / 2);
      os << "theta=" << theta << " dot labels, full complex on q>=" << b.cfg().direct_top_min
         << (l.top_square ? "" : " with d^2 != 0") << (l.filtered ? " filtered" : " NOT filtered")
         << (l.top_agrees ? " and agreeing" : " and DISAGREEING") << ": " << (ok ? "ok" : "fail");
    } else {
      const auto &d = b.direct(0, theta, w, 0, MultMode::Full);
      ok = d.concentrated && d.at == theta / 2;
      os << "theta=" << theta << " direct: " << (ok ? "ok" : "fail") << "; ";
    }
    r.pass = r.pass && ok;
  }
  r.detail = os.str();
  return r;
}

CriterionResult ext_dims(Battery &b) {
  CriterionResult r{2, "ext_dimension_formula", true, "", 0};
  const int w = b.cfg().window_min;
  std::ostringstream os;
  for (int theta = 2; theta <= 8; theta += 2) {
    const ConcentrationReport &c =
        b.uses_labels(0, theta) ? b.labelled(0, theta).report : b.direct(0, theta, w, 0, MultMode::Full);
    bool ok = equal_on_window(c.dims, ext_dim_formula(static_cast<unsigned>(theta / 2), w), w);
    r.pass = r.pass && ok;
    os << "theta=" << theta << (ok ? " equal" : " DIFFERENT") << (theta < 8 ? "; " : "");
  }
  r.detail = os.str() + " on q>=" + std::to_string(w);
  return r;
}

CriterionResult koszul_nb(Battery &b) {
  CriterionResult r{3, "koszul_half_algebra", true, "", 0};
  const int w = b.cfg().window_min;
  int pairs = 0;
  std::ostringstream bad;
  for (int theta = 2; theta <= 8; theta += 2)
    for (int psi = 0; psi < theta; psi += 2) {
      const int at = (theta - psi) / 2;
      if (b.uses_labels(psi, theta)) {
        const auto &l = b.labelled(psi, theta);
        if (!l.report.concentrated || l.report.at != at)
          bad << " (" << psi << "," << theta << ") gr";
        if (!l.ok(at))
          bad << " (" << psi << "," << theta << ") full" << (l.top_square ? "" : " [d^2 != 0 on q>=" + std::to_string(b.cfg().direct_top_min) + "]");
      } else {
        for (MultMode m : {MultMode::Full, MultMode::Graded}) {
          const auto &d = b.direct(psi, theta, w, 0, m);
          if (!(d.concentrated && d.at == at))
            bad << " (" << psi << "," << theta << ") " << mode_name(m);
        }
      }
      ++pairs;
    }
  r.pass = bad.str().empty();
  r.detail = std::to_string(pairs) + " weight pairs, full and gr, on q>=" + std::to_string(w) +
             "; theta=8 with psi<=4 through dot labels" +
             (r.pass ? "" : "; failing:" + bad.str());
  return r;
}

CriterionResult pattern_koszul(Battery &) {
  CriterionResult r{4, "pattern_algebra_koszul", true, "", 0};
  int count = 0, failed = 0;
  for (int n = 1; n <= 4; ++n)
    for (const auto &p : all_realizable_patterns(n)) {
      KoszulCheck k = koszul_check(pattern_algebra(p), 4);
      ++count;
      if (!(k.hilbert_ok && k.diagonal_ok))
        ++failed;
    }
  KoszulCheck counter = koszul_check(non_koszul_example(), 4);
  r.pass = failed == 0 && !counter.diagonal_ok;
  r.detail = std::to_string(count) + " patterns, " + std::to_string(failed) +
             " failing; counterexample diagonal_ok=" + (counter.diagonal_ok ? "true" : "false");
  return r;
}

CriterionResult euler(Battery &b) {
  CriterionResult r{5, "euler_characteristic", true, "", 0};
  const int w = b.cfg().window_min;
  std::ostringstream os;
  for (unsigned n = 1; n <= 5; ++n) {
    TruncSeries chi = chain_euler_series(0, 2 * static_cast<int>(n), w);
    TruncSeries f = ext_dim_formula(n, w);
    bool ok = equal_on_window(chi, n % 2 ? -f : f, w);
    r.pass = r.pass && ok;
    if (!ok)
      os << " n=" << n;
  }
  r.detail = "n<=5 on q>=" + std::to_string(w) + (r.pass ? "" : "; differs at" + os.str());
  return r;
}

CriterionResult chord(Battery &) {
  CriterionResult r{6, "chord_recursion", true, "", 0};
  int bad = 0;
  for (int f = 1; f <= 4; ++f)
    for (int n = 1; n <= 6; ++n) {
      TruncSeries rhs = series_add(t_genfun(f, n - 1),
                                   series_mul(series_shift(qint(n + 1), n), t_genfun(f - 1, n + 1)));
      if (t_genfun(f, n).coeffs() != rhs.coeffs())
        ++bad;
    }
  r.pass = bad == 0;
  r.detail = "f<=4, n<=6, " + std::to_string(bad) + " mismatches";
  return r;
}

CriterionResult pie(Battery &) {
  CriterionResult r{7, "pie_and_finite_differences", true, "", 0};
  int bad_pie = 0, bad_fd = 0;
  for (int n = 0; n <= 10; ++n)
    for (int k = 0; k <= n; ++k)
      if (pie_identity(n, k) != ((n - k) % 2 ? -1 : 1))
        ++bad_pie;
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> nd(1, 10), coeff(-20, 20);
  for (int trial = 0; trial < 50; ++trial) {
    int n = nd(rng);
    std::vector<mpz_class> p(static_cast<std::size_t>(std::uniform_int_distribution<int>(0, n - 1)(rng)) + 1);
    for (auto &c : p)
      c = coeff(rng);
    if (finite_difference_check(p, n) != 0)
      ++bad_fd;
  }
  r.pass = bad_pie == 0 && bad_fd == 0;
  r.detail = "PIE n<=10: " + std::to_string(bad_pie) + " bad; 50 random polynomials: " +
             std::to_string(bad_fd) + " bad";
  return r;
}

CriterionResult bww(Battery &) {
  CriterionResult r{8, "bww_character_formula", true, "", 0};
  std::ostringstream os;
  for (int psi = 0; psi <= 10; psi += 2) {
    TruncSeries got = bww_check(psi, -12);
    TruncSeries want = psi == 0 ? TruncSeries::constant(1) : TruncSeries::truncated({}, -12, 0);
    if (!equal_on_window(got, want, -12)) {
      r.pass = false;
      os << " psi=" << psi << ": " << got.to_string();
    }
  }
  r.detail = "even psi<=10 on q>=-12" + (r.pass ? std::string() : ";" + os.str());
  return r;
}

CriterionResult ext_structure(Battery &) {
  CriterionResult r{9, "ext_structure_hilbert", true, "", 0};
  std::ostringstream os;
  for (int theta = 0; theta <= 6; theta += 2) {
    TruncSeries closed = ext_structure_hilbert(theta, -12);
    const int n = theta / 2;
    TruncSeries shifted = series_shift(
        ext_dim_formula(static_cast<unsigned>(n), -12 + 2 * n * (n - 1)), -2 * n * (n - 1));
    bool oracle = equal_on_window(closed, ext_structure_oracle(theta, -12), -12);
    bool shift = equal_on_window(closed, shifted, -12);
    if (!oracle || !shift) {
      r.pass = false;
      os << " theta=" << theta << (oracle ? "" : " oracle") << (shift ? "" : " shift");
    }
  }
  r.detail = "theta<=6 on q>=-12" + (r.pass ? std::string() : "; mismatch:" + os.str());
  return r;
}

CriterionResult vplus_cycle(Battery &b) {
  CriterionResult r{10, "vplus_cycle", true, "", 0};
  std::ostringstream os;
  for (int n = 1; n <= 4; ++n) {
    TensorWord v = vplus(n);
    const int lowest = 4 * n * (n - 1) / 2;
    GradedComplex c = build_bar_complex(0, 2 * n, lowest - 2, 0, MultMode::Full, b.cfg().threads);
    b.record_square(c);
    CycleClass cc = cycle_class_check({{v, 1}}, c);
    TruncSeries f = ext_dim_formula(static_cast<unsigned>(n), lowest - 2);
    bool weight = v.q_weight() == lowest && f.max_deg() == lowest && f.coeff(lowest) == 1;
    bool adjacent = true;
    for (int t : {0, 1})
      for (std::size_t i = 0; i + 1 < v.factors.size(); ++i) {
        const NormalForm &p = half_algebra(t, MultMode::Full).product(v.factors[i], v.factors[i + 1]);
        adjacent = adjacent && p.inside.is_zero() && p.outside.empty();
      }
    bool ok = cc.is_cycle && cc.nonzero_class && weight && adjacent;
    r.pass = r.pass && ok;
    if (!ok)
      os << " n=" << n << (cc.is_cycle ? "" : " not-cycle") << (cc.nonzero_class ? "" : " zero-class")
         << (weight ? "" : " weight") << (adjacent ? "" : " adjacent");
  }
  r.detail = "n<=4" + (r.pass ? std::string() : ";" + os.str());
  return r;
}

CriterionResult filtration(Battery &b) {
  CriterionResult r{11, "filtration_bookkeeping", true, "", 0};
  int rows = 0, bad = 0;
  for (const auto &row : bgg_report(6, b.cfg().window_min))
    if (row.check_name == "filtration" || row.check_name == "head") {
      ++rows;
      bad += !row.pass;
    }
  r.pass = bad == 0;
  r.detail = "n<=6, " + std::to_string(rows) + " rows, " + std::to_string(bad) + " failing";
  return r;
}

CriterionResult soundness(Battery &b) {
  CriterionResult r{12, "engine_soundness", true, "", 0};
  // associativity of the cap-span multiplication on all triples
  long triples = 0, bad_full = 0, bad_gr = 0;
  for (int t : {0, 1})
    for (int s = 2; s <= 8; ++s)
      for (auto &c : ideal_basis(s, 2))
        for (auto &bb : ideal_basis(c.target(), 2 - c.total_dots()))
          for (auto &a : ideal_basis(bb.target(), 2 - c.total_dots() - bb.total_dots())) {
            const AlgebraElement A = AlgebraElement::basis(a), B = AlgebraElement::basis(bb),
                                 C = AlgebraElement::basis(c);
            ++triples;
            if (multiply(multiply(A, B, t), C, t) != multiply(A, multiply(B, C, t), t))
              ++bad_full;
            if (gr_multiply(gr_multiply(A, B, t), C, t) != gr_multiply(A, gr_multiply(B, C, t), t))
              ++bad_gr;
          }

  // d^2 on every complex of the battery, plus small complexes at t = 1
  for (int t : {0, 1})
    for (MultMode m : {MultMode::Full, MultMode::Graded})
      for (auto [psi, theta] : {std::pair{0, 4}, {0, 6}, {2, 6}})
        b.record_square(build_bar_complex(psi, theta, -6, t, m, b.cfg().threads));
  std::vector<std::string> bad_squares;
  for (const auto &[name, ok] : b.squares())
    if (!ok)
      bad_squares.push_back(name);

  // closure and homogeneity of random exact products
  std::mt19937 rng(2024);
  std::vector<std::vector<CapDiagram>> by_source(9);
  for (int s = 2; s <= 8; ++s)
    by_source[static_cast<std::size_t>(s)] = ideal_basis(s, 2);
  long products = 0, open = 0, inhomogeneous = 0;
  while (products < 10000) {
    int s = std::uniform_int_distribution<int>(4, 8)(rng);
    const auto &vs = by_source[static_cast<std::size_t>(s)];
    const CapDiagram &v = vs[std::uniform_int_distribution<std::size_t>(0, vs.size() - 1)(rng)];
    if (v.target() < 2)
      continue;
    const auto &us = by_source[static_cast<std::size_t>(v.target())];
    const CapDiagram &u = us[std::uniform_int_distribution<std::size_t>(0, us.size() - 1)(rng)];
    const int t = static_cast<int>(products % 2);
    ++products;
    const NormalForm &p = half_algebra(t, MultMode::Full).product(u, v);
    const int degree = diagram_degree(u).degree + diagram_degree(v).degree;
    if (!p.outside.empty())
      ++open;
    for (const auto &[d, c] : p.inside.terms)
      if (!d.is_basis() || diagram_degree(d).degree != degree)
        ++inhomogeneous;
    for (const auto &[o, c] : p.outside)
      if (raw_degree(o.raw()) != degree)
        ++inhomogeneous;
  }

  r.pass = bad_full == 0 && bad_gr == 0 && bad_squares.empty() && open == 0 && inhomogeneous == 0;
  std::ostringstream os;
  os << "associativity: " << bad_full << "/" << triples << " full and " << bad_gr << "/" << triples
     << " gr triples fail; d^2=0 on " << b.squares().size() - bad_squares.size() << "/"
     << b.squares().size() << " complexes";
  if (!bad_squares.empty()) {
    os << ", failing:";
    for (const auto &s : bad_squares)
      os << " " << s;
  }
  os << "; random products: " << open << "/" << products << " leave the cap span, "
     << inhomogeneous << " inhomogeneous terms";
  r.detail = os.str();
  return r;
}

} // namespace

std::vector<CriterionResult>
run_acceptance(const AcceptanceConfig &config,
               const std::function<void(const CriterionResult &)> &on_result) {
  Battery b(config);
  using Check = CriterionResult (*)(Battery &);
  const Check checks[] = {kostant, ext_dims,   koszul_nb,     pattern_koszul, euler,       chord,
                          pie,     bww,        ext_structure, vplus_cycle,    filtration,  soundness};
  std::vector<CriterionResult> out;
  for (Check check : checks) {
    auto start = std::chrono::steady_clock::now();
    CriterionResult r = check(b);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result)
      on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

} // namespace nbw
