#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nbw/acceptance.hpp"
#include "nbw/characters.hpp"
#include "nbw/diagrams.hpp"
#include "nbw/error.hpp"
#include "nbw/homology.hpp"
#include "nbw/koszul.hpp"

using nlohmann::json;
using namespace nbw;

namespace {

/** Flags shared by every subcommand, plus the command-specific ones. */
struct RunConfig {
  int t = 0;
  int theta = -1;
  int psi = 0;
  int window_min = -10;
  int hom_max = 4;
  int segments = 4;
  int psi_max = 10;
  int pie_n = 10;
  int seed = 11;
  std::string method = "direct";
  bool graded = false;
  std::string format = "text";
  std::string out_path;
  unsigned threads = 0;

  json to_json(const std::string &command) const {
    json j = {{"t", t},           {"window_min", window_min}, {"format", format},
              {"threads", threads}};
    if (theta >= 0)
      j["theta"] = theta;
    if (!out_path.empty())
      j["out"] = out_path;
    if (command == "ext") {
      j["psi"] = psi;
      j["method"] = method;
      j["mode"] = graded ? "gr" : "full";
    }
    if (command == "koszul") {
      j["hom_max"] = hom_max;
      j["segments"] = segments;
    }
    if (command == "bww")
      j["psi_max"] = psi_max;
    if (command == "identities") {
      j["pie_n"] = pie_n;
      j["seed"] = seed;
    }
    return j;
  }
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** Rows, failures and free text lines of one run. */
struct Report {
  json rows = json::array();
  json failures = json::array();
  std::vector<std::string> text;

  void fail(const std::string &check, const json &where) {
    failures.push_back({{"check", check}, {"where", where}});
  }
};

std::string pass_word(bool ok) { return ok ? "PASS" : "FAIL"; }

Report run_dims(const RunConfig &c) {
  Report r;
  const int theta = c.theta < 0 ? 8 : c.theta;
  for (int source = 0; source <= theta; ++source)
    for (int target = source % 2; target <= source; target += 2) {
      TruncSeries y = y_genfun(target, source);
      r.rows.push_back({{"table", "Y"}, {"target", target}, {"source", source}, {"series", y.to_json()}});
      r.text.push_back("Y[" + std::to_string(target) + "," + std::to_string(source) +
                       "] = " + y.to_string());
    }
  for (int f = 0; 2 * f <= theta; ++f)
    for (int n = 0; 2 * f + n <= theta; ++n) {
      TruncSeries tf = t_genfun(f, n);
      r.rows.push_back({{"table", "T"}, {"f", f}, {"n", n}, {"series", tf.to_json()}});
      r.text.push_back("T[" + std::to_string(f) + "," + std::to_string(n) + "] = " + tf.to_string());
    }
  return r;
}

Report run_ext(const RunConfig &c) {
  if (c.theta < 0)
    throw UsageError("ext needs --theta");
  if (c.theta <= c.psi || (c.theta - c.psi) % 2 != 0)
    throw UsageError("ext needs psi < theta with the same parity");
  Report r;
  ConcentrationReport rep;
  if (c.method == "labels") {
    if (c.t != 0)
      throw UsageError("--method labels needs --t 0");
    rep = dot_label_report(c.psi, c.theta, c.window_min, c.threads);
    r.text.push_back("graded complex from dotless words with dot labels");
  } else {
    GradedComplex cx = build_bar_complex(c.psi, c.theta, c.window_min, c.t,
                                         c.graded ? MultMode::Graded : MultMode::Full, c.threads);
    bool square = boundary_squared_zero(cx);
    r.text.push_back(std::to_string(cx.size()) + " words; d^2 = 0: " + pass_word(square));
    if (!square)
      r.fail("d_squared_zero", {{"psi", c.psi}, {"theta", c.theta}});
    rep.table = homology_table(cx, c.threads);
    rep.at = cx.top_position();
    rep.concentrated = true;
    for (int k : rep.table.nonzero_positions())
      if (k != rep.at)
        rep.concentrated = false;
    rep.dims = rep.table.series(rep.at);
  }
  for (auto &row : rep.table.to_json()) {
    r.rows.push_back(row);
    r.text.push_back("H" + std::to_string(row["hom_degree"].get<int>()) + " q^" +
                     std::to_string(row["q_degree"].get<int>()) + ": " +
                     std::to_string(row["dim"].get<long>()));
  }
  r.text.push_back("concentrated at n=" + std::to_string(rep.at) + ": " + pass_word(rep.concentrated));
  if (!rep.concentrated)
    r.fail("concentration", {{"psi", c.psi}, {"theta", c.theta}});
  if (c.psi == 0 && c.t == 0) {
    bool ok = equal_on_window(rep.dims, ext_dim_formula(static_cast<unsigned>(c.theta / 2), c.window_min),
                              c.window_min);
    r.text.push_back("dimension formula: " + pass_word(ok));
    if (!ok)
      r.fail("ext_dim_formula", {{"theta", c.theta}});
  }
  return r;
}

Report run_koszul(const RunConfig &c) {
  Report r;
  for (int n = 1; n <= c.segments; ++n)
    for (const auto &p : all_realizable_patterns(n)) {
      KoszulCheck k = koszul_check(pattern_algebra(p), c.hom_max);
      bool ok = k.hilbert_ok && k.diagonal_ok;
      r.rows.push_back({{"pattern", p.to_json()},
                        {"hilbert", k.hilbert},
                        {"dual_hilbert", k.dual_hilbert},
                        {"hilbert_ok", k.hilbert_ok},
                        {"diagonal_ok", k.diagonal_ok}});
      r.text.push_back(p.to_string() + ": " + pass_word(ok));
      if (!ok)
        r.fail("pattern_koszul", p.to_json());
    }
  KoszulCheck k = koszul_check(non_koszul_example(), c.hom_max);
  r.rows.push_back({{"pattern", "counterexample"},
                    {"hilbert", k.hilbert},
                    {"dual_hilbert", k.dual_hilbert},
                    {"hilbert_ok", k.hilbert_ok},
                    {"diagonal_ok", k.diagonal_ok}});
  r.text.push_back(std::string("counterexample fails the diagonal test: ") + pass_word(!k.diagonal_ok));
  if (k.diagonal_ok)
    r.fail("counterexample_not_koszul", "counterexample");
  return r;
}

Report run_bww(const RunConfig &c) {
  Report r;
  for (int psi = 0; psi <= c.psi_max; psi += 2) {
    TruncSeries res = bww_check(psi, c.window_min);
    TruncSeries want = psi == 0 ? TruncSeries::constant(1) : TruncSeries::truncated({}, c.window_min, 0);
    bool ok = equal_on_window(res, want, c.window_min);
    r.rows.push_back({{"psi", psi}, {"residual", res.to_json()}, {"pass", ok}});
    r.text.push_back("psi=" + std::to_string(psi) + " residual " + res.to_string() + ": " + pass_word(ok));
    if (!ok)
      r.fail("bww", {{"psi", psi}});
  }
  return r;
}

Report run_bgg(const RunConfig &c) {
  Report r;
  const int theta = c.theta < 0 ? 6 : c.theta;
  for (const auto &row : bgg_report(theta / 2, c.window_min)) {
    r.rows.push_back(to_json(row));
    r.text.push_back(row.check_name + " n=" + std::to_string(row.n) + " psi=" + std::to_string(row.psi) +
                     ": " + row.series.to_string() + " " + pass_word(row.pass));
    if (!row.pass)
      r.fail(row.check_name, {{"n", row.n}, {"psi", row.psi}});
  }
  return r;
}

Report run_identities(const RunConfig &c) {
  Report r;
  for (int n = 0; n <= c.pie_n; ++n)
    for (int k = 0; k <= n; ++k) {
      mpz_class v = pie_identity(n, k);
      bool ok = v == ((n - k) % 2 ? -1 : 1);
      r.rows.push_back({{"suite", "pie"}, {"n", n}, {"k", k}, {"value", v.get_str()}, {"pass", ok}});
      r.text.push_back("pie n=" + std::to_string(n) + " k=" + std::to_string(k) + ": " + pass_word(ok));
      if (!ok)
        r.fail("pie", {{"n", n}, {"k", k}});
    }
  std::mt19937 rng(static_cast<unsigned>(c.seed));
  std::uniform_int_distribution<int> nd(1, std::max(1, c.pie_n)), coeff(-20, 20);
  for (int trial = 0; trial < 50; ++trial) {
    int n = nd(rng);
    std::vector<mpz_class> p(static_cast<std::size_t>(std::uniform_int_distribution<int>(0, n - 1)(rng)) + 1);
    json poly = json::array();
    for (auto &x : p) {
      x = coeff(rng);
      poly.push_back(x.get_si());
    }
    mpz_class v = finite_difference_check(p, n);
    r.rows.push_back({{"suite", "finite_difference"}, {"n", n}, {"poly", poly}, {"value", v.get_str()},
                      {"pass", v == 0}});
    if (v != 0)
      r.fail("finite_difference", {{"n", n}, {"poly", poly}});
  }
  r.text.push_back("finite differences: 50 random polynomials");
  for (int f = 1; f <= 4; ++f)
    for (int n = 1; n <= 6; ++n) {
      TruncSeries rhs = series_add(t_genfun(f, n - 1),
                                   series_mul(series_shift(qint(n + 1), n), t_genfun(f - 1, n + 1)));
      bool ok = t_genfun(f, n).coeffs() == rhs.coeffs();
      r.rows.push_back({{"suite", "chord_recursion"}, {"f", f}, {"n", n}, {"pass", ok}});
      if (!ok)
        r.fail("chord_recursion", {{"f", f}, {"n", n}});
    }
  r.text.push_back("chord recursion f<=4, n<=6");
  r.text.push_back(std::to_string(r.failures.size()) + " failures");
  return r;
}

Report run_selftest(const RunConfig &c) {
  Report r;
  AcceptanceConfig a;
  a.window_min = c.window_min;
  a.threads = c.threads;
  for (const auto &res : run_acceptance(a, [&](const CriterionResult &x) {
         if (c.format == "text" && c.out_path.empty())
           std::cout << x.line() << std::endl;
       })) {
    r.rows.push_back(res.to_json());
    if (c.format != "text" || !c.out_path.empty())
      r.text.push_back(res.line());
    if (!res.pass)
      r.fail(res.name, {{"criterion", res.id}});
  }
  return r;
}

std::string csv_cell(const json &v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string q = "\"";
  for (char ch : s)
    q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::string render(const std::string &command, const RunConfig &c, const Report &r) {
  std::ostringstream os;
  if (c.format == "json") {
    os << json{{"command", command}, {"config", c.to_json(command)}, {"rows", r.rows},
               {"failures", r.failures}}
              .dump(2)
       << "\n";
  } else if (c.format == "csv") {
    std::vector<std::string> keys;
    std::set<std::string> seen;
    for (const auto &row : r.rows)
      for (const auto &[k, v] : row.items())
        if (seen.insert(k).second)
          keys.push_back(k);
    for (std::size_t i = 0; i < keys.size(); ++i)
      os << (i ? "," : "") << keys[i];
    os << "\n";
    for (const auto &row : r.rows) {
      for (std::size_t i = 0; i < keys.size(); ++i)
        os << (i ? "," : "") << (row.contains(keys[i]) ? csv_cell(row[keys[i]]) : "");
      os << "\n";
    }
  } else {
    for (const auto &line : r.text)
      os << line << "\n";
    os << (r.failures.empty() ? "all checks PASS" : std::to_string(r.failures.size()) + " checks FAIL")
       << "\n";
  }
  return os.str();
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"nbw: nilBrauer half algebra workbench"};
  app.require_subcommand(1);
  RunConfig c;

  auto common = [&](CLI::App *s) {
    s->add_option("--t", c.t, "Loop parameter")->check(CLI::IsMember({0, 1}));
    s->add_option("--window-min", c.window_min, "Lowest trusted q-degree")->check(CLI::Range(-1000, 0));
    s->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
    s->add_option("--out", c.out_path, "Write the output to this file");
    s->add_option("--threads", c.threads, "Worker count (0: all cores)");
  };
  auto theta_opt = [&](CLI::App *s, const std::string &help) {
    s->add_option("--theta", c.theta, help)->check(CLI::Range(0, 40));
  };

  CLI::App *dims = app.add_subcommand("dims", "Y and T generating functions");
  common(dims);
  theta_opt(dims, "Largest source weight (default 8)");
  CLI::App *ext = app.add_subcommand("ext", "Bar complex homology of e^psi I e^theta");
  common(ext);
  theta_opt(ext, "Source weight");
  ext->add_option("--psi", c.psi, "Target weight")->check(CLI::Range(0, 40));
  ext->add_option("--method", c.method, "direct or labels")->check(CLI::IsMember({"direct", "labels"}));
  ext->add_flag("--gr", c.graded, "Associated graded multiplication");
  CLI::App *koszul = app.add_subcommand("koszul", "Koszul checks of all pattern algebras");
  common(koszul);
  koszul->add_option("--segments", c.segments, "Largest number of segments")->check(CLI::Range(1, 5));
  koszul->add_option("--hom-max", c.hom_max, "Largest degree checked")->check(CLI::Range(1, 8));
  CLI::App *bww = app.add_subcommand("bww", "Character identity residuals per weight");
  common(bww);
  bww->add_option("--psi-max", c.psi_max, "Largest weight")->check(CLI::Range(0, 30));
  CLI::App *bgg = app.add_subcommand("bgg-report", "Resolution term characters and filtration identities");
  common(bgg);
  theta_opt(bgg, "Largest weight 2n (default 6)");
  CLI::App *ids = app.add_subcommand("identities", "Inclusion-exclusion, finite difference and chord suites");
  common(ids);
  ids->add_option("--pie-n", c.pie_n, "Largest n")->check(CLI::Range(0, 60));
  ids->add_option("--seed", c.seed, "Seed for the random polynomials");
  CLI::App *self = app.add_subcommand("selftest", "The acceptance battery");
  common(self);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    Report r;
    if (command == "dims")
      r = run_dims(c);
    else if (command == "ext")
      r = run_ext(c);
    else if (command == "koszul")
      r = run_koszul(c);
    else if (command == "bww")
      r = run_bww(c);
    else if (command == "bgg-report")
      r = run_bgg(c);
    else if (command == "identities")
      r = run_identities(c);
    else
      r = run_selftest(c);

    const std::string text = render(command, c, r);
    if (c.out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(c.out_path);
      if (!f) {
        std::cerr << "cannot write " << c.out_path << "\n";
        return 2;
      }
      f << text;
    }
    return r.failures.empty() ? 0 : 1;
  } catch (const UsageError &e) {
    std::cerr << "usage: " << e.what() << "\n";
    return 2;
  } catch (const Error &e) {
    std::cerr << e.what() << "\n";
    return e.kind() == ErrorKind::PreconditionViolated ? 2 : 1;
  }
}
