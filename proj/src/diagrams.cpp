#include "nbw/diagrams.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "nbw/error.hpp"

namespace nbw {

int CapDiagram::total_dots() const {
  return std::accumulate(dots.begin(), dots.end(), 0);
}

void CapDiagram::canonicalize() {
  std::vector<std::size_t> order(caps.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return caps[x] < caps[y]; });
  std::vector<std::pair<int, int>> c;
  std::vector<int> d;
  for (std::size_t i : order) {
    c.push_back(caps[i]);
    d.push_back(i < dots.size() ? dots[i] : 0);
  }
  caps = std::move(c);
  dots = std::move(d);
  validate();
}

void CapDiagram::validate() const {
  if (source < 0 || target() < 0)
    throw Error(ErrorKind::InvalidWeights, "too many caps for " +
                                               std::to_string(source) +
                                               " strands");
  if (dots.size() != caps.size())
    throw Error(ErrorKind::InvalidWeights, "one dot count per cap required");
  std::vector<bool> used(source + 1, false);
  for (auto [a, b] : caps) {
    if (a < 1 || b > source || a >= b || used[a] || used[b])
      throw Error(ErrorKind::InvalidWeights, "bad cap endpoints");
    used[a] = used[b] = true;
  }
  for (int d : dots)
    if (d < 0)
      throw Error(ErrorKind::InvalidWeights, "negative dot count");
}

bool CapDiagram::is_basis() const {
  try {
    validate();
  } catch (const Error &) {
    return false;
  }
  return std::is_sorted(caps.begin(), caps.end());
}

CapDiagram CapDiagram::identity(int theta) {
  CapDiagram d;
  d.source = theta;
  return d;
}

CapDiagram CapDiagram::single(int source, int a, int b, int dots) {
  CapDiagram d;
  d.source = source;
  d.caps = {{a, b}};
  d.dots = {dots};
  d.validate();
  return d;
}

std::vector<int> CapDiagram::propagating() const {
  std::vector<bool> used(source + 1, false);
  for (auto [a, b] : caps)
    used[a] = used[b] = true;
  std::vector<int> out;
  for (int p = 1; p <= source; ++p)
    if (!used[p])
      out.push_back(p);
  return out;
}

std::string CapDiagram::to_string() const {
  std::ostringstream out;
  out << "[" << source << "->" << target() << ":";
  for (std::size_t i = 0; i < caps.size(); ++i) {
    out << " (" << caps[i].first << "," << caps[i].second << ")";
    if (dots[i] > 0)
      out << "x" << dots[i];
  }
  out << "]";
  return out.str();
}

nlohmann::json CapDiagram::to_json() const {
  nlohmann::json caps_json = nlohmann::json::array();
  for (auto [a, b] : caps)
    caps_json.push_back({a, b});
  return {{"source", source}, {"caps", caps_json}, {"dots", dots}};
}

CapDiagram CapDiagram::from_json(const nlohmann::json &j) {
  CapDiagram d;
  d.source = j.at("source").get<int>();
  for (const auto &c : j.at("caps"))
    d.caps.emplace_back(c.at(0).get<int>(), c.at(1).get<int>());
  d.dots = j.at("dots").get<std::vector<int>>();
  d.canonicalize();
  return d;
}

std::size_t CapDiagramHash::operator()(const CapDiagram &d) const {
  std::size_t h = std::hash<int>()(d.source);
  auto mix = [&h](int v) {
    h ^= std::hash<int>()(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  for (auto [a, b] : d.caps) {
    mix(a);
    mix(b);
  }
  for (int x : d.dots)
    mix(x);
  return h;
}

DegreeInfo diagram_degree(const CapDiagram &d) {
  DegreeInfo info;
  std::vector<bool> capped(d.source + 1, false);
  for (auto [a, b] : d.caps)
    capped[a] = capped[b] = true;
  for (std::size_t i = 0; i < d.caps.size(); ++i) {
    auto [a, b] = d.caps[i];
    for (std::size_t j = i + 1; j < d.caps.size(); ++j) {
      auto [c, e] = d.caps[j];
      if ((a < c && c < b && b < e) || (c < a && a < e && e < b))
        ++info.crossings;
    }
    for (int p = a + 1; p < b; ++p)
      if (!capped[p])
        ++info.crossings;
  }
  info.degree = 2 * d.total_dots() - 2 * info.crossings;
  info.q_weight = -info.degree;
  return info;
}

namespace {

void matchings_rec(std::vector<int> &avail, std::size_t from, int caps_left,
                   std::vector<std::pair<int, int>> &caps,
                   std::vector<std::vector<std::pair<int, int>>> &out) {
  if (caps_left == 0) {
    out.push_back(caps);
    return;
  }
  // find the first still-available point at or after `from`
  std::size_t i = from;
  while (i < avail.size() && avail[i] == 0)
    ++i;
  std::size_t remaining = 0;
  for (std::size_t k = i; k < avail.size(); ++k)
    remaining += avail[k] != 0;
  if (remaining < static_cast<std::size_t>(2 * caps_left))
    return;
  int a = avail[i];
  // a propagates
  avail[i] = 0;
  matchings_rec(avail, i + 1, caps_left, caps, out);
  // a is the left end of a cap
  for (std::size_t j = i + 1; j < avail.size(); ++j) {
    if (avail[j] == 0)
      continue;
    int b = avail[j];
    avail[j] = 0;
    caps.emplace_back(a, b);
    matchings_rec(avail, i + 1, caps_left - 1, caps, out);
    caps.pop_back();
    avail[j] = b;
  }
  avail[i] = a;
}

} // namespace

std::vector<CapDiagram> enumerate_matchings(int source, int cap_count) {
  if (cap_count < 0 || source - 2 * cap_count < 0)
    throw Error(ErrorKind::InvalidWeights,
                "source - 2 * cap_count must be nonnegative");
  std::vector<int> avail(source);
  std::iota(avail.begin(), avail.end(), 1);
  std::vector<std::pair<int, int>> caps;
  std::vector<std::vector<std::pair<int, int>>> raw;
  matchings_rec(avail, 0, cap_count, caps, raw);
  std::vector<CapDiagram> out;
  for (auto &c : raw) {
    CapDiagram d;
    d.source = source;
    d.caps = c;
    d.dots.assign(c.size(), 0);
    d.canonicalize();
    out.push_back(d);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CapDiagram> enumerate_caps(int source, int cap_count,
                                       int max_total_dots) {
  std::vector<CapDiagram> out;
  for (const CapDiagram &m : enumerate_matchings(source, cap_count)) {
    CapDiagram d = m;
    // all compositions of at most max_total_dots into cap_count parts
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
      if (i == d.dots.size()) {
        out.push_back(d);
        return;
      }
      for (int k = 0; k <= left; ++k) {
        d.dots[i] = k;
        rec(i + 1, left - k);
      }
      d.dots[i] = 0;
    };
    rec(0, max_total_dots);
  }
  return out;
}

TruncSeries y_genfun(int target, int source) {
  if (target < 0 || source < target)
    throw Error(ErrorKind::InvalidWeights, "need source >= target >= 0");
  if ((source - target) % 2 != 0)
    throw Error(ErrorKind::ParityMismatch, "source and target parity differ");
  std::map<int, mpz_class> coeffs;
  for (const CapDiagram &d : enumerate_matchings(source, (source - target) / 2))
    coeffs[2 * diagram_degree(d).crossings] += 1;
  return TruncSeries::polynomial(coeffs);
}

TruncSeries t_genfun(int f, int n) { return y_genfun(n, 2 * f + n); }

TruncSeries y_dotted_dim(int target, int source, int window_min) {
  TruncSeries y = y_genfun(target, source);
  int caps = (source - target) / 2;
  TruncSeries dots = series_pow(geometric(2, window_min - y.max_deg()), caps,
                                window_min - y.max_deg());
  if (caps == 0)
    return y;
  return series_mul(y, dots, window_min);
}

TruncSeries x_dotted_dim(int top, int bottom, int window_min) {
  if (top < bottom || bottom < 0)
    throw Error(ErrorKind::InvalidWeights, "need top >= bottom >= 0");
  if ((top - bottom) % 2 != 0)
    throw Error(ErrorKind::ParityMismatch, "top and bottom parity differ");
  return y_dotted_dim(bottom, top, window_min);
}

NestingPattern::NestingPattern(int n)
    : n_(n), rel_(static_cast<std::size_t>(n * n), SegmentRelation::Disjoint) {}

SegmentRelation NestingPattern::rel(int i, int j) const {
  if (i > j)
    std::swap(i, j);
  return rel_[static_cast<std::size_t>(i * n_ + j)];
}

void NestingPattern::set(int i, int j, SegmentRelation r) {
  if (i >= j)
    throw Error(ErrorKind::PreconditionViolated, "need i < j");
  rel_[static_cast<std::size_t>(i * n_ + j)] = r;
}

bool NestingPattern::transitive() const {
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      for (int k = j + 1; k < n_; ++k)
        if (rel(i, j) == SegmentRelation::Inside &&
            rel(j, k) == SegmentRelation::Inside &&
            rel(i, k) != SegmentRelation::Inside)
          return false;
  return true;
}

namespace {

SegmentRelation relation_of(std::pair<int, int> outer_first,
                            std::pair<int, int> other) {
  auto [a, b] = outer_first;
  auto [c, d] = other;
  if (b < c || d < a)
    return SegmentRelation::Disjoint;
  if (a < c && d < b)
    return SegmentRelation::Inside;
  return SegmentRelation::Crossing;
}

NestingPattern pattern_of(const std::vector<std::pair<int, int>> &segments) {
  NestingPattern p(static_cast<int>(segments.size()));
  for (std::size_t i = 0; i < segments.size(); ++i)
    for (std::size_t j = i + 1; j < segments.size(); ++j)
      p.set(static_cast<int>(i), static_cast<int>(j),
            relation_of(segments[i], segments[j]));
  return p;
}

} // namespace

bool NestingPattern::realizable() const {
  if (n_ == 0)
    return true;
  // any configuration of n segments has distinct endpoints 1..2n up to
  // isotopy; try every matching and every labeling consistent with it
  for (const CapDiagram &m : enumerate_matchings(2 * n_, n_)) {
    std::vector<int> perm(static_cast<std::size_t>(n_));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      bool ok = true;
      for (int i = 0; i < n_ && ok; ++i)
        for (int j = i + 1; j < n_ && ok; ++j) {
          auto si = m.caps[static_cast<std::size_t>(perm[i])];
          auto sj = m.caps[static_cast<std::size_t>(perm[j])];
          if (relation_of(sj, si) == SegmentRelation::Inside ||
              relation_of(si, sj) != rel(i, j))
            ok = false;
        }
      if (ok)
        return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return false;
}

std::string NestingPattern::to_string() const {
  std::ostringstream out;
  out << "P" << n_ << "{";
  bool first = true;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) {
      if (!first)
        out << ",";
      first = false;
      out << i + 1 << j + 1 << ":";
      switch (rel(i, j)) {
      case SegmentRelation::Disjoint:
        out << "disjoint";
        break;
      case SegmentRelation::Crossing:
        out << "crossing";
        break;
      case SegmentRelation::Inside:
        out << "inside";
        break;
      }
    }
  out << "}";
  return out.str();
}

nlohmann::json NestingPattern::to_json() const {
  nlohmann::json rels = nlohmann::json::array();
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) {
      const char *name = rel(i, j) == SegmentRelation::Disjoint ? "disjoint"
                         : rel(i, j) == SegmentRelation::Crossing
                             ? "crossing"
                             : "inside";
      rels.push_back({{"i", i + 1}, {"j", j + 1}, {"rel", name}});
    }
  return {{"n", n_}, {"rel", rels}};
}

NestingPattern nesting_pattern(const CapDiagram &d) {
  CapDiagram c = d;
  c.canonicalize();
  return pattern_of(c.caps);
}

std::vector<NestingPattern> all_realizable_patterns(int n) {
  std::set<NestingPattern> seen;
  for (const CapDiagram &m : enumerate_matchings(2 * n, n))
    seen.insert(pattern_of(m.caps));
  return {seen.begin(), seen.end()};
}

} // namespace nbw
