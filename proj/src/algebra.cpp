#include "nbw/algebra.hpp"

#include <algorithm>
#include <sstream>

#include "nbw/error.hpp"

namespace nbw {

AlgebraElement::AlgebraElement(int source_weight, int target_weight)
    : source(source_weight), target(target_weight) {}

AlgebraElement AlgebraElement::basis(const CapDiagram &d) {
  AlgebraElement e(d.source, d.target());
  e.terms[d] = 1;
  return e;
}

mpq_class AlgebraElement::coeff(const CapDiagram &d) const {
  auto it = terms.find(d);
  return it == terms.end() ? mpq_class(0) : it->second;
}

void AlgebraElement::add(const CapDiagram &d, const mpq_class &c) {
  if (c == 0)
    return;
  if (d.source != source || d.target() != target)
    throw Error(ErrorKind::WeightMismatch, "term " + d.to_string() +
                                               " has the wrong weights");
  auto [it, inserted] = terms.try_emplace(d, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0)
      terms.erase(it);
  }
}

void AlgebraElement::add(const AlgebraElement &other, const mpq_class &c) {
  for (const auto &[d, v] : other.terms)
    add(d, v * c);
}

AlgebraElement AlgebraElement::scaled(const mpq_class &c) const {
  AlgebraElement e(source, target);
  if (c == 0)
    return e;
  for (const auto &[d, v] : terms)
    e.terms[d] = v * c;
  return e;
}

std::string AlgebraElement::to_string() const {
  if (terms.empty())
    return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto &[d, c] : terms) {
    if (!first)
      out << (c < 0 ? " - " : " + ");
    else if (c < 0)
      out << "-";
    first = false;
    mpq_class mag = abs(c);
    if (mag != 1)
      out << mag.get_str() << "*";
    out << d.to_string();
  }
  return out.str();
}

nlohmann::json AlgebraElement::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto &[d, c] : terms)
    arr.push_back({{"coeff", c.get_str()}, {"diagram", d.to_json()}});
  return arr;
}

int RawDiagram::target() const {
  int w = source;
  for (const Slice &s : slices) {
    if (s.kind == SliceKind::Cap)
      w -= 2;
    else if (s.kind == SliceKind::Cup)
      w += 2;
  }
  return w;
}

void RawDiagram::validate() const {
  int w = source;
  if (w < 0)
    throw Error(ErrorKind::MalformedRaw, "negative source");
  for (const Slice &s : slices) {
    switch (s.kind) {
    case SliceKind::Cap:
    case SliceKind::Cross:
      if (s.pos < 0 || s.pos + 1 >= w)
        throw Error(ErrorKind::MalformedRaw, "slice position out of range");
      if (s.kind == SliceKind::Cap)
        w -= 2;
      break;
    case SliceKind::Cup:
      if (s.pos < 0 || s.pos > w)
        throw Error(ErrorKind::MalformedRaw, "cup position out of range");
      w += 2;
      break;
    case SliceKind::Dot:
      if (s.pos < 0 || s.pos >= w)
        throw Error(ErrorKind::MalformedRaw, "dot position out of range");
      break;
    }
  }
}

RawDiagram RawDiagram::from_basis(const CapDiagram &d) {
  RawDiagram raw;
  raw.source = d.source;
  std::vector<bool> gone(d.source + 1, false);
  for (std::size_t j = d.caps.size(); j-- > 0;) {
    auto [a, b] = d.caps[j];
    int pa = 0, pb = 0, idx = 0;
    for (int p = 1; p <= d.source; ++p) {
      if (gone[p])
        continue;
      if (p == a)
        pa = idx;
      if (p == b)
        pb = idx;
      ++idx;
    }
    for (int k = 0; k < d.dots[j]; ++k)
      raw.slices.push_back({SliceKind::Dot, pa});
    for (int k = pb - 1; k >= pa + 1; --k)
      raw.slices.push_back({SliceKind::Cross, k});
    raw.slices.push_back({SliceKind::Cap, pa});
    gone[a] = gone[b] = true;
  }
  return raw;
}

RawDiagram RawDiagram::stack(const RawDiagram &top, const RawDiagram &bottom) {
  if (bottom.target() != top.source)
    throw Error(ErrorKind::WeightMismatch, "cannot stack: widths differ");
  RawDiagram raw = bottom;
  raw.slices.insert(raw.slices.end(), top.slices.begin(), top.slices.end());
  return raw;
}

std::string RawDiagram::key() const {
  std::string k;
  k.reserve(2 * slices.size() + 1);
  k.push_back(static_cast<char>(source));
  for (const Slice &s : slices) {
    k.push_back(static_cast<char>(s.kind));
    k.push_back(static_cast<char>(s.pos));
  }
  return k;
}

int OutsideTerm::target() const {
  return static_cast<int>(perm.size() + 2 * cups.size());
}

RawDiagram OutsideTerm::upper() const {
  // built from the top row downwards, then reversed into bottom-up order
  const int w = target();
  std::vector<int> row(w, -1); // prop index at each top position, or -1 - cup
  for (std::size_t i = 0; i < perm.size(); ++i)
    row[perm[i]] = static_cast<int>(i);
  for (std::size_t j = 0; j < cups.size(); ++j)
    row[cups[j].left] = row[cups[j].right] = -1 - static_cast<int>(j);
  std::vector<Slice> down;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (int k = 0; k < dots[i]; ++k)
      down.push_back({SliceKind::Dot, perm[i]});
  for (const Cup &c : cups)
    for (int k = 0; k < c.dots; ++k)
      down.push_back({SliceKind::Dot, c.left});
  for (;;) {
    int best = -1, best_span = w + 1;
    for (int a = 0; a < static_cast<int>(row.size()); ++a)
      if (row[a] < 0)
        for (int b = a + 1; b < static_cast<int>(row.size()); ++b)
          if (row[b] == row[a] && b - a < best_span) {
            best = a;
            best_span = b - a;
          }
    if (best < 0)
      break;
    for (int b = best + best_span; b > best + 1; --b) {
      down.push_back({SliceKind::Cross, b - 1});
      std::swap(row[b - 1], row[b]);
    }
    down.push_back({SliceKind::Cup, best});
    row.erase(row.begin() + best, row.begin() + best + 2);
  }
  for (std::size_t i = 0; i < row.size(); ++i)
    for (std::size_t j = 0; j + 1 < row.size() - i; ++j)
      if (row[j] > row[j + 1]) {
        down.push_back({SliceKind::Cross, static_cast<int>(j)});
        std::swap(row[j], row[j + 1]);
      }
  RawDiagram raw;
  raw.source = static_cast<int>(perm.size());
  raw.slices.assign(down.rbegin(), down.rend());
  return raw;
}

RawDiagram OutsideTerm::raw() const {
  return RawDiagram::stack(upper(), RawDiagram::from_basis(lower));
}

std::string OutsideTerm::to_string() const {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < perm.size(); ++i) {
    out << (i ? " " : "") << i + 1 << "->" << perm[i] + 1;
    if (dots[i])
      out << "x" << dots[i];
  }
  for (const Cup &c : cups) {
    out << " cup(" << c.left + 1 << "," << c.right + 1 << ")";
    if (c.dots)
      out << "x" << c.dots;
  }
  out << "] o " << lower.to_string();
  return out.str();
}

namespace {

enum class EdgeKind : std::uint8_t { Plain, DotEdge, CrossEdge, TurnCap, TurnCup };

struct Edge {
  int slice;
  EdgeKind kind;
  bool up;      // traversal direction when entering the slice
  int pos_from; // strand position before the slice
  int pos_to;   // strand position after the slice
};

enum class End { Bottom, Top, None };

struct Component {
  std::vector<Edge> edges;
  End start = End::None;
  End finish = End::None;
  int start_pos = -1;
  int finish_pos = -1;
};

/** Connectivity of a tangle: components traced from their home end, which
 *  is the top end for strands that reach the top and the left foot for
 *  caps. */
class Trace {
public:
  explicit Trace(const RawDiagram &raw) : raw_(raw) {
    const int L = static_cast<int>(raw.slices.size());
    widths_.resize(L + 1);
    widths_[0] = raw.source;
    for (int s = 0; s < L; ++s) {
      const Slice &sl = raw.slices[s];
      widths_[s + 1] = widths_[s] + (sl.kind == SliceKind::Cap   ? -2
                                     : sl.kind == SliceKind::Cup ? 2
                                                                 : 0);
    }
    offset_.resize(L + 2);
    offset_[0] = 0;
    for (int g = 0; g <= L; ++g)
      offset_[g + 1] = offset_[g] + widths_[g];
    visited_.assign(offset_[L + 1], false);

    for (int p = 0; p < widths_[L]; ++p)
      if (!seen(L, p))
        walk(L, p, false);
    for (int p = 0; p < widths_[0]; ++p)
      if (!seen(0, p))
        walk(0, p, true);
    for (int g = 0; g <= L; ++g)
      for (int p = 0; p < widths_[g]; ++p)
        if (!seen(g, p))
          walk(g, p, true);
  }

  const std::vector<Component> &components() const { return comps_; }

private:
  bool seen(int g, int p) const { return visited_[offset_[g] + p]; }
  void mark(int g, int p) { visited_[offset_[g] + p] = true; }

  void walk(int g0, int p0, bool up) {
    const int L = static_cast<int>(raw_.slices.size());
    Component c;
    c.start = g0 == 0 && up ? End::Bottom : (g0 == L && !up ? End::Top : End::None);
    c.start_pos = p0;
    int g = g0, p = p0;
    mark(g, p);
    for (;;) {
      if (up && g == L) {
        c.finish = End::Top;
        c.finish_pos = p;
        break;
      }
      if (!up && g == 0) {
        c.finish = End::Bottom;
        c.finish_pos = p;
        break;
      }
      int s = up ? g : g - 1;
      const Slice &sl = raw_.slices[s];
      int k = sl.pos;
      Edge e{s, EdgeKind::Plain, up, p, p};
      switch (sl.kind) {
      case SliceKind::Cap:
        if (up && (p == k || p == k + 1)) {
          e.kind = EdgeKind::TurnCap;
          e.pos_to = p == k ? k + 1 : k;
          up = false;
        } else if (up) {
          e.pos_to = p < k ? p : p - 2;
          ++g;
        } else {
          e.pos_to = p < k ? p : p + 2;
          --g;
        }
        break;
      case SliceKind::Cup:
        if (!up && (p == k || p == k + 1)) {
          e.kind = EdgeKind::TurnCup;
          e.pos_to = p == k ? k + 1 : k;
          up = true;
        } else if (up) {
          e.pos_to = p < k ? p : p + 2;
          ++g;
        } else {
          e.pos_to = p < k ? p : p - 2;
          --g;
        }
        break;
      case SliceKind::Cross:
        if (p == k || p == k + 1) {
          e.kind = EdgeKind::CrossEdge;
          e.pos_to = p == k ? k + 1 : k;
        }
        g += up ? 1 : -1;
        break;
      case SliceKind::Dot:
        if (p == k)
          e.kind = EdgeKind::DotEdge;
        g += up ? 1 : -1;
        break;
      }
      p = e.pos_to;
      c.edges.push_back(e);
      if (c.start == End::None && g == g0 && p == p0)
        break;
      mark(g, p);
    }
    comps_.push_back(std::move(c));
  }

  const RawDiagram &raw_;
  std::vector<int> widths_;
  std::vector<int> offset_;
  std::vector<bool> visited_;
  std::vector<Component> comps_;
};

struct Term {
  RawDiagram raw;
  mpq_class coeff;
};

bool is_blocking(EdgeKind k) {
  return k == EdgeKind::CrossEdge || k == EdgeKind::TurnCap ||
         k == EdgeKind::TurnCup;
}

/** Result of one rewriting step. */
struct Step {
  enum Kind { Rewritten, Zero, Final } kind = Final;
  std::vector<Term> children;
};

int count_cross_slices(const RawDiagram &raw) {
  int n = 0;
  for (const Slice &s : raw.slices)
    n += s.kind == SliceKind::Cross;
  return n;
}

/**
 * Moves the dot found at component edge `i` next to the closest blocking
 * slice between it and the home end, then applies the local relation.
 */
Step move_dot(const RawDiagram &raw, const mpq_class &coeff,
              const Component &c, std::size_t i, MultMode mode) {
  std::size_t b = i;
  while (!is_blocking(c.edges[b].kind))
    --b;
  const Edge &dot_edge = c.edges[i];
  const Edge &block = c.edges[b];
  const bool dot_above = dot_edge.up; // traversal climbs from block to dot

  RawDiagram base = raw;
  base.slices.erase(base.slices.begin() + dot_edge.slice);
  int sb = block.slice;
  if (dot_edge.slice < sb)
    --sb;
  int dot_pos = block.pos_to;
  int dot_index;
  if (dot_above) {
    dot_index = sb + 1;
  } else {
    dot_index = sb;
    ++sb;
  }
  base.slices.insert(base.slices.begin() + dot_index, Slice{SliceKind::Dot, dot_pos});

  Step step;
  step.kind = Step::Rewritten;
  const Slice blocking = base.slices[sb];
  const int k = blocking.pos;

  if (blocking.kind == SliceKind::Cap || blocking.kind == SliceKind::Cup) {
    // a dot changes sign when it passes over a cap or under a cup
    RawDiagram moved = base;
    moved.slices[dot_index].pos = dot_pos == k ? k + 1 : k;
    step.children.push_back({std::move(moved), -coeff});
    return step;
  }

  // crossing: x_k s = s x_{k+1} + 1 - e and x_{k+1} s = s x_k - 1 + e
  // (dot above, moving down), mirrored when the dot moves up
  const int smooth_sign = dot_pos == k ? 1 : -1;

  RawDiagram moved = base;
  int new_pos = dot_pos == k ? k + 1 : k;
  std::swap(moved.slices[dot_index], moved.slices[sb]);
  moved.slices[sb].pos = new_pos;
  step.children.push_back({std::move(moved), coeff});

  if (mode == MultMode::Graded)
    return step;

  int lo = std::min(dot_index, sb);
  RawDiagram removed = base;
  removed.slices.erase(removed.slices.begin() + lo, removed.slices.begin() + lo + 2);
  step.children.push_back({removed, coeff * smooth_sign});

  RawDiagram cupcap = removed;
  cupcap.slices.insert(cupcap.slices.begin() + lo,
                       {Slice{SliceKind::Cap, k}, Slice{SliceKind::Cup, k}});
  step.children.push_back({std::move(cupcap), -coeff * smooth_sign});
  return step;
}

struct Outcome {
  bool zero = false;
  bool basis = false;
  CapDiagram diagram;
  OutsideTerm outside;
};

/** Evaluates a tangle whose dots all sit at home. */
Outcome evaluate(const RawDiagram &raw, const Trace &trace, int t) {
  Outcome out;
  const auto &comps = trace.components();
  const std::size_t n = comps.size();
  std::vector<int> comp_of_cross_first(raw.slices.size(), -1);
  std::map<std::pair<int, int>, int> pair_count;
  for (std::size_t ci = 0; ci < n; ++ci)
    for (const Edge &e : comps[ci].edges)
      if (e.kind == EdgeKind::CrossEdge) {
        int &first = comp_of_cross_first[e.slice];
        if (first < 0) {
          first = static_cast<int>(ci);
        } else {
          int a = std::min<int>(first, static_cast<int>(ci));
          int b = std::max<int>(first, static_cast<int>(ci));
          if (a == b || ++pair_count[{a, b}] > 1) {
            out.zero = true;
            return out;
          }
        }
      }

  std::vector<std::pair<int, int>> caps;
  std::vector<int> dots;
  std::vector<std::pair<int, int>> props; // (bottom, top)
  std::vector<int> prop_dots;
  std::vector<std::pair<int, int>> cups;
  std::vector<int> cup_dots;
  for (const Component &c : comps) {
    int d = 0;
    bool crosses = false;
    for (const Edge &e : c.edges) {
      d += e.kind == EdgeKind::DotEdge;
      crosses |= e.kind == EdgeKind::CrossEdge;
    }
    if (c.start == End::None) {
      if (crosses || d > 0 || t == 0) {
        out.zero = true;
        return out;
      }
      continue; // undotted free loop evaluates to t = 1
    }
    if (c.start == End::Bottom) {
      caps.emplace_back(c.start_pos + 1, c.finish_pos + 1);
      dots.push_back(d);
    } else if (c.finish == End::Bottom) {
      props.emplace_back(c.finish_pos, c.start_pos);
      prop_dots.push_back(d);
    } else {
      cups.emplace_back(c.start_pos, c.finish_pos);
      cup_dots.push_back(d);
    }
  }
  CapDiagram y;
  y.source = raw.source;
  y.caps = caps;
  y.dots = dots;
  y.canonicalize();

  std::vector<std::size_t> order(props.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return props[a].first < props[b].first; });
  OutsideTerm top;
  top.lower = y;
  for (std::size_t i : order) {
    top.perm.push_back(props[i].second);
    top.dots.push_back(prop_dots[i]);
  }
  for (std::size_t j = 0; j < cups.size(); ++j)
    top.cups.push_back({cups[j].first, cups[j].second, cup_dots[j]});
  std::sort(top.cups.begin(), top.cups.end());

  bool inside = top.cups.empty();
  for (std::size_t i = 0; i < top.perm.size(); ++i)
    if (top.perm[i] != static_cast<int>(i) || top.dots[i] != 0)
      inside = false;
  if (inside) {
    out.basis = true;
    out.diagram = y;
    return out;
  }
  out.outside = std::move(top);
  return out;
}

/** Finds the first component carrying a dot away from home. */
bool find_dot_to_move(const Trace &trace, std::size_t &comp, std::size_t &edge) {
  const auto &comps = trace.components();
  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    bool blocked = false;
    const auto &edges = comps[ci].edges;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (is_blocking(edges[i].kind))
        blocked = true;
      else if (edges[i].kind == EdgeKind::DotEdge && blocked) {
        comp = ci;
        edge = i;
        return true;
      }
    }
  }
  return false;
}

/** Strand positions occupied by a component at every level. */
std::vector<std::vector<int>> positions_by_level(const RawDiagram &raw, const Component &c) {
  std::vector<std::vector<int>> at(raw.slices.size() + 1);
  for (const Edge &e : c.edges) {
    const int lo = e.slice, hi = e.slice + 1;
    if (e.kind == EdgeKind::TurnCap) {
      at[lo].push_back(e.pos_from);
    } else if (e.kind == EdgeKind::TurnCup) {
      at[hi].push_back(e.pos_from);
    } else if (e.up) {
      at[lo].push_back(e.pos_from);
    } else {
      at[hi].push_back(e.pos_from);
    }
  }
  for (auto &v : at) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return at;
}

/** Level and position of the first point of a closed component. */
std::pair<int, int> start_point(const Component &c) {
  const Edge &e = c.edges.front();
  return {e.up ? e.slice : e.slice + 1, e.pos_from};
}

/**
 * Replaces the first crossingless closed loop that encloses no other
 * component. A loop touching the right boundary region is a bubble on
 * the right: the undotted one evaluates to t and dotted ones are set to
 * zero. Otherwise the loop slides across the strand to its right by
 *   B_n left = B_n right + 2x (B_{n-1} left + B_{n-1} right)
 *              - x^2 (B_{n-2} left - B_{n-2} right) - 2x [n = 1],
 * where B_n is a loop with n dots on the left leg above its bottom and x
 * is a dot on the strand. Returns false when there is no such loop.
 */
bool resolve_bubble(const RawDiagram &raw, const Trace &trace, const mpq_class &coeff, int t,
                    std::vector<Term> &children) {
  const auto &comps = trace.components();
  std::vector<std::size_t> loops;
  for (std::size_t i = 0; i < comps.size(); ++i)
    if (comps[i].start == End::None)
      loops.push_back(i);
  for (std::size_t li : loops) {
    const Component &c = comps[li];
    int n = 0;
    bool crosses = false;
    for (const Edge &e : c.edges) {
      crosses |= e.kind == EdgeKind::CrossEdge;
      n += e.kind == EdgeKind::DotEdge;
    }
    if (crosses)
      continue;
    auto at = positions_by_level(raw, c);
    bool encloses = false;
    for (std::size_t oi : loops) {
      if (oi == li)
        continue;
      auto [g, p] = start_point(comps[oi]);
      int left = 0;
      for (int q : at[g])
        left += q < p;
      if (left % 2 == 1) {
        encloses = true;
        break;
      }
    }
    if (encloses)
      continue;

    // remove the loop, remembering the point right of it on its lowest level
    const int g0 = start_point(c).first;
    std::vector<bool> mine(raw.slices.size(), false);
    for (const Edge &e : c.edges)
      if (e.kind != EdgeKind::Plain)
        mine[e.slice] = true;
    RawDiagram rest;
    rest.source = raw.source;
    int insert_at = 0;
    int width = raw.source;
    for (std::size_t s = 0; s < raw.slices.size(); ++s) {
      const Slice &sl = raw.slices[s];
      if (static_cast<int>(s) < g0)
        width += sl.kind == SliceKind::Cap ? -2 : sl.kind == SliceKind::Cup ? 2 : 0;
      if (mine[s])
        continue;
      Slice moved = sl;
      for (int q : at[s])
        moved.pos -= q < sl.pos;
      rest.slices.push_back(moved);
      if (static_cast<int>(s) < g0)
        ++insert_at;
    }
    width -= static_cast<int>(at[g0].size()); // width of `rest` there
    const int k = at[g0].back() + 1 - static_cast<int>(at[g0].size());

    auto bubble_word = [](int pos, int dots) {
      std::vector<Slice> w{{SliceKind::Cup, pos}};
      for (int i = 0; i < dots; ++i)
        w.push_back({SliceKind::Dot, pos});
      w.push_back({SliceKind::Cap, pos});
      return w;
    };
    auto emit = [&](int strand_dots, int bubble_dots, bool bubble_right, const mpq_class &f) {
      std::vector<Slice> w;
      for (int i = 0; i < strand_dots; ++i)
        w.push_back({SliceKind::Dot, k});
      if (bubble_dots >= 0) {
        auto b = bubble_word(bubble_right ? k + 1 : k, bubble_dots);
        w.insert(w.end(), b.begin(), b.end());
      }
      RawDiagram r = rest;
      r.slices.insert(r.slices.begin() + insert_at, w.begin(), w.end());
      children.push_back({std::move(r), coeff * f});
    };

    if (k >= width) {
      if (n == 0 && t != 0)
        children.push_back({rest, coeff * t});
      return true;
    }
    emit(0, n, true, 1);
    if (n >= 1) {
      emit(1, n - 1, false, 2);
      emit(1, n - 1, true, 2);
    }
    if (n >= 2) {
      emit(2, n - 2, false, -1);
      emit(2, n - 2, true, 1);
    }
    if (n == 1)
      emit(1, -1, false, -2);
    return true;
  }
  return false;
}

} // namespace

NormalForm normal_form(const RawDiagram &raw, int t, MultMode mode) {
  raw.validate();
  NormalForm nf{AlgebraElement(raw.source, raw.target()), {}};

  // pending terms keyed by (crossing count, word) so that identical
  // words produced along different rewriting paths are merged
  using Key = std::pair<int, std::string>;
  std::map<Key, Term, std::greater<Key>> pending;
  auto push = [&](RawDiagram r, const mpq_class &c) {
    if (c == 0)
      return;
    Key key{count_cross_slices(r), r.key()};
    auto [it, inserted] = pending.try_emplace(key, Term{std::move(r), c});
    if (!inserted) {
      it->second.coeff += c;
      if (it->second.coeff == 0)
        pending.erase(it);
    }
  };
  push(raw, 1);

  std::size_t steps = 0;
  const std::size_t step_limit = 50'000'000;
  while (!pending.empty()) {
    if (++steps > step_limit)
      throw Error(ErrorKind::NonTerminating, "rewriting did not terminate");
    auto node = pending.extract(pending.begin());
    Term term = std::move(node.mapped());
    Trace trace(term.raw);
    std::size_t ci = 0, ei = 0;
    if (find_dot_to_move(trace, ci, ei)) {
      Step step = move_dot(term.raw, term.coeff, trace.components()[ci], ei, mode);
      for (Term &child : step.children)
        push(std::move(child.raw), child.coeff);
      continue;
    }
    std::vector<Term> children;
    if (resolve_bubble(term.raw, trace, term.coeff, t, children)) {
      for (Term &child : children)
        push(std::move(child.raw), child.coeff);
      continue;
    }
    Outcome o = evaluate(term.raw, trace, t);
    if (o.zero)
      continue;
    if (o.basis) {
      nf.inside.add(o.diagram, term.coeff);
    } else {
      mpq_class &c = nf.outside[o.outside];
      c += term.coeff;
      if (c == 0)
        nf.outside.erase(o.outside);
    }
  }
  return nf;
}

AlgebraElement normalize(const RawDiagram &raw, int t, MultMode mode) {
  NormalForm nf = normal_form(raw, t, mode);
  if (!nf.outside.empty()) {
    const auto &[term, c] = *nf.outside.begin();
    throw Error(ErrorKind::OutsideHalfAlgebra,
                "normal form leaves the cap basis: " + c.get_str() + " * " + term.to_string());
  }
  return std::move(nf.inside);
}

HalfAlgebra::HalfAlgebra(int t, MultMode mode) : t_(t), mode_(mode) {
  if (t != 0 && t != 1)
    throw Error(ErrorKind::PreconditionViolated, "t must be 0 or 1");
}

std::size_t HalfAlgebra::projected_products() const {
  std::shared_lock lock(mutex_);
  std::size_t n = 0;
  for (const auto &[key, nf] : products_)
    n += !nf.outside.empty();
  return n;
}

std::size_t HalfAlgebra::cache_size() const {
  std::shared_lock lock(mutex_);
  return products_.size() + absorbed_.size();
}

const NormalForm &HalfAlgebra::product(const CapDiagram &u, const CapDiagram &v) {
  if (u.source != v.target())
    throw Error(ErrorKind::WeightMismatch,
                "source of " + u.to_string() + " differs from target of " + v.to_string());
  auto key = std::make_pair(u, v);
  {
    std::shared_lock lock(mutex_);
    auto it = products_.find(key);
    if (it != products_.end())
      return it->second;
  }
  NormalForm nf = normal_form(
      RawDiagram::stack(RawDiagram::from_basis(u), RawDiagram::from_basis(v)), t_, mode_);
  std::unique_lock lock(mutex_);
  return products_.try_emplace(std::move(key), std::move(nf)).first->second;
}

const NormalForm &HalfAlgebra::absorb(const CapDiagram &u, const OutsideTerm &outside) {
  OutsideTerm upper = outside;
  upper.lower = CapDiagram();
  if (u.source != upper.target())
    throw Error(ErrorKind::WeightMismatch, "cannot place " + u.to_string() + " on top");
  auto key = std::make_pair(u, std::move(upper));
  {
    std::shared_lock lock(mutex_);
    auto it = absorbed_.find(key);
    if (it != absorbed_.end())
      return it->second;
  }
  NormalForm nf =
      normal_form(RawDiagram::stack(RawDiagram::from_basis(u), outside.upper()), t_, mode_);
  std::unique_lock lock(mutex_);
  return absorbed_.try_emplace(std::move(key), std::move(nf)).first->second;
}

AlgebraElement HalfAlgebra::multiply_basis(const CapDiagram &u, const CapDiagram &v) {
  if (u.source != v.target())
    throw Error(ErrorKind::WeightMismatch,
                "source of " + u.to_string() + " differs from target of " + v.to_string());
  if (u.caps.empty())
    return AlgebraElement::basis(v);
  if (v.caps.empty())
    return AlgebraElement::basis(u);
  return product(u, v).inside;
}

AlgebraElement HalfAlgebra::multiply(const AlgebraElement &u, const AlgebraElement &v) {
  if (u.source != v.target)
    throw Error(ErrorKind::WeightMismatch, "source(u) must equal target(v)");
  AlgebraElement out(v.source, u.target);
  for (const auto &[du, cu] : u.terms)
    for (const auto &[dv, cv] : v.terms)
      out.add(multiply_basis(du, dv), cu * cv);
  return out;
}

HalfAlgebra &half_algebra(int t, MultMode mode) {
  static HalfAlgebra full0(0, MultMode::Full), full1(1, MultMode::Full),
      gr0(0, MultMode::Graded), gr1(1, MultMode::Graded);
  if (t != 0 && t != 1)
    throw Error(ErrorKind::PreconditionViolated, "t must be 0 or 1");
  if (mode == MultMode::Full)
    return t == 0 ? full0 : full1;
  return t == 0 ? gr0 : gr1;
}

AlgebraElement multiply(const AlgebraElement &u, const AlgebraElement &v, int t) {
  return half_algebra(t, MultMode::Full).multiply(u, v);
}

AlgebraElement gr_multiply(const AlgebraElement &u, const AlgebraElement &v, int t) {
  return half_algebra(t, MultMode::Graded).multiply(u, v);
}

int TensorWord::q_weight() const {
  int w = 0;
  for (const CapDiagram &d : factors)
    w += diagram_degree(d).q_weight;
  return w;
}

void TensorWord::validate() const {
  if (factors.empty())
    throw Error(ErrorKind::InvalidWeights, "empty tensor word");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].caps.empty())
      throw Error(ErrorKind::InvalidWeights, "tensor factor without caps");
    if (i + 1 < factors.size() && factors[i + 1].target() != factors[i].source)
      throw Error(ErrorKind::WeightMismatch, "adjacent factors do not compose");
  }
}

std::string TensorWord::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i)
      s += " (x) ";
    s += factors[i].to_string();
  }
  return s;
}

nlohmann::json TensorWord::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const CapDiagram &d : factors)
    arr.push_back(d.to_json());
  return arr;
}

TensorWord vplus(int n) {
  if (n < 1)
    throw Error(ErrorKind::PreconditionViolated, "vplus needs n >= 1");
  TensorWord w;
  for (int k = n; k >= 1; --k) {
    int src = 2 * (n - k + 1);
    w.factors.push_back(CapDiagram::single(src, 1, src));
  }
  return w;
}

} // namespace nbw
