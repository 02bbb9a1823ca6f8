#pragma once

#include <algorithm>
#include <cctype>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "itw/common.hpp"

namespace itw {

// One resolution level of the point grid: integer translations k with
// lo <= k <= hi per axis, at spacing 2^-j grid units.
struct LevelBox {
  int j = 0;
  std::array<int, 3> lo{};
  std::array<int, 3> hi{};

  static LevelBox cube(int j, int n) { return LevelBox{j, {-n, -n, -n}, {n, n, n}}; }
  static LevelBox box(int j, std::array<int, 3> n) {
    return LevelBox{j, {-n[0], -n[1], -n[2]}, n};
  }
  bool symmetric() const {
    return lo[0] == -hi[0] && lo[1] == -hi[1] && lo[2] == -hi[2];
  }
};

// Grid description: per-level boxes plus the Bohr-per-grid-unit scale factor.
struct GridSpec {
  std::vector<LevelBox> levels;  // ascending j, distinct
  double scale_a = 1.0;

  int jmin() const { return levels.front().j; }
  int jmax() const { return levels.back().j; }

  void validate() const {
    if (levels.empty()) throw std::invalid_argument("GridSpec: no levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      for (int d = 0; d < 3; ++d)
        if (levels[i].lo[d] > levels[i].hi[d])
          throw std::invalid_argument("GridSpec: empty box");
      if (i > 0 && levels[i].j <= levels[i - 1].j)
        throw std::invalid_argument("GridSpec: levels must be strictly ascending");
    }
    if (!(scale_a > 0.0)) throw std::invalid_argument("GridSpec: scale must be positive");
  }

  // Atomic-reference convention: every box is replaced by the cube of its
  // smallest half-width.
  GridSpec symmetrized_for_atom() const {
    GridSpec out = *this;
    for (auto& lv : out.levels) {
      int n = std::min({lv.hi[0], lv.hi[1], lv.hi[2], -lv.lo[0], -lv.lo[1], -lv.lo[2]});
      lv = LevelBox::cube(lv.j, n);
    }
    return out;
  }

  static GridSpec parse(std::string_view text);
  std::string format() const;
};

// Points of one level sharing a parity type t in {0,1}^3, stored as a dense
// box of wavelet translations l.  alpha = 2^-j k with k = 2l + t (k = l at the
// coarsest level); the 1D factors live on effective level iota.
struct ParityClass {
  int j = 0;
  int iota = 0;
  std::array<int, 3> t{};
  std::array<int, 3> lo{}, hi{};
  std::size_t offset = 0;

  std::array<int, 3> extent() const {
    return {hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1};
  }
  std::size_t size() const {
    auto e = extent();
    return std::size_t(e[0]) * std::size_t(e[1]) * std::size_t(e[2]);
  }
  std::size_t index_of(std::array<int, 3> l) const {
    auto e = extent();
    return offset + (std::size_t(l[0] - lo[0]) * std::size_t(e[1]) +
                     std::size_t(l[1] - lo[1])) * std::size_t(e[2]) +
           std::size_t(l[2] - lo[2]);
  }
  bool contains(std::array<int, 3> l) const {
    return l[0] >= lo[0] && l[0] <= hi[0] && l[1] >= lo[1] && l[1] <= hi[1] &&
           l[2] >= lo[2] && l[2] <= hi[2];
  }
};

// The finite multilevel grid G = union_j (box_j intersect Q_j), decomposed
// into parity classes with a deterministic dense ordering.
class MultiGrid {
 public:
  static std::shared_ptr<const MultiGrid> build(const GridSpec& spec) {
    spec.validate();
    auto g = std::make_shared<MultiGrid>();
    g->spec_ = spec;
    std::size_t off = 0;
    for (const auto& lv : spec.levels) {
      bool coarsest = (lv.j == spec.jmin());
      if (coarsest) {
        ParityClass pc;
        pc.j = lv.j;
        pc.iota = lv.j;
        pc.t = {0, 0, 0};
        pc.lo = lv.lo;
        pc.hi = lv.hi;
        pc.offset = off;
        off += pc.size();
        g->classes_.push_back(pc);
      } else {
        for (int tc = 1; tc < 8; ++tc) {
          ParityClass pc;
          pc.j = lv.j;
          pc.iota = lv.j - 1;
          pc.t = {(tc >> 2) & 1, (tc >> 1) & 1, tc & 1};
          bool ok = true;
          for (int d = 0; d < 3; ++d) {
            // k in [lo,hi] with k = 2l + t
            pc.lo[d] = ceil_div2(lv.lo[d] - pc.t[d]);
            pc.hi[d] = floor_div2(lv.hi[d] - pc.t[d]);
            if (pc.lo[d] > pc.hi[d]) ok = false;
          }
          if (!ok) continue;
          pc.offset = off;
          off += pc.size();
          g->classes_.push_back(pc);
        }
      }
    }
    g->size_ = off;
    if (off == 0) throw std::invalid_argument("MultiGrid: empty grid");
    return g;
  }

  std::size_t size() const { return size_; }
  const std::vector<ParityClass>& classes() const { return classes_; }
  const GridSpec& spec() const { return spec_; }
  double scale_a() const { return spec_.scale_a; }
  int jmin() const { return spec_.jmin(); }
  int jmax() const { return spec_.jmax(); }

  // level box in k-index units (k = 2^j alpha)
  const LevelBox* level_box(int j) const {
    for (const auto& lv : spec_.levels)
      if (lv.j == j) return &lv;
    return nullptr;
  }

  std::size_t level_count(int j) const {
    std::size_t n = 0;
    for (const auto& pc : classes_)
      if (pc.j == j) n += pc.size();
    return n;
  }

  struct Point {
    int j = 0;
    std::array<int, 3> k{};  // alpha = 2^-j k
  };

  Point point_at(std::size_t idx) const {
    const ParityClass& pc = class_of(idx);
    std::size_t r = idx - pc.offset;
    auto e = pc.extent();
    int lz = int(r % std::size_t(e[2]));
    r /= std::size_t(e[2]);
    int ly = int(r % std::size_t(e[1]));
    int lx = int(r / std::size_t(e[1]));
    std::array<int, 3> l = {pc.lo[0] + lx, pc.lo[1] + ly, pc.lo[2] + lz};
    Point p;
    p.j = pc.j;
    bool coarsest = (pc.j == jmin());
    for (int d = 0; d < 3; ++d) p.k[d] = coarsest ? l[d] : 2 * l[d] + pc.t[d];
    return p;
  }

  const ParityClass& class_of(std::size_t idx) const {
    if (idx >= size_) throw std::out_of_range("MultiGrid: index out of range");
    std::size_t lo = 0, hi = classes_.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi + 1) / 2;
      if (classes_[mid].offset <= idx) lo = mid;
      else hi = mid - 1;
    }
    return classes_[lo];
  }

  // index of the point alpha = 2^-j k owned by level j, if present
  std::optional<std::size_t> index_of(int j, std::array<int, 3> k) const {
    bool coarsest = (j == jmin());
    std::array<int, 3> t{}, l{};
    for (int d = 0; d < 3; ++d) {
      if (coarsest) {
        t[d] = 0;
        l[d] = k[d];
      } else {
        t[d] = k[d] & 1;
        if (k[d] < 0) t[d] = (k[d] % 2 + 2) % 2;
        l[d] = (k[d] - t[d]) / 2;
      }
    }
    if (!coarsest && t[0] == 0 && t[1] == 0 && t[2] == 0) return std::nullopt;
    for (const auto& pc : classes_) {
      if (pc.j != j || pc.t != t) continue;
      if (!pc.contains(l)) return std::nullopt;
      return pc.index_of(l);
    }
    return std::nullopt;
  }

  // owning-level index of the finest-mesh point k at level jfine (Q_j membership)
  std::optional<std::size_t> index_of_mesh_point(int jfine, std::array<int, 3> k) const {
    int j = jfine;
    while (j > jmin() && (k[0] & 1) == 0 && (k[1] & 1) == 0 && (k[2] & 1) == 0) {
      for (int d = 0; d < 3; ++d) k[d] /= 2;
      --j;
    }
    return index_of(j, k);
  }

  std::array<double, 3> position(std::size_t idx) const {  // grid units
    Point p = point_at(idx);
    double s = dpow2(-p.j);
    return {p.k[0] * s, p.k[1] * s, p.k[2] * s};
  }
  std::array<double, 3> position_bohr(std::size_t idx) const {
    auto r = position(idx);
    return {r[0] * spec_.scale_a, r[1] * spec_.scale_a, r[2] * spec_.scale_a};
  }

  // Integral of the basis function attached to each point of a class, in Bohr^3.
  double class_weight(const ParityClass& pc) const {
    double w = 1.0;
    for (int d = 0; d < 3; ++d) w *= dpow2(-(pc.iota + pc.t[d]));
    double a = spec_.scale_a;
    return w * a * a * a;
  }

  // Whole grid shifted by an integer vector of the coarsest-level lattice.
  std::shared_ptr<const MultiGrid> translated(std::array<int, 3> shift) const {
    GridSpec s = spec_;
    for (auto& lv : s.levels) {
      int f = ipow2(lv.j - s.jmin());
      for (int d = 0; d < 3; ++d) {
        lv.lo[d] += f * shift[d];
        lv.hi[d] += f * shift[d];
      }
    }
    return build(s);
  }

 private:
  GridSpec spec_;
  std::vector<ParityClass> classes_;
  std::size_t size_ = 0;
};

inline std::shared_ptr<const MultiGrid> build_grid(const GridSpec& spec) {
  return MultiGrid::build(spec);
}

// ---- grid notation ----
//
//   grid := term ("u" term)*
//   term := [frac] box | box "@" frac
//   box  := "Z" n "^3" | "Z" n "x" "Z" n "x" "Z" n
//   frac := "1" | "2^p" | "1/2^p" | power-of-two integer or its reciprocal
//
// e.g. "1/2 Z20^3 u 1/4 Z10^3", "Z4xZ4xZ10 @ 1/8".

namespace detail {

struct Cursor {
  std::string_view s;
  std::size_t i = 0;
  void skip_ws() {
    while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
  }
  bool eat(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) { ++i; return true; }
    return false;
  }
  bool eat_str(std::string_view w) {
    skip_ws();
    if (s.substr(i, w.size()) == w) { i += w.size(); return true; }
    return false;
  }
  int read_int() {
    skip_ws();
    std::size_t b = i;
    while (i < s.size() && std::isdigit((unsigned char)s[i])) ++i;
    if (i == b) throw ParseError("expected integer", b);
    return std::stoi(std::string(s.substr(b, i - b)));
  }
  bool done() {
    skip_ws();
    return i >= s.size();
  }
};

// fraction 2^-j as a level index j
inline int parse_level(Cursor& c) {
  c.skip_ws();
  std::size_t at = c.i;
  bool recip = false;
  int v = c.read_int();
  if (c.eat('/')) {
    if (v != 1) throw ParseError("fraction numerator must be 1", at);
    recip = true;
    v = c.read_int();
  }
  int p = 0;
  if (c.eat('^')) {
    if (v != 2) throw ParseError("only powers of two are allowed", at);
    p = c.read_int();
  } else {
    while (v > 1) {
      if (v % 2) throw ParseError("grid spacing must be a power of two", at);
      v /= 2;
      ++p;
    }
  }
  return recip ? p : -p;
}

inline std::array<int, 3> parse_box(Cursor& c) {
  if (!(c.eat('Z') || c.eat('z'))) throw ParseError("expected 'Z'", c.i);
  c.eat_str("±") || c.eat_str("+-");
  int nx = c.read_int();
  if (c.eat('^')) {
    std::size_t at = c.i;
    if (c.read_int() != 3) throw ParseError("only ^3 boxes exist", at);
    return {nx, nx, nx};
  }
  if (c.eat('x') || c.eat('X') || c.eat_str("×")) {
    if (!(c.eat('Z') || c.eat('z'))) throw ParseError("expected 'Z'", c.i);
    c.eat_str("±") || c.eat_str("+-");
    int ny = c.read_int();
    if (!(c.eat('x') || c.eat('X') || c.eat_str("×")))
      throw ParseError("expected 'x'", c.i);
    if (!(c.eat('Z') || c.eat('z'))) throw ParseError("expected 'Z'", c.i);
    c.eat_str("±") || c.eat_str("+-");
    int nz = c.read_int();
    return {nx, ny, nz};
  }
  throw ParseError("expected '^3' or 'x'", c.i);
}

}  // namespace detail

inline GridSpec GridSpec::parse(std::string_view text) {
  detail::Cursor c{text};
  GridSpec spec;
  if (c.done()) throw ParseError("empty grid notation", 0);
  while (true) {
    c.skip_ws();
    int j = 0;
    bool have_level = false;
    if (c.i < c.s.size() && c.s[c.i] != 'Z' && c.s[c.i] != 'z') {
      j = detail::parse_level(c);
      have_level = true;
    }
    auto n = detail::parse_box(c);
    if (c.eat('@')) {
      if (have_level) throw ParseError("duplicate spacing for term", c.i);
      j = detail::parse_level(c);
    }
    spec.levels.push_back(LevelBox::box(j, n));
    if (c.done()) break;
    if (!(c.eat('u') || c.eat('U') || c.eat_str("∪")))
      throw ParseError("expected 'u' between terms", c.i);
  }
  std::sort(spec.levels.begin(), spec.levels.end(),
            [](const LevelBox& a, const LevelBox& b) { return a.j < b.j; });
  spec.validate();
  return spec;
}

inline std::string GridSpec::format() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i) os << " u ";
    const auto& lv = levels[i];
    if (lv.j > 0) os << "1/" << ipow2(lv.j) << ' ';
    else if (lv.j < 0) os << ipow2(-lv.j) << ' ';
    if (!lv.symmetric()) throw std::logic_error("format: asymmetric grids have no notation");
    if (lv.hi[0] == lv.hi[1] && lv.hi[1] == lv.hi[2])
      os << 'Z' << lv.hi[0] << "^3";
    else
      os << 'Z' << lv.hi[0] << "xZ" << lv.hi[1] << "xZ" << lv.hi[2];
  }
  return os.str();
}

inline GridSpec parse_grid_notation(std::string_view text) { return GridSpec::parse(text); }
inline GridSpec symmetrize_for_atom(const GridSpec& s) { return s.symmetrized_for_atom(); }

}  // namespace itw
