#pragma once

#include <iostream>
#include <vector>

#include "itw/dd_basis.hpp"

namespace itw {

// A compactly supported 1D filter indexed by integer offset.
struct Stencil {
  int lo = 0;
  std::vector<double> w;

  int hi() const { return lo + int(w.size()) - 1; }
  bool empty() const { return w.empty(); }
  double at(int k) const {
    int i = k - lo;
    return (i < 0 || i >= int(w.size())) ? 0.0 : w[std::size_t(i)];
  }
  void trim() {
    std::size_t b = 0, e = w.size();
    while (b < e && w[b] == 0.0) ++b;
    while (e > b && w[e - 1] == 0.0) --e;
    lo += int(b);
    w = std::vector<double>(w.begin() + long(b), w.begin() + long(e));
  }
};

// Precomputed two-type/two-level filter families a(t1,t2,j,k) and s(t1,t2,j,k)
// entering every Laplacian matrix element.  Populated for |j| <= jspan.
class FilterTable {
 public:
  FilterTable(const DdFamily& fam, int jspan) : jspan_(jspan) {
    if (jspan < 0) throw std::invalid_argument("FilterTable: jspan must be >= 0");
    const int J = jspan_ + 1;  // internal extra level feeds the t2=1 recursions
    a_.assign(std::size_t(4 * (2 * J + 1)), Stencil{});
    s_.assign(std::size_t(4 * (2 * J + 1)), Stencil{});
    build(fam, J);
  }

  int jspan() const { return jspan_; }

  double a(int t1, int t2, int j, int k) const { return a_stencil(t1, t2, j).at(k); }
  double s(int t1, int t2, int j, int k) const { return s_stencil(t1, t2, j).at(k); }

  const Stencil& a_stencil(int t1, int t2, int j) const {
    check(t1, t2, j);
    return a_[slot(t1, t2, j)];
  }
  const Stencil& s_stencil(int t1, int t2, int j) const {
    check(t1, t2, j);
    return s_[slot(t1, t2, j)];
  }

  // CSV rows (filter,t1,t2,j,k,value) for cross-checks against other codes.
  void dump_csv(std::ostream& os) const {
    os << "filter,t1,t2,j,k,value\n";
    for (int t1 = 0; t1 < 2; ++t1)
      for (int t2 = 0; t2 < 2; ++t2)
        for (int j = -jspan_; j <= jspan_; ++j) {
          const Stencil& sa = a_stencil(t1, t2, j);
          for (int k = sa.lo; k <= sa.hi(); ++k)
            os << "a," << t1 << ',' << t2 << ',' << j << ',' << k << ',' << sa.at(k) << '\n';
          const Stencil& ss = s_stencil(t1, t2, j);
          for (int k = ss.lo; k <= ss.hi(); ++k)
            os << "s," << t1 << ',' << t2 << ',' << j << ',' << k << ',' << ss.at(k) << '\n';
        }
  }

 private:
  std::size_t slot(int t1, int t2, int j) const {
    return std::size_t((j + jspan_ + 1) * 4 + t1 * 2 + t2);
  }
  void check(int t1, int t2, int j) const {
    if (t1 < 0 || t1 > 1 || t2 < 0 || t2 > 1)
      throw std::out_of_range("FilterTable: type index out of range");
    if (j < -jspan_ || j > jspan_)
      throw std::out_of_range("FilterTable: level difference exceeds jspan");
  }

  static Stencil delta(int at) { return Stencil{at, {1.0}}; }

  // out(k) = sum_mu F(mu) * S(k - c*mu), c >= 1
  static Stencil convolve(const Stencil& F, int c, const Stencil& S) {
    Stencil r;
    if (F.empty() || S.empty()) return r;
    r.lo = S.lo + c * F.lo;
    r.w.assign(std::size_t(S.hi() + c * F.hi() - r.lo + 1), 0.0);
    for (int mu = F.lo; mu <= F.hi(); ++mu) {
      double f = F.at(mu);
      if (f == 0.0) continue;
      for (int k = S.lo; k <= S.hi(); ++k)
        r.w[std::size_t(k + c * mu - r.lo)] += f * S.at(k);
    }
    r.trim();
    return r;
  }

  // out(k) = S(2k + shift)
  static Stencil downsample(const Stencil& S, int shift) {
    Stencil r;
    if (S.empty()) return r;
    r.lo = ceil_div2(S.lo - shift);
    int hi = floor_div2(S.hi() - shift);
    if (hi < r.lo) return Stencil{};
    r.w.assign(std::size_t(hi - r.lo + 1), 0.0);
    for (int k = r.lo; k <= hi; ++k) r.w[std::size_t(k - r.lo)] = S.at(2 * k + shift);
    r.trim();
    return r;
  }

  static Stencil scaled(const Stencil& S, double f) {
    Stencil r = S;
    for (double& x : r.w) x *= f;
    return r;
  }

  void build(const DdFamily& fam, int J) {
    const int m = fam.half_width();
    Stencil hst;  // h as a stencil, mu in [-m, m]
    hst.lo = -m;
    hst.w.resize(std::size_t(2 * m + 1));
    for (int mu = -m; mu <= m; ++mu) hst.w[std::size_t(mu + m)] = fam.h(mu);
    Stencil hrev = hst;  // h(mu-k) = hrev convolution form; h is even anyway
    Stencil gst;
    gst.lo = fam.gtilde_lo();
    gst.w.resize(std::size_t(fam.gtilde_hi() - gst.lo + 1));
    for (int nu = gst.lo; nu <= fam.gtilde_hi(); ++nu)
      gst.w[std::size_t(nu - gst.lo)] = fam.gtilde(nu);
    Stencil a0;
    a0.lo = -fam.a0_half_width();
    a0.w.resize(std::size_t(2 * fam.a0_half_width() + 1));
    for (int k = a0.lo; k <= fam.a0_half_width(); ++k)
      a0.w[std::size_t(k - a0.lo)] = fam.a0(k);

    auto A = [&](int t1, int t2, int j) -> Stencil& { return a_[slot(t1, t2, j)]; };
    auto S = [&](int t1, int t2, int j) -> Stencil& { return s_[slot(t1, t2, j)]; };
    auto reflect = [](const Stencil& s) {
      Stencil r;
      r.lo = -s.hi();
      r.w.assign(s.w.rbegin(), s.w.rend());
      return r;
    };

    // ---- a(0,0,j,k) ----
    for (int j = 0; j <= J; ++j) A(0, 0, j) = scaled(a0, std::pow(4.0, j));
    // a(0,0,-1,k) = 4 sum_mu h_mu a0(mu - k): reflected convolution; a0 even => plain.
    A(0, 0, -1) = scaled(reflect(convolve(hst, 1, a0)), 4.0);
    for (int j = -2; j >= -J; --j)
      A(0, 0, j) = scaled(convolve(hst, ipow2(-j - 1), A(0, 0, j + 1)), 4.0);

    // ---- a(0,1,j,k) ----
    for (int j = 0; j < J; ++j) A(0, 1, j) = downsample(A(0, 0, j + 1), 1);
    A(0, 1, J) = Stencil{};  // beyond public span; never queried
    {
      Stencil t;  // 4 a0(1-k)
      t.lo = 1 - a0.hi();
      t.w.assign(a0.w.rbegin(), a0.w.rend());
      A(0, 1, -1) = scaled(t, 4.0);
    }
    for (int j = -2; j >= -J; --j) {
      Stencil sh = A(0, 0, j + 1);  // a(0,0,j+1, k - 2^{-j-1})
      sh.lo += ipow2(-j - 1);
      A(0, 1, j) = scaled(sh, 4.0);
    }

    // ---- a(1,0,j,k) ----
    // a(1,0,0,k) = sum_nu g~_nu a(0,0,-1, nu - 2k)
    {
      Stencil inner = convolve(gst, 1, reflect(A(0, 0, -1)));  // sum g~ A(.. nu - q) at q
      A(1, 0, 0) = downsample(inner, 0);
    }
    for (int j = 1; j <= J; ++j)
      A(1, 0, j) = scaled(convolve(gst, ipow2(j - 1), A(0, 0, j - 1)), 4.0);
    for (int j = -1; j >= -J; --j) {
      // a(1,0,j,k) = sum_nu g~_nu a(0,0,j-1, 2k + nu)
      if (j - 1 < -(J + 0)) {
        // need one deeper a(0,0) level; extend on demand
        Stencil deeper = scaled(convolve(hst, ipow2(-(j - 1) - 1), A(0, 0, j)), 4.0);
        Stencil inner = convolve(reflect(gst), 1, deeper);
        A(1, 0, j) = downsample(inner, 0);
      } else {
        Stencil inner = convolve(reflect(gst), 1, A(0, 0, j - 1));
        A(1, 0, j) = downsample(inner, 0);
      }
    }

    // ---- a(1,1,j,k) ----
    for (int j = 0; j < J; ++j) A(1, 1, j) = downsample(A(1, 0, j + 1), 1);
    A(1, 1, J) = Stencil{};  // beyond public span; never queried
    {
      Stencil t;  // 4 a(1,0,0, 1-k)
      const Stencil& b = A(1, 0, 0);
      t.lo = 1 - b.hi();
      t.w.assign(b.w.rbegin(), b.w.rend());
      A(1, 1, -1) = scaled(t, 4.0);
    }
    for (int j = -2; j >= -J; --j) {
      Stencil sh = A(1, 0, j + 1);
      sh.lo += ipow2(-j - 1);
      A(1, 1, j) = scaled(sh, 4.0);
    }

    // ---- s filters ----
    for (int j = 0; j <= J; ++j) S(0, 0, j) = delta(0);
    S(0, 0, -1) = hst;  // s(0,0,-1,k) = h_k
    for (int j = -2; j >= -J; --j)
      S(0, 0, j) = convolve(hst, ipow2(-j - 1), S(0, 0, j + 1));

    for (int j = 0; j <= J; ++j) S(0, 1, j) = Stencil{};
    S(0, 1, -1) = delta(1);
    for (int j = -2; j >= -J; --j) {
      Stencil sh = S(0, 0, j + 1);
      sh.lo += ipow2(-j - 1);
      S(0, 1, j) = sh;
    }

    S(1, 0, 0) = Stencil{};
    for (int j = 1; j <= J; ++j) {
      Stencil r;  // sum_nu g~_nu delta_{k, 2^{j-1} nu}
      int c = ipow2(j - 1);
      r.lo = c * gst.lo;
      r.w.assign(std::size_t(c * gst.hi() - r.lo + 1), 0.0);
      for (int nu = gst.lo; nu <= gst.hi(); ++nu)
        r.w[std::size_t(c * nu - r.lo)] = gst.at(nu);
      r.trim();
      S(1, 0, j) = r;
    }
    for (int j = -1; j >= -J; --j) S(1, 0, j) = Stencil{};

    S(1, 1, 0) = delta(0);
    for (int j = 1; j <= J; ++j) S(1, 1, j) = Stencil{};
    for (int j = -1; j >= -J; --j) S(1, 1, j) = Stencil{};
  }

  int jspan_;
  std::vector<Stencil> a_, s_;
};

inline FilterTable build_filter_table(const DdFamily& fam, int jspan) {
  return FilterTable(fam, jspan);
}

}  // namespace itw
