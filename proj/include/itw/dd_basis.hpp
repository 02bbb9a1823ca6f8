#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <vector>

#include "itw/common.hpp"

namespace itw {

namespace detail {

// Exact rational arithmetic for the refinement filter; int64 is ample for order <= 8.
struct Rat {
  long long n = 0, d = 1;
  void reduce() {
    if (d < 0) { n = -n; d = -d; }
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
  }
  Rat operator*(const Rat& o) const { Rat r{n * o.n, d * o.d}; r.reduce(); return r; }
  Rat operator+(const Rat& o) const { Rat r{n * o.d + o.n * d, d * o.d}; r.reduce(); return r; }
  double value() const { return double(n) / double(d); }
};

}  // namespace detail

// One-dimensional Deslauriers-Dubuc interpolating family of the given (even) order.
//
// Holds the refinement filter h, the dual-wavelet filter g~, the second-derivative
// connection coefficients a0, and dyadic sample tables of the scaling function
// produced by the cascade iteration.  Immutable once constructed.
class DdFamily {
 public:
  explicit DdFamily(int order, int cascade_depth = 12) : order_(order), m_(order - 1) {
    if (order <= 0 || order % 2 != 0)
      throw std::invalid_argument("DdFamily: order must be a positive even integer");
    if (order > 12) throw std::invalid_argument("DdFamily: order > 12 not supported");
    build_h();
    build_gtilde();
    build_cascade(cascade_depth);
    build_a0();
  }

  int order() const { return order_; }
  // filter half-width; supp(phi) = [-m, m]
  int half_width() const { return m_; }

  double h(int mu) const {
    return (mu < -m_ || mu > m_) ? 0.0 : h_[std::size_t(mu + m_)];
  }

  // dual-wavelet filter; offsets in [gtilde_lo(), gtilde_hi()]
  double gtilde(int nu) const {
    return (nu < gt_lo_ || nu > gt_hi_) ? 0.0 : gt_[std::size_t(nu - gt_lo_)];
  }
  int gtilde_lo() const { return gt_lo_; }
  int gtilde_hi() const { return gt_hi_; }

  // Second-derivative connection coefficients a0(k), even in k, sum k^2 a0(k) = 2.
  double a0(int k) const {
    return (k < -a0_hw_ || k > a0_hw_) ? 0.0 : a0_[std::size_t(k + a0_hw_)];
  }
  int a0_half_width() const { return a0_hw_; }

  // phi(num / 2^depth), exact for any dyadic point within the cascade depth.
  double eval_scaling(long long num, int depth) const {
    if (depth < 0) { num <<= -depth; depth = 0; }
    while (depth > 0 && (num & 1) == 0) { num >>= 1; --depth; }
    long long lim = (long long)m_ << depth;
    if (num <= -lim || num >= lim) return 0.0;
    if (depth > max_depth_)
      throw std::invalid_argument("eval_scaling: dyadic depth exceeds cascade depth");
    return casc_[std::size_t(depth)][std::size_t(num + lim)];
  }

  // phi at an arbitrary real point, cubic interpolation on the deepest dyadic mesh.
  double eval_scaling_real(double x) const {
    if (x <= -m_ || x >= m_) return 0.0;
    const auto& tab = casc_[std::size_t(max_depth_)];
    double u = std::ldexp(x, max_depth_) + ((long long)m_ << max_depth_);
    long long i1 = (long long)std::floor(u);
    double f = u - double(i1);
    long long n = (long long)tab.size();
    auto at = [&](long long i) { return (i < 0 || i >= n) ? 0.0 : tab[std::size_t(i)]; };
    double ym1 = at(i1 - 1), y0 = at(i1), y1 = at(i1 + 1), y2 = at(i1 + 2);
    // Catmull-Rom
    double a = -0.5 * ym1 + 1.5 * y0 - 1.5 * y1 + 0.5 * y2;
    double b = ym1 - 2.5 * y0 + 2.0 * y1 - 0.5 * y2;
    double c = 0.5 * (y1 - ym1);
    return ((a * f + b) * f + c) * f + y0;
  }

  int cascade_depth() const { return max_depth_; }

 private:
  void build_h() {
    h_.assign(std::size_t(2 * m_ + 1), 0.0);
    h_[std::size_t(m_)] = 1.0;
    // Odd offsets carry the Lagrange weights of the midpoint of `order` nodes
    // {+-1, +-3, ..., +-(order-1)} evaluated at 0.
    const int n2 = order_;
    std::vector<int> nodes;
    for (int q = -(n2 - 1); q <= n2 - 1; q += 2) nodes.push_back(q);
    for (int i = 0; i < n2; ++i) {
      detail::Rat w{1, 1};
      for (int j = 0; j < n2; ++j) {
        if (j == i) continue;
        w = w * detail::Rat{-nodes[std::size_t(j)], nodes[std::size_t(i)] - nodes[std::size_t(j)]};
      }
      h_[std::size_t(nodes[std::size_t(i)] + m_)] = w.value();
    }
  }

  void build_gtilde() {
    // <psi~_{j,k}, f> = f at the odd midpoint minus its interpolating prediction:
    // g~(1) = 1 and g~(2l) = -h(1-2l).
    gt_lo_ = 1 - m_;
    gt_hi_ = 1 + m_;
    gt_.assign(std::size_t(gt_hi_ - gt_lo_ + 1), 0.0);
    gt_[std::size_t(1 - gt_lo_)] = 1.0;
    for (int l = (1 - m_) / 2; 2 * l <= gt_hi_; ++l) {
      int nu = 2 * l;
      if (nu < gt_lo_) continue;
      gt_[std::size_t(nu - gt_lo_)] = -h(1 - nu);
    }
  }

  void build_cascade(int depth) {
    max_depth_ = depth;
    casc_.resize(std::size_t(depth + 1));
    casc_[0].assign(std::size_t(2 * m_ + 1), 0.0);
    casc_[0][std::size_t(m_)] = 1.0;
    for (int d = 1; d <= depth; ++d) {
      long long lim = (long long)m_ << d;
      auto& cur = casc_[std::size_t(d)];
      cur.assign(std::size_t(2 * lim + 1), 0.0);
      const auto& prev = casc_[std::size_t(d - 1)];
      long long plim = lim >> 1;
      for (long long num = -lim + 1; num <= lim - 1; ++num) {
        if ((num & 1) == 0) {
          cur[std::size_t(num + lim)] = prev[std::size_t(num / 2 + plim)];
          continue;
        }
        double v = 0.0;
        for (int mu = -m_; mu <= m_; ++mu) {
          double hv = h(mu);
          if (hv == 0.0) continue;
          long long p = num - ((long long)mu << (d - 1));
          if (p > -plim && p < plim) v += hv * prev[std::size_t(p + plim)];
        }
        cur[std::size_t(num + lim)] = v;
      }
    }
  }

  void build_a0() {
    if (order_ == 2) {
      // Distributional case: the hat's second derivative is the classical
      // three-point difference.
      a0_hw_ = 1;
      a0_ = {1.0, -2.0, 1.0};
      return;
    }
    // phi''(n) = 4 sum_mu h(mu) phi''(2n - mu), i.e. a0 in the kernel of
    // (4T - I) with T(n,k) = h(2n-k), normalized by sum k^2 a0(k) = 2.
    // Solved as a least-squares problem over even vectors constrained to the
    // moment conditions M_q = 2 delta_{q,2} for even q <= order; for orders 6
    // and 8 the eigenvalue 1/4 is simple and the residual vanishes, for order
    // 4 it is defective and the constraints select the classical stencil.
    const int K = m_ - 1;
    const int n = 2 * K + 1;
    const int ne = K + 1;  // even parametrization u_i = a0(i), i = 0..K
    Eigen::MatrixXd T(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) T(r, c) = h(2 * (r - K) - (c - K));
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, ne);  // even embedding
    for (int i = 0; i <= K; ++i) {
      P(K + i, i) = 1.0;
      if (i > 0) P(K - i, i) = 1.0;
    }
    Eigen::MatrixXd B = (4.0 * T - Eigen::MatrixXd::Identity(n, n)) * P;
    const int nc = order_ / 2;  // even moments q = 0, 2, ..., order-2
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(nc, ne);
    Eigen::VectorXd t = Eigen::VectorXd::Zero(nc);
    for (int qi = 0; qi < nc; ++qi) {
      int q = 2 * qi;
      C(qi, 0) = (q == 0) ? 1.0 : 0.0;
      for (int i = 1; i <= K; ++i) C(qi, i) = 2.0 * std::pow(double(i), q);
      if (q == 2) t(qi) = 2.0;
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(C);
    Eigen::VectorXd up = cod.solve(t);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
    lu.setThreshold(1e-10);
    Eigen::MatrixXd N = lu.kernel();
    Eigen::VectorXd u = up;
    if (N.cols() > 0 && N.norm() > 0) {
      Eigen::MatrixXd BN = B * N;
      Eigen::VectorXd z =
          BN.completeOrthogonalDecomposition().solve(-(B * up).eval());
      u = up + N * z;
    }
    a0_hw_ = K;
    a0_.assign(std::size_t(n), 0.0);
    for (int i = 0; i <= K; ++i) {
      a0_[std::size_t(K + i)] = u(i);
      a0_[std::size_t(K - i)] = u(i);
    }
  }

  int order_, m_;
  int gt_lo_ = 0, gt_hi_ = 0;
  int a0_hw_ = 0;
  int max_depth_ = 0;
  std::vector<double> h_, gt_, a0_;
  std::vector<std::vector<double>> casc_;
};

// Spec-style free functions.
inline DdFamily make_family(int order) { return DdFamily(order); }

inline double eval_scaling(const DdFamily& fam, double x, int depth) {
  double scaled = std::ldexp(x, depth);
  double r = std::round(scaled);
  if (std::abs(scaled - r) > 1e-9)
    throw std::invalid_argument("eval_scaling: x is not dyadic at the requested depth");
  return fam.eval_scaling((long long)r, depth);
}

}  // namespace itw
