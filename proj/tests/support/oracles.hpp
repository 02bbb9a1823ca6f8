#pragma once

// Brute-force reference implementations used only by tests: direct cascade
// evaluation of basis functions and dual pairings, and dense operator
// assembly on small grids.

#include <Eigen/Dense>

#include "itw/dd_basis.hpp"
#include "itw/field.hpp"
#include "itw/transform.hpp"

namespace itw::test {

// phi'' on dyadic meshes from the differentiated two-scale relation,
// seeded by the integer samples phi''(k) = a0(k).
class D2Table {
 public:
  explicit D2Table(const DdFamily& fam, int depth = 8) : fam_(fam), depth_(depth) {
    const int m = fam.half_width();
    tab_.resize(std::size_t(depth + 1));
    tab_[0].assign(std::size_t(2 * m + 1), 0.0);
    for (int k = -m; k <= m; ++k) tab_[0][std::size_t(k + m)] = fam.a0(k);
    for (int d = 1; d <= depth; ++d) {
      long long lim = (long long)m << d;
      tab_[std::size_t(d)].assign(std::size_t(2 * lim + 1), 0.0);
      for (long long num = -lim + 1; num <= lim - 1; ++num) {
        double v = 0.0;
        for (int mu = -m; mu <= m; ++mu) {
          if (fam.h(mu) == 0.0) continue;
          long long p = num - ((long long)mu << (d - 1));
          v += fam.h(mu) * at_depth(d - 1, p);
        }
        tab_[std::size_t(d)][std::size_t(num + lim)] = 4.0 * v;
      }
    }
  }

  // phi''(num / 2^depth)
  double at(long long num, int depth) const {
    while (depth > 0 && (num & 1) == 0) { num >>= 1; --depth; }
    return at_depth(depth, num);
  }

 private:
  double at_depth(int d, long long num) const {
    long long lim = (long long)fam_.half_width() << d;
    if (num <= -lim || num >= lim) return 0.0;
    return tab_[std::size_t(d)][std::size_t(num + lim)];
  }
  const DdFamily& fam_;
  int depth_;
  std::vector<std::vector<double>> tab_;
};

// value of phi(2^jj * x - l) at x = num / 2^q, q >= 0
inline double phi_scaled_at(const DdFamily& fam, int jj, long long l, long long num, int q) {
  if (jj >= 0) return fam.eval_scaling(num * (1LL << jj) - l * (1LL << q), q);
  return fam.eval_scaling(num - l * (1LL << (q - jj)), q - jj);
}

// same for phi'' including the chain-rule factor 2^{2 jj}
inline double d2phi_scaled_at(const DdFamily& fam, const D2Table& d2, int jj, long long l,
                              long long num, int q) {
  double f = std::pow(4.0, jj);
  if (jj >= 0) return f * d2.at(num * (1LL << jj) - l * (1LL << q), q);
  return f * d2.at(num - l * (1LL << (q - jj)), q - jj);
}

// basis function of type t2 at level j >= 0 and offset k, at x = num / 2^q
inline double basis_at(const DdFamily& fam, int t2, int j, long long k, long long num, int q) {
  if (t2 == 0) return phi_scaled_at(fam, j, k, num, q);
  return phi_scaled_at(fam, j + 1, 2 * k + 1, num, q);
}

inline double d2_basis_at(const DdFamily& fam, const D2Table& d2, int t2, int j, long long k,
                          long long num, int q) {
  if (t2 == 0) return d2phi_scaled_at(fam, d2, j, k, num, q);
  return d2phi_scaled_at(fam, d2, j + 1, 2 * k + 1, num, q);
}

// s(t1,t2,j,k) by directly evaluating the dual functional (point evaluations
// and g~-combinations of them) against the basis function.
inline double oracle_s(const DdFamily& fam, int t1, int t2, int j, int k) {
  if (j >= 0) {
    if (t1 == 0) return basis_at(fam, t2, j, k, 0, 0);
    double s = 0.0;
    for (int nu = fam.gtilde_lo(); nu <= fam.gtilde_hi(); ++nu)
      if (fam.gtilde(nu) != 0.0) s += fam.gtilde(nu) * basis_at(fam, t2, j, k, nu, 1);
    return s;
  }
  int J = -j;
  if (t1 == 0) return basis_at(fam, t2, 0, 0, k, J);
  double s = 0.0;
  for (int nu = fam.gtilde_lo(); nu <= fam.gtilde_hi(); ++nu)
    if (fam.gtilde(nu) != 0.0)
      s += fam.gtilde(nu) * basis_at(fam, t2, 0, 0, 2LL * k + nu, J + 1);
  return s;
}

inline double oracle_a(const DdFamily& fam, const D2Table& d2, int t1, int t2, int j, int k) {
  if (j >= 0) {
    if (t1 == 0) return d2_basis_at(fam, d2, t2, j, k, 0, 0);
    double s = 0.0;
    for (int nu = fam.gtilde_lo(); nu <= fam.gtilde_hi(); ++nu)
      if (fam.gtilde(nu) != 0.0) s += fam.gtilde(nu) * d2_basis_at(fam, d2, t2, j, k, nu, 1);
    return s;
  }
  int J = -j;
  if (t1 == 0) return d2_basis_at(fam, d2, t2, 0, 0, k, J);
  double s = 0.0;
  for (int nu = fam.gtilde_lo(); nu <= fam.gtilde_hi(); ++nu)
    if (fam.gtilde(nu) != 0.0)
      s += fam.gtilde(nu) * d2_basis_at(fam, d2, t2, 0, 0, 2LL * k + nu, J + 1);
  return s;
}

// zeta_beta evaluated at grid point alpha, by cascade
inline double zeta_at_point(const DdFamily& fam, const MultiGrid& g, std::size_t beta,
                            std::size_t alpha) {
  const ParityClass& pcb = g.class_of(beta);
  auto pb = g.point_at(beta);
  auto pa = g.point_at(alpha);
  // l,t of beta
  std::array<int, 3> l{}, t = pcb.t;
  bool coarsest = (pcb.j == g.jmin());
  for (int d = 0; d < 3; ++d) l[d] = coarsest ? pb.k[d] : (pb.k[d] - t[d]) / 2;
  int q = std::max(pa.j, 0);
  double prod = 1.0;
  for (int d = 0; d < 3; ++d) {
    long long num = (long long)pa.k[d] * (1LL << (q - pa.j));
    int jj = t[d] == 0 ? pcb.iota : pcb.iota + 1;
    long long off = t[d] == 0 ? l[d] : 2LL * l[d] + 1;
    prod *= phi_scaled_at(fam, jj, off, num, q);
    if (prod == 0.0) return 0.0;
  }
  return prod;
}

// dense backward transform: W[i][j] = zeta_{beta_j}(alpha_i)
inline Eigen::MatrixXd dense_W(const DdFamily& fam, const MultiGrid& g) {
  const std::size_t n = g.size();
  Eigen::MatrixXd W(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) W(long(i), long(j)) = zeta_at_point(fam, g, j, i);
  return W;
}

}  // namespace itw::test
