#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>
#include <random>

#include "itw/operators.hpp"

namespace itw {

struct EigenRequest {
  int nev = 1;
  int subspace_dim = 20;
  double tol = 1e-8;
  int max_restarts = 400;
  std::uint64_t seed = 12345;

  void validate() const {
    if (nev < 1) throw std::invalid_argument("EigenRequest: nev >= 1 required");
    if (subspace_dim < nev + 2)
      throw std::invalid_argument("EigenRequest: subspace_dim must exceed nev + 1");
    if (!(tol > 0.0)) throw std::invalid_argument("EigenRequest: tol must be positive");
  }
};

struct EigenResult {
  double value = 0.0;
  std::vector<double> vector;
  double residual = 0.0;
};

struct ArnoldiStats {
  int restarts = 0;
  int applies = 0;
  int rejected_complex = 0;
};

namespace detail {

inline std::vector<double> seeded_unit_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  double nn = norm2(v);
  scal(1.0 / nn, v);
  return v;
}

// Arnoldi factorization A V = V H + f e_k^T with modified Gram-Schmidt and a
// single reorthogonalization pass.
struct ArnoldiFactorization {
  const LinOp* A = nullptr;
  int m = 0;                          // maximum size
  std::vector<std::vector<double>> V; // current basis, size k
  Eigen::MatrixXd H;                  // m x m, upper Hessenberg
  std::vector<double> f;              // residual vector
  double beta = 0.0;                  // |f|
  int applies = 0;
  std::mt19937_64 rng;

  void init(const LinOp& op, int mm, const std::vector<double>& v0, std::uint64_t seed) {
    A = &op;
    m = mm;
    rng.seed(seed + 1);
    H = Eigen::MatrixXd::Zero(m, m);
    V.clear();
    f = v0;
    beta = norm2(f);
  }

  void orthogonalize(std::vector<double>& w, Eigen::VectorXd& h) {
    const int k = int(V.size());
    double before = norm2(w);
    for (int i = 0; i < k; ++i) {
      double hij = dot(V[std::size_t(i)], w);
      h(i) += hij;
      axpy(-hij, V[std::size_t(i)], w);
    }
    if (norm2(w) < 0.5 * before) {  // one reorthogonalization pass
      for (int i = 0; i < k; ++i) {
        double c = dot(V[std::size_t(i)], w);
        h(i) += c;
        axpy(-c, V[std::size_t(i)], w);
      }
    }
  }

  // grow the factorization to size `target`
  void extend(int target) {
    const std::size_t n = f.size();
    while (int(V.size()) < target) {
      int k = int(V.size());
      if (beta < 1e-300) beta = 0.0;
      double hscale = std::max(1.0, H.topLeftCorner(std::max(k, 1), std::max(k, 1)).norm());
      if (beta <= 1e-14 * hscale) {
        // invariant subspace: continue with a fresh direction
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (double& x : f) x = dist(rng);
        Eigen::VectorXd dummy = Eigen::VectorXd::Zero(std::max(k, 1));
        orthogonalize(f, dummy);
        beta = norm2(f);
        if (k > 0) H(k, k - 1) = 0.0;
      } else if (k > 0) {
        H(k, k - 1) = beta;
      }
      std::vector<double> v = f;
      scal(1.0 / beta, v);
      V.push_back(std::move(v));
      std::vector<double> w(n);
      A->apply(V.back().data(), w.data());
      ++applies;
      Eigen::VectorXd h = Eigen::VectorXd::Zero(k + 1);
      orthogonalize(w, h);
      for (int i = 0; i <= k; ++i) H(i, k) = h(i);
      f = std::move(w);
      beta = norm2(f);
    }
  }

  // implicit restart: keep the leading k columns after applying the shifts
  void restart(int k, const std::vector<std::complex<double>>& shifts) {
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(m, m);
    std::size_t i = 0;
    while (i < shifts.size()) {
      Eigen::MatrixXd M;
      if (std::abs(shifts[i].imag()) > 0.0) {
        // conjugate pair: real double shift
        double s = 2.0 * shifts[i].real();
        double t = std::norm(shifts[i]);
        M = H * H - s * H + t * Eigen::MatrixXd::Identity(m, m);
        i += 2;
      } else {
        M = H - shifts[i].real() * Eigen::MatrixXd::Identity(m, m);
        i += 1;
      }
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
      Eigen::MatrixXd Qi = qr.householderQ();
      H = Qi.transpose() * H * Qi;
      Q = Q * Qi;
      // restore numerically exact Hessenberg form
      for (int c = 0; c < m; ++c)
        for (int r = c + 2; r < m; ++r) H(r, c) = 0.0;
    }
    std::vector<std::vector<double>> Vnew;
    Vnew.reserve(std::size_t(k + 1));
    const std::size_t n = f.size();
    for (int j = 0; j <= k; ++j) {
      std::vector<double> col(n, 0.0);
      for (int r = 0; r < m; ++r) {
        double q = Q(r, j);
        if (q != 0.0) axpy(q, V[std::size_t(r)], col);
      }
      Vnew.push_back(std::move(col));
    }
    double bhat = H(k, k - 1);
    double sigma = Q(m - 1, k - 1);
    std::vector<double> fnew(n, 0.0);
    axpy(bhat, Vnew[std::size_t(k)], fnew);
    axpy(sigma, f, fnew);
    Vnew.pop_back();
    V = std::move(Vnew);
    f = std::move(fnew);
    beta = norm2(f);
    Eigen::MatrixXd Hk = H.topLeftCorner(k, k);
    H.setZero();
    H.topLeftCorner(k, k) = Hk;
  }
};

}  // namespace detail

// Smallest-real-part eigenpairs by the implicitly restarted Arnoldi method
// with exact shifts.  Returns real Ritz pairs sorted ascending; complex pairs
// among the wanted set are rejected and counted in stats.
inline std::vector<EigenResult> arnoldi_smallest(const LinOp& op, const EigenRequest& req,
                                                 const std::vector<double>* warm_start = nullptr,
                                                 ArnoldiStats* stats = nullptr) {
  req.validate();
  const std::size_t n = op.dim();
  const int m = std::min<std::size_t>(std::size_t(req.subspace_dim), n);
  const int nev = std::min<std::size_t>(std::size_t(req.nev), n);

  detail::ArnoldiFactorization fac;
  std::vector<double> v0 =
      warm_start && !warm_start->empty() ? *warm_start : detail::seeded_unit_vector(n, req.seed);
  fac.init(op, m, v0, req.seed);

  std::vector<double> best_history;
  ArnoldiStats local;

  for (int cycle = 0; cycle <= req.max_restarts; ++cycle) {
    fac.extend(m);
    Eigen::MatrixXd Hm = fac.H.topLeftCorner(m, m);
    Eigen::EigenSolver<Eigen::MatrixXd> es(Hm);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("arnoldi_smallest: Hessenberg eigen decomposition failed");
    Eigen::VectorXcd lam = es.eigenvalues();
    Eigen::MatrixXcd Y = es.eigenvectors();

    std::vector<int> order(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) order[std::size_t(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (lam(a).real() != lam(b).real()) return lam(a).real() < lam(b).real();
      return lam(a).imag() < lam(b).imag();
    });

    // keep conjugate pairs together at the cut
    int k = nev;
    if (k < m && std::abs(lam(order[std::size_t(k - 1)]).imag()) > 0.0 &&
        std::abs(std::conj(lam(order[std::size_t(k - 1)])) - lam(order[std::size_t(k)])) <
            1e-12 * std::abs(lam(order[std::size_t(k)])) + 1e-300)
      ++k;
    if (k >= m) k = m - 1;

    double hnorm = Hm.norm();
    bool all_conv = true;
    double worst = 0.0;
    for (int i = 0; i < nev; ++i) {
      int id = order[std::size_t(i)];
      double ylast = std::abs(Y(m - 1, id));
      double res = fac.beta * ylast;
      double scale = std::max(std::abs(lam(id)), 1e-3 * hnorm);
      worst = std::max(worst, res / std::max(scale, 1e-300));
      if (res > req.tol * scale) all_conv = false;
    }
    best_history.push_back(worst);

    if (all_conv || cycle == req.max_restarts) {
      if (!all_conv)
        throw ConvergenceError("arnoldi_smallest: no convergence after max_restarts",
                               best_history);
      // extract real Ritz pairs, verify residuals with one extra apply each
      std::vector<EigenResult> out;
      for (int i = 0; i < nev; ++i) {
        int id = order[std::size_t(i)];
        if (std::abs(lam(id).imag()) > 1e-8 * std::max(1.0, std::abs(lam(id)))) {
          ++local.rejected_complex;
          continue;
        }
        Eigen::VectorXcd y = Y.col(id);
        // rotate the phase so the vector is essentially real
        int imax = 0;
        for (int r = 1; r < m; ++r)
          if (std::abs(y(r)) > std::abs(y(imax))) imax = r;
        std::complex<double> ph = y(imax) / std::abs(y(imax));
        y /= ph;
        std::vector<double> x(n, 0.0);
        for (int r = 0; r < m; ++r) axpy(y(r).real(), fac.V[std::size_t(r)], x);
        double xn = norm2(x);
        scal(1.0 / xn, x);
        std::vector<double> Ax(n);
        op.apply(x.data(), Ax.data());
        ++local.applies;
        double l = lam(id).real();
        axpy(-l, x, Ax);
        EigenResult r;
        r.value = l;
        r.residual = norm2(Ax);
        r.vector = std::move(x);
        out.push_back(std::move(r));
      }
      local.restarts = cycle;
      local.applies += fac.applies;
      if (stats) *stats = local;
      return out;
    }

    std::vector<std::complex<double>> shifts;
    for (int i = k; i < m; ++i) shifts.push_back(lam(order[std::size_t(i)]));
    // apply conjugate pairs jointly: sort by (real, imag>=0 first)
    std::sort(shifts.begin(), shifts.end(), [](auto a, auto b) {
      if (a.real() != b.real()) return a.real() > b.real();
      return std::abs(a.imag()) > std::abs(b.imag());
    });
    fac.restart(k, shifts);
    ++local.restarts;
  }
  throw std::logic_error("arnoldi_smallest: unreachable");
}

// ---- linear solvers ----

enum class LinearMethod { cg, cgnr, gmres };

struct LinearSolveRequest {
  LinearMethod method = LinearMethod::gmres;
  double tol = 1e-8;
  int max_iter = 20000;
  int restart_len = 60;

  void validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("LinearSolveRequest: tol must be positive");
    if (restart_len < 1)
      throw std::invalid_argument("LinearSolveRequest: restart_len must be >= 1");
  }
};

inline LinearMethod parse_linear_method(const std::string& s) {
  if (s == "cg") return LinearMethod::cg;
  if (s == "cgnr") return LinearMethod::cgnr;
  if (s == "gmres") return LinearMethod::gmres;
  throw std::invalid_argument("unknown linear solver method: " + s);
}

struct SolveStats {
  int iterations = 0;
  std::vector<double> residuals;  // |r| / |b| after each iteration
};

inline void solve_cg(const LinOp& A, const std::vector<double>& b, std::vector<double>& x,
                     double tol, int max_iter, SolveStats* st) {
  const std::size_t n = b.size();
  std::vector<double> r(n), p(n), Ap(n);
  A.apply(x.data(), Ap.data());
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
  p = r;
  double bn = norm2(b);
  if (bn == 0.0) { std::fill(x.begin(), x.end(), 0.0); return; }
  double rr = dot(r, r);
  std::vector<double> hist;
  for (int it = 0; it < max_iter; ++it) {
    if (std::sqrt(rr) <= tol * bn) {
      if (st) { st->iterations = it; st->residuals = hist; }
      return;
    }
    A.apply(p.data(), Ap.data());
    double alpha = rr / dot(p, Ap);
    axpy(alpha, p, x);
    axpy(-alpha, Ap, r);
    double rr2 = dot(r, r);
    hist.push_back(std::sqrt(rr2) / bn);
    double beta = rr2 / rr;
    rr = rr2;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  if (std::sqrt(rr) <= tol * bn) {
    if (st) { st->iterations = max_iter; st->residuals = hist; }
    return;
  }
  throw ConvergenceError("cg: max_iter exceeded", hist);
}

// conjugate gradient on the normal equations A^T A x = A^T b
inline void solve_cgnr(const LinOp& A, const std::vector<double>& b, std::vector<double>& x,
                       double tol, int max_iter, SolveStats* st) {
  const std::size_t n = b.size();
  std::vector<double> r(n), z(n), p(n), w(n), tmp(n);
  A.apply(x.data(), tmp.data());
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - tmp[i];
  A.apply_transpose(r.data(), z.data());
  p = z;
  double bn = norm2(b);
  if (bn == 0.0) { std::fill(x.begin(), x.end(), 0.0); return; }
  double zz = dot(z, z);
  std::vector<double> hist;
  for (int it = 0; it < max_iter; ++it) {
    if (norm2(r) <= tol * bn) {
      if (st) { st->iterations = it; st->residuals = hist; }
      return;
    }
    A.apply(p.data(), w.data());
    double ww = dot(w, w);
    if (ww == 0.0) throw ConvergenceError("cgnr: breakdown (A p = 0)", hist);
    double alpha = zz / ww;
    axpy(alpha, p, x);
    axpy(-alpha, w, r);
    hist.push_back(norm2(r) / bn);
    A.apply_transpose(r.data(), z.data());
    double zz2 = dot(z, z);
    double beta = zz2 / zz;
    zz = zz2;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (norm2(r) <= tol * bn) {
    if (st) { st->iterations = max_iter; st->residuals = hist; }
    return;
  }
  throw ConvergenceError("cgnr: max_iter exceeded", hist);
}

inline void solve_gmres(const LinOp& A, const std::vector<double>& b, std::vector<double>& x,
                        double tol, int max_iter, int restart, SolveStats* st) {
  const std::size_t n = b.size();
  double bn = norm2(b);
  if (bn == 0.0) { std::fill(x.begin(), x.end(), 0.0); return; }
  std::vector<double> hist;
  int done = 0;
  while (done < max_iter) {
    std::vector<double> r(n), t(n);
    A.apply(x.data(), t.data());
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - t[i];
    double beta = norm2(r);
    if (beta <= tol * bn) {
      if (st) { st->iterations = done; st->residuals = hist; }
      return;
    }
    int m = std::min<long long>(restart, max_iter - done);
    std::vector<std::vector<double>> V;
    V.reserve(std::size_t(m) + 1);
    scal(1.0 / beta, r);
    V.push_back(std::move(r));
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    std::vector<double> cs(static_cast<std::size_t>(m), 0.0);
    std::vector<double> sn(static_cast<std::size_t>(m), 0.0);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
    g(0) = beta;
    int k = 0;
    for (; k < m; ++k) {
      std::vector<double> w(n);
      A.apply(V[std::size_t(k)].data(), w.data());
      for (int i = 0; i <= k; ++i) {
        double hik = dot(V[std::size_t(i)], w);
        H(i, k) = hik;
        axpy(-hik, V[std::size_t(i)], w);
      }
      double hk1 = norm2(w);
      H(k + 1, k) = hk1;
      if (hk1 > 0.0) {
        scal(1.0 / hk1, w);
        V.push_back(std::move(w));
      }
      // apply previous Givens rotations to the new column
      for (int i = 0; i < k; ++i) {
        double t1 = cs[std::size_t(i)] * H(i, k) + sn[std::size_t(i)] * H(i + 1, k);
        double t2 = -sn[std::size_t(i)] * H(i, k) + cs[std::size_t(i)] * H(i + 1, k);
        H(i, k) = t1;
        H(i + 1, k) = t2;
      }
      double denom = std::hypot(H(k, k), H(k + 1, k));
      if (denom == 0.0) { cs[std::size_t(k)] = 1.0; sn[std::size_t(k)] = 0.0; }
      else { cs[std::size_t(k)] = H(k, k) / denom; sn[std::size_t(k)] = H(k + 1, k) / denom; }
      H(k, k) = denom;
      H(k + 1, k) = 0.0;
      double g1 = cs[std::size_t(k)] * g(k) + sn[std::size_t(k)] * g(k + 1);
      double g2 = -sn[std::size_t(k)] * g(k) + cs[std::size_t(k)] * g(k + 1);
      g(k) = g1;
      g(k + 1) = g2;
      hist.push_back(std::abs(g(k + 1)) / bn);
      ++done;
      if (std::abs(g(k + 1)) <= tol * bn || hk1 == 0.0) { ++k; break; }
    }
    // solve the small triangular system and update x
    Eigen::VectorXd y = Eigen::VectorXd::Zero(k);
    for (int i = k - 1; i >= 0; --i) {
      double s = g(i);
      for (int j = i + 1; j < k; ++j) s -= H(i, j) * y(j);
      y(i) = s / H(i, i);
    }
    for (int i = 0; i < k; ++i) axpy(y(i), V[std::size_t(i)], x);
    if (!hist.empty() && hist.back() <= tol) {
      if (st) { st->iterations = done; st->residuals = hist; }
      return;
    }
  }
  throw ConvergenceError("gmres: max_iter exceeded", hist);
}

// Field-level dispatcher.  method=cg requires a symmetric operator (caller
// asserts a single-level grid).
inline Field solve_linear(const LinOp& A, const Field& rhs, const LinearSolveRequest& req,
                          const Field* warm = nullptr, SolveStats* st = nullptr) {
  req.validate();
  require_kind(rhs, FieldKind::coefficients, "solve_linear");
  if (rhs.grid.get() != A.grid().get())
    throw std::invalid_argument("solve_linear: operator/rhs grid mismatch");
  Field x = warm ? *warm : Field(rhs.grid, FieldKind::coefficients);
  switch (req.method) {
    case LinearMethod::cg:
      solve_cg(A, rhs.v, x.v, req.tol, req.max_iter, st);
      break;
    case LinearMethod::cgnr:
      solve_cgnr(A, rhs.v, x.v, req.tol, req.max_iter, st);
      break;
    case LinearMethod::gmres:
      solve_gmres(A, rhs.v, x.v, req.tol, req.max_iter, req.restart_len, st);
      break;
  }
  return x;
}

}  // namespace itw
