#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "itw/solvers.hpp"

using namespace itw;

namespace {

// a LinOp wrapping a dense Eigen matrix, for small oracle problems
class DenseOp : public LinOp {
 public:
  explicit DenseOp(Eigen::MatrixXd A) : A_(std::move(A)) {
    GridSpec s = GridSpec::parse("Z1^3");  // dummy grid; dim comes from A
    grid_ = build_grid(s);
  }
  std::size_t dim() const override { return std::size_t(A_.rows()); }
  std::shared_ptr<const MultiGrid> grid() const override { return grid_; }
  void apply(const double* in, double* out) const override {
    Eigen::Map<const Eigen::VectorXd> x(in, A_.cols());
    Eigen::Map<Eigen::VectorXd> y(out, A_.rows());
    y = A_ * x;
  }
  bool has_transpose() const override { return true; }
  void apply_transpose(const double* in, double* out) const override {
    Eigen::Map<const Eigen::VectorXd> x(in, A_.rows());
    Eigen::Map<Eigen::VectorXd> y(out, A_.cols());
    y = A_.transpose() * x;
  }
  const Eigen::MatrixXd& mat() const { return A_; }

 private:
  Eigen::MatrixXd A_;
  std::shared_ptr<const MultiGrid> grid_;
};

// single-level 1D Deslauriers-Dubuc Laplacian (negated and scaled) as a
// dense matrix: a textbook symmetric test operator
Eigen::MatrixXd dd_1d_operator(int n, double hstep) {
  DdFamily fam(8);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = -fam.a0_half_width(); k <= fam.a0_half_width(); ++k) {
      int j = i + k;
      if (j < 0 || j >= n) continue;
      A(i, j) = -0.5 * fam.a0(k) / (hstep * hstep);
    }
  return A;
}

}  // namespace

TEST_CASE("IRAM on a diagonal operator", "[solvers]") {
  Eigen::VectorXd d(60);
  for (int i = 0; i < 60; ++i) d(i) = i + 1.0;
  DenseOp op(Eigen::MatrixXd(d.asDiagonal()));
  EigenRequest req;
  req.nev = 2;
  req.subspace_dim = 12;
  req.tol = 1e-10;
  auto res = arnoldi_smallest(op, req);
  REQUIRE(res.size() == 2u);
  CHECK(res[0].value == Catch::Approx(1.0).margin(1e-8));
  CHECK(res[1].value == Catch::Approx(2.0).margin(1e-8));
  for (const auto& r : res) CHECK(r.residual < 1e-8 * 60.0);
}

TEST_CASE("IRAM matches a dense eigensolver on the 1D operator", "[solvers]") {
  const int n = 200;
  Eigen::MatrixXd A = dd_1d_operator(n, 0.3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(A);
  DenseOp op(A);
  EigenRequest req;
  req.nev = 3;
  req.subspace_dim = 30;
  req.tol = 1e-10;
  req.max_restarts = 600;
  ArnoldiStats st;
  auto res = arnoldi_smallest(op, req, nullptr, &st);
  REQUIRE(res.size() == 3u);
  for (int i = 0; i < 3; ++i)
    CHECK(res[std::size_t(i)].value == Catch::Approx(dense.eigenvalues()(i)).margin(1e-8));
  CHECK(st.rejected_complex == 0);
}

TEST_CASE("IRAM on a nonsymmetric matrix with complex tail", "[solvers]") {
  // lower spectrum real and isolated, bulk carries complex pairs
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(-0.3, 0.3);
  const int n = 80;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  A(0, 0) = -2.0;
  A(1, 1) = -1.5;
  for (int i = 2; i < n; i += 2) {
    double re = 1.0 + 0.1 * i, im = dist(rng);
    A(i, i) = re;
    if (i + 1 < n) {
      A(i + 1, i + 1) = re;
      A(i, i + 1) = im;
      A(i + 1, i) = -im;
    }
  }
  // similarity transform to dense form
  Eigen::MatrixXd Q = Eigen::MatrixXd::Random(n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Q);
  Eigen::MatrixXd U = qr.householderQ();
  DenseOp op(U * A * U.transpose());
  EigenRequest req;
  req.nev = 2;
  req.subspace_dim = 24;
  req.tol = 1e-9;
  auto res = arnoldi_smallest(op, req);
  REQUIRE(res.size() == 2u);
  CHECK(res[0].value == Catch::Approx(-2.0).margin(1e-7));
  CHECK(res[1].value == Catch::Approx(-1.5).margin(1e-7));
}

TEST_CASE("IRAM is deterministic for a fixed seed", "[solvers]") {
  Eigen::MatrixXd A = dd_1d_operator(80, 0.4);
  DenseOp op(A);
  EigenRequest req;
  req.nev = 2;
  req.subspace_dim = 16;
  req.tol = 1e-9;
  req.seed = 777;
  ArnoldiStats s1, s2;
  auto r1 = arnoldi_smallest(op, req, nullptr, &s1);
  auto r2 = arnoldi_smallest(op, req, nullptr, &s2);
  CHECK(s1.restarts == s2.restarts);
  CHECK(s1.applies == s2.applies);
  REQUIRE(r1.size() == r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].value == r2[i].value);  // bitwise
    CHECK(r1[i].vector == r2[i].vector);
  }
}

TEST_CASE("Arnoldi Hessenberg is tridiagonal on symmetric operators", "[solvers]") {
  Eigen::MatrixXd A = dd_1d_operator(120, 0.35);
  DenseOp op(A);
  detail::ArnoldiFactorization fac;
  auto v0 = detail::seeded_unit_vector(op.dim(), 42);
  fac.init(op, 20, v0, 42);
  fac.extend(20);
  double off = 0.0;
  for (int c = 0; c < 20; ++c)
    for (int r = 0; r < c - 1; ++r) off = std::max(off, std::abs(fac.H(r, c)));
  CHECK(off < 1e-9 * fac.H.norm());
}

TEST_CASE("eigen request validation", "[solvers]") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(5, 5);
  DenseOp op(A);
  EigenRequest bad;
  bad.nev = 0;
  CHECK_THROWS_AS(arnoldi_smallest(op, bad), std::invalid_argument);
  bad.nev = 4;
  bad.subspace_dim = 5;
  CHECK_THROWS_AS(arnoldi_smallest(op, bad), std::invalid_argument);
}

TEST_CASE("CG solves SPD systems to the direct answer", "[solvers]") {
  std::mt19937 rng(3);
  std::normal_distribution<double> dist;
  const int n = 60;
  Eigen::MatrixXd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = dist(rng);
  Eigen::MatrixXd A = B * B.transpose() + 5.0 * Eigen::MatrixXd::Identity(n, n);
  DenseOp op(A);
  std::vector<double> b(n);
  for (auto& x : b) x = dist(rng);
  std::vector<double> x(n, 0.0);
  solve_cg(op, b, x, 1e-12, 2000, nullptr);
  Eigen::VectorXd xd = A.lu().solve(Eigen::Map<Eigen::VectorXd>(b.data(), n));
  for (int i = 0; i < n; ++i) CHECK(x[std::size_t(i)] == Catch::Approx(xd(i)).margin(1e-10));
}

TEST_CASE("identity system converges immediately", "[solvers]") {
  DenseOp op(Eigen::MatrixXd::Identity(20, 20));
  std::vector<double> b(20, 0.0);
  b[3] = 2.0;
  for (auto method : {LinearMethod::cg, LinearMethod::cgnr, LinearMethod::gmres}) {
    std::vector<double> x(20, 0.0);
    SolveStats st;
    switch (method) {
      case LinearMethod::cg: solve_cg(op, b, x, 1e-12, 10, &st); break;
      case LinearMethod::cgnr: solve_cgnr(op, b, x, 1e-12, 10, &st); break;
      case LinearMethod::gmres: solve_gmres(op, b, x, 1e-12, 10, 5, &st); break;
    }
    CHECK(st.iterations <= 1);
    CHECK(x[3] == Catch::Approx(2.0).margin(1e-12));
  }
}

TEST_CASE("CGNR and GMRES agree on a nonsymmetric system", "[solvers]") {
  std::mt19937 rng(17);
  std::normal_distribution<double> dist;
  const int n = 80;
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = dist(rng) * 0.2;
  A += 4.0 * Eigen::MatrixXd::Identity(n, n);
  DenseOp op(A);
  std::vector<double> b(n);
  for (auto& x : b) x = dist(rng);
  std::vector<double> x1(n, 0.0), x2(n, 0.0);
  solve_cgnr(op, b, x1, 1e-10, 5000, nullptr);
  solve_gmres(op, b, x2, 1e-10, 5000, 40, nullptr);
  double diff = 0.0;
  for (int i = 0; i < n; ++i) diff = std::max(diff, std::abs(x1[std::size_t(i)] - x2[std::size_t(i)]));
  CHECK(diff < 1e-8);
}

TEST_CASE("GMRES residual log is monotonically non-increasing", "[solvers]") {
  std::mt19937 rng(23);
  std::normal_distribution<double> dist;
  const int n = 100;
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = dist(rng) * 0.3;
  A += 3.0 * Eigen::MatrixXd::Identity(n, n);
  DenseOp op(A);
  std::vector<double> b(n);
  for (auto& x : b) x = dist(rng);
  std::vector<double> x(n, 0.0);
  SolveStats st;
  solve_gmres(op, b, x, 1e-11, 1000, 17, &st);  // force several restarts
  for (std::size_t i = 1; i < st.residuals.size(); ++i)
    CHECK(st.residuals[i] <= st.residuals[i - 1] * (1.0 + 1e-12));
}

TEST_CASE("convergence failures carry the residual history", "[solvers]") {
  std::mt19937 rng(31);
  std::normal_distribution<double> dist;
  const int n = 50;
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = dist(rng);
  A += 2.0 * Eigen::MatrixXd::Identity(n, n);
  DenseOp op(A);
  std::vector<double> b(n, 1.0), x(n, 0.0);
  try {
    solve_gmres(op, b, x, 1e-14, 3, 3, nullptr);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(!e.residual_history.empty());
    CHECK(e.best_residual() >= 0.0);
  }
}

TEST_CASE("transpose wrapper", "[solvers]") {
  std::mt19937 rng(41);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd A(30, 30);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 30; ++j) A(i, j) = dist(rng);
  auto op = std::make_shared<DenseOp>(A);
  auto at = transpose_apply(op);
  auto att = transpose_apply(std::shared_ptr<const LinOp>(at));

  std::vector<double> x(30);
  for (auto& v : x) v = dist(rng);
  std::vector<double> y1(30), y2(30);
  at->apply(x.data(), y1.data());
  op->apply_transpose(x.data(), y2.data());
  CHECK(y1 == y2);
  att->apply(x.data(), y1.data());
  op->apply(x.data(), y2.data());
  CHECK(y1 == y2);  // (A^T)^T = A exactly
}
