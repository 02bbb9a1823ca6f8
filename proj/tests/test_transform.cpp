#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "itw/operators.hpp"
#include "support/oracles.hpp"

using namespace itw;

namespace {

std::shared_ptr<TransformPlan> make_plan(const char* grid_text, int order = 8) {
  auto g = build_grid(GridSpec::parse(grid_text));
  auto fam = std::make_shared<DdFamily>(order);
  return std::make_shared<TransformPlan>(g, fam);
}

std::vector<double> random_vec(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("single-level transforms are the identity", "[transform]") {
  auto plan = make_plan("1/2 Z4^3");
  Field c(plan->grid_ptr(), FieldKind::coefficients);
  c.v = random_vec(c.size(), 7);
  Field v = plan->backward(c);
  CHECK(v.kind == FieldKind::point_values);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(v[i] == c[i]);
  Field c2 = plan->forward(v);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(c2[i] == v[i]);
}

TEST_CASE("backward transform matches brute-force basis evaluation", "[transform]") {
  for (const char* txt : {"Z3^3 u 1/2 Z3^3", "Z2^3 u 1/2 Z2^3 u 1/4 Z2^3"}) {
    DYNAMIC_SECTION(txt) {
      auto g = build_grid(GridSpec::parse(txt));
      auto fam = std::make_shared<DdFamily>(8);
      TransformPlan plan(g, fam);
      Eigen::MatrixXd Wd = test::dense_W(*fam, *g);

      Field c(g, FieldKind::coefficients);
      c.v = random_vec(c.size(), 11);
      Field v = plan.backward(c);
      Eigen::Map<Eigen::VectorXd> cv(c.v.data(), long(c.size()));
      Eigen::VectorXd vd = Wd * cv;
      double worst = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i)
        worst = std::max(worst, std::abs(v[i] - vd(long(i))));
      CHECK(worst < 1e-12);
    }
  }
}

TEST_CASE("unit coarse coefficient gives cardinal interpolation", "[transform]") {
  auto g = build_grid(GridSpec::parse("Z3^3 u 1/2 Z3^3"));
  auto fam = std::make_shared<DdFamily>(8);
  TransformPlan plan(g, fam);
  Field c(g, FieldKind::coefficients);
  std::size_t beta = *g->index_of(0, {1, 0, -1});
  c.v[beta] = 1.0;
  Field v = plan.backward(c);
  for (std::size_t i = 0; i < g->size(); ++i) {
    auto p = g->point_at(i);
    if (p.j == 0) CHECK(v[i] == Catch::Approx(i == beta ? 1.0 : 0.0).margin(1e-14));
  }
}

TEST_CASE("transform round trips", "[transform]") {
  for (const char* txt : {"Z3^3 u 1/2 Z3^3", "Z2^3 u 1/2 Z2^3 u 1/4 Z2^3", "1/2 Z5^3 u 1/4 Z3^3"}) {
    DYNAMIC_SECTION(txt) {
      auto plan = make_plan(txt);
      auto g = plan->grid_ptr();
      Field c(g, FieldKind::coefficients);
      c.v = random_vec(c.size(), 23);
      Field v = plan->backward(c);
      Field c2 = plan->forward(v);
      double nref = norm_inf(c.v);
      double worst = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i)
        worst = std::max(worst, std::abs(c2[i] - c[i]));
      CHECK(worst / nref < 1e-12);

      Field vv(g, FieldKind::point_values);
      vv.v = random_vec(c.size(), 29);
      Field cc = plan->forward(vv);
      Field v2 = plan->backward(cc);
      worst = 0.0;
      for (std::size_t i = 0; i < vv.size(); ++i)
        worst = std::max(worst, std::abs(v2[i] - vv[i]));
      CHECK(worst / norm_inf(vv.v) < 1e-12);
    }
  }
}

TEST_CASE("degree-7 polynomials have vanishing detail coefficients", "[transform]") {
  auto plan = make_plan("1/2 Z6^3 u 1/4 Z6^3");
  auto g = plan->grid_ptr();
  Field v(g, FieldKind::point_values);
  auto poly = [](double x, double y, double z) {
    return std::pow(x - 0.2, 7) + std::pow(y, 5) * z * z + 3.0 * x * y * z - 1.0 +
           std::pow(0.5 * x + 0.25 * y - 0.125 * z, 7);
  };
  for (std::size_t i = 0; i < g->size(); ++i) {
    auto p = g->position(i);
    v[i] = poly(p[0], p[1], p[2]);
  }
  double scale = norm_inf(v.v);
  scal(1.0 / scale, v.v);
  Field c = plan->forward(v);
  double worst = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i)
    if (g->point_at(i).j != g->jmin()) worst = std::max(worst, std::abs(c[i]));
  CHECK(worst < 1e-9);
}

TEST_CASE("transform kind tags are enforced", "[transform]") {
  auto plan = make_plan("1/2 Z2^3");
  Field c(plan->grid_ptr(), FieldKind::coefficients);
  CHECK_THROWS_AS(plan->forward(c), std::invalid_argument);
  Field v(plan->grid_ptr(), FieldKind::point_values);
  CHECK_THROWS_AS(plan->backward(v), std::invalid_argument);
  auto other = make_plan("1/2 Z3^3");
  Field co(other->grid_ptr(), FieldKind::coefficients);
  CHECK_THROWS_AS(plan->backward(co), std::invalid_argument);
}

TEST_CASE("transforms are linear", "[transform]") {
  auto plan = make_plan("Z3^3 u 1/2 Z2^3");
  auto g = plan->grid_ptr();
  auto a = random_vec(g->size(), 3), b = random_vec(g->size(), 5);
  std::vector<double> sum(g->size());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = 2.0 * a[i] - 0.5 * b[i];
  std::vector<double> wa(g->size(), 0.0), wb(g->size(), 0.0), ws(g->size(), 0.0);
  plan->apply_W(a.data(), wa.data());
  plan->apply_W(b.data(), wb.data());
  plan->apply_W(sum.data(), ws.data());
  for (std::size_t i = 0; i < sum.size(); ++i)
    CHECK(ws[i] == Catch::Approx(2.0 * wa[i] - 0.5 * wb[i]).margin(1e-12));
}

TEST_CASE("transpose kernels match dense transposes", "[transform]") {
  auto g = build_grid(GridSpec::parse("Z2^3 u 1/2 Z2^3"));
  auto fam = std::make_shared<DdFamily>(8);
  auto plan = std::make_shared<TransformPlan>(g, fam);
  const std::size_t n = g->size();
  Eigen::MatrixXd Wd = test::dense_W(*fam, *g);
  Eigen::MatrixXd Ud = Wd.inverse();

  auto x = random_vec(n, 41);
  Eigen::Map<Eigen::VectorXd> xv(x.data(), long(n));

  std::vector<double> out(n, 0.0);
  plan->apply_Wt(x.data(), out.data());
  Eigen::VectorXd ref = Wd.transpose() * xv;
  for (std::size_t i = 0; i < n; ++i) CHECK(out[i] == Catch::Approx(ref(long(i))).margin(1e-11));

  std::fill(out.begin(), out.end(), 0.0);
  plan->apply_Ut(x.data(), out.data());
  ref = Ud.transpose() * xv;
  for (std::size_t i = 0; i < n; ++i) CHECK(out[i] == Catch::Approx(ref(long(i))).margin(1e-10));
}

TEST_CASE("pointwise multiplication operator", "[transform]") {
  auto g = build_grid(GridSpec::parse("Z2^3 u 1/2 Z2^3"));
  auto fam = std::make_shared<DdFamily>(8);
  auto plan = std::make_shared<TransformPlan>(g, fam);
  const std::size_t n = g->size();

  SECTION("constant diagonal is a scalar multiple of the identity") {
    auto M1 = multiply_operator(plan, std::vector<double>(n, 1.0));
    auto Ml = multiply_operator(plan, std::vector<double>(n, -2.5));
    auto x = random_vec(n, 51);
    std::vector<double> y(n), z(n);
    M1->apply(x.data(), y.data());
    Ml->apply(x.data(), z.data());
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(y[i] == Catch::Approx(x[i]).margin(1e-12));
      CHECK(z[i] == Catch::Approx(-2.5 * x[i]).margin(1e-12));
    }
  }

  SECTION("random diagonal matches dense U diag(d) W") {
    auto d = random_vec(n, 57);
    auto M = multiply_operator(plan, d);
    Eigen::MatrixXd Wd = test::dense_W(*fam, *g);
    Eigen::MatrixXd Ud = Wd.inverse();
    Eigen::MatrixXd Md = Ud * Eigen::Map<Eigen::VectorXd>(d.data(), long(n)).asDiagonal() * Wd;
    auto x = random_vec(n, 61);
    std::vector<double> y(n);
    M->apply(x.data(), y.data());
    Eigen::VectorXd ref = Md * Eigen::Map<Eigen::VectorXd>(x.data(), long(n));
    double scale = ref.cwiseAbs().maxCoeff();
    for (std::size_t i = 0; i < n; ++i)
      CHECK(y[i] == Catch::Approx(ref(long(i))).margin(1e-11 * scale));

    std::vector<double> yt(n);
    M->apply_transpose(x.data(), yt.data());
    ref = Md.transpose() * Eigen::Map<Eigen::VectorXd>(x.data(), long(n));
    for (std::size_t i = 0; i < n; ++i)
      CHECK(yt[i] == Catch::Approx(ref(long(i))).margin(1e-11 * scale));
  }
}

TEST_CASE("quadrature integrates the basis exactly", "[transform]") {
  GridSpec s = GridSpec::parse("Z6^3 u 1/2 Z4^3");
  s.scale_a = 0.5;
  auto g = build_grid(s);
  auto fam = std::make_shared<DdFamily>(8);
  TransformPlan plan(g, fam);

  // constant function integrates to the coarse box volume
  std::vector<double> ones(g->size(), 1.0);
  CHECK(plan.integrate_values(ones) == Catch::Approx(std::pow(13 * 0.5, 3)).epsilon(1e-10));

  // a contained, resolved Gaussian integrates to its analytic value
  auto gaussian_on = [](const MultiGrid& mg, double sigma) {
    std::vector<double> gau(mg.size());
    for (std::size_t i = 0; i < mg.size(); ++i) {
      auto p = mg.position_bohr(i);
      double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
      gau[i] = std::exp(-0.5 * r2 / (sigma * sigma));
    }
    return gau;
  };
  GridSpec s1 = GridSpec::parse("Z10^3");
  s1.scale_a = 0.5;
  auto g1 = build_grid(s1);
  TransformPlan plan1(g1, fam);
  double exact08 = std::pow(2.0 * M_PI * 0.64, 1.5);
  CHECK(plan1.integrate_values(gaussian_on(*g1, 0.8)) == Catch::Approx(exact08).epsilon(1e-10));

  GridSpec s2 = GridSpec::parse("Z10^3 u 1/2 Z6^3");
  s2.scale_a = 0.5;
  auto g2 = build_grid(s2);
  TransformPlan plan2(g2, fam);
  double exact10 = std::pow(2.0 * M_PI * 1.0, 1.5);
  CHECK(plan2.integrate_values(gaussian_on(*g2, 1.0)) == Catch::Approx(exact10).epsilon(1e-4));
}
