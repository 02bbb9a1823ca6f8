#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "itw/hgh.hpp"

using namespace itw;

namespace {

struct Env {
  std::shared_ptr<const MultiGrid> grid;
  std::shared_ptr<DdFamily> fam;
  std::shared_ptr<TransformPlan> plan;
};

Env make_env(const char* txt, double a = 1.0) {
  Env e;
  GridSpec spec = GridSpec::parse(txt);
  spec.scale_a = a;
  e.grid = build_grid(spec);
  e.fam = std::make_shared<DdFamily>(8);
  e.plan = std::make_shared<TransformPlan>(e.grid, e.fam);
  return e;
}

std::shared_ptr<HghParams> synth_params(int l, double r_l, double h11) {
  auto p = std::make_shared<HghParams>();
  p->element = "X";
  p->z_ion = 1.0;
  p->r_loc = 0.3;
  HghChannel ch;
  ch.l = l;
  ch.r_l = r_l;
  ch.h[0][0] = h11;
  p->channels.push_back(ch);
  return p;
}

}  // namespace

TEST_CASE("radial projectors are unit-normalized", "[hgh]") {
  // analytic check of p^l_i itself by radial quadrature
  for (int l : {0, 1})
    for (int i : {1, 2}) {
      double r_l = 0.7;
      double s = 0.0, dr = 1e-3;
      for (double r = 0.5 * dr; r < 12.0; r += dr) {
        double p = hgh_projector_radial(l, i, r_l, r);
        s += p * p * r * r * dr;
      }
      CHECK(s == Catch::Approx(1.0).epsilon(1e-5));
    }
}

TEST_CASE("projector fields are unit-normalized under the module quadrature", "[hgh]") {
  // r_l = 1.0 on spacing 0.25 (>= 4 points per r_l) with the support contained
  Env e = make_env("1/4 Z26^3");
  auto op = HghNonlocalOp(e.plan, {0.0, 0.0, 0.0}, synth_params(0, 1.0, 1.0));
  REQUIRE(op.projector_count() == 1u);
  CHECK(op.projector_norm2(0) == Catch::Approx(1.0).margin(1e-6));

  auto op1 = HghNonlocalOp(e.plan, {0.0, 0.0, 0.0}, synth_params(1, 0.9, 1.0));
  REQUIRE(op1.projector_count() == 3u);
  for (std::size_t q = 0; q < 3; ++q)
    CHECK(op1.projector_norm2(q) == Catch::Approx(1.0).margin(1e-5));
}

TEST_CASE("vanishing coupling gives the zero operator", "[hgh]") {
  Env e = make_env("1/2 Z6^3");
  auto p = synth_params(0, 0.6, 0.0);
  HghNonlocalOp op(e.plan, {0, 0, 0}, p);
  CHECK(op.empty());
  std::vector<double> x(e.grid->size(), 1.0), y(e.grid->size(), 5.0);
  op.apply(x.data(), y.data());
  CHECK(norm_inf(y) == 0.0);
}

TEST_CASE("s-projector annihilates odd functions", "[hgh]") {
  Env e = make_env("1/2 Z8^3");
  HghNonlocalOp op(e.plan, {0, 0, 0}, synth_params(0, 0.8, 2.0));
  Field v(e.grid, FieldKind::point_values);
  for (std::size_t i = 0; i < e.grid->size(); ++i) {
    auto p = e.grid->position_bohr(i);
    double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    v[i] = p[2] * std::exp(-r2);  // odd in z
  }
  Field c = e.plan->forward(v);
  std::vector<double> out(e.grid->size());
  op.apply(c.v.data(), out.data());
  CHECK(norm_inf(out) < 1e-12);
}

TEST_CASE("nonlocal operator is symmetric on point values", "[hgh]") {
  Env e = make_env("1/2 Z5^3 u 1/4 Z4^3");
  auto p = synth_params(0, 0.7, 1.5);
  // add a second projector to exercise the off-diagonal coupling
  p->channels[0].h[0][1] = p->channels[0].h[1][0] = -0.4;
  p->channels[0].h[1][1] = 0.9;
  HghNonlocalOp op(e.plan, {0.1, -0.2, 0.05}, p);

  std::mt19937 rng(99);
  std::uniform_real_distribution<double> dist(-1, 1);
  std::vector<double> fv(e.grid->size()), gv(e.grid->size());
  for (auto& x : fv) x = dist(rng);
  for (auto& x : gv) x = dist(rng);

  Field fc(e.grid, FieldKind::point_values), gc(e.grid, FieldKind::point_values);
  fc.v = fv;
  gc.v = gv;
  auto cf = e.plan->forward(fc), cg = e.plan->forward(gc);
  std::vector<double> Vg(e.grid->size()), Vf(e.grid->size());
  op.apply(cg.v.data(), Vg.data());
  op.apply(cf.v.data(), Vf.data());
  std::vector<double> Vg_pts(e.grid->size(), 0.0), Vf_pts(e.grid->size(), 0.0);
  e.plan->apply_W(Vg.data(), Vg_pts.data());
  e.plan->apply_W(Vf.data(), Vf_pts.data());

  double a = op.patch_inner(fv, Vg_pts);
  double b = op.patch_inner(gv, Vf_pts);
  CHECK(a == Catch::Approx(b).margin(1e-10 * std::max(1.0, std::abs(a))));

  SECTION("transpose matches a dense probe") {
    std::vector<double> y1(e.grid->size()), y2(e.grid->size());
    op.apply_transpose(cf.v.data(), y1.data());
    // <e_i, V^T f> = <V e_i, f> spot check on a few unit vectors
    std::vector<double> unit(e.grid->size(), 0.0), col(e.grid->size());
    for (std::size_t i = 777; i < e.grid->size(); i += 1531) {
      unit[i] = 1.0;
      op.apply(unit.data(), col.data());
      unit[i] = 0.0;
      double lhs = dot(col, cf.v);
      CHECK(y1[i] == Catch::Approx(lhs).margin(1e-11));
    }
  }
}

TEST_CASE("channels with l >= 2 are rejected", "[hgh]") {
  Env e = make_env("1/2 Z4^3");
  CHECK_THROWS_AS(HghNonlocalOp(e.plan, {0, 0, 0}, synth_params(2, 0.5, 1.0)),
                  std::logic_error);
}

TEST_CASE("projector support beyond the fine box flags truncation", "[hgh]") {
  Env e = make_env("1/2 Z10^3 u 1/4 Z4^3");
  HghNonlocalOp wide(e.plan, {0, 0, 0}, synth_params(0, 1.5, 1.0));
  CHECK(wide.truncated());
  HghNonlocalOp narrow(e.plan, {0, 0, 0}, synth_params(0, 0.1, 1.0));
  CHECK_FALSE(narrow.truncated());
}
