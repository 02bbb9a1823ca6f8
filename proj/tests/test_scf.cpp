#include <catch2/catch_amalgamated.hpp>

#include "itw/scf.hpp"

using namespace itw;

namespace {

struct Env {
  std::shared_ptr<const MultiGrid> grid;
  std::shared_ptr<DdFamily> fam;
  std::shared_ptr<FilterTable> ft;
  std::shared_ptr<TransformPlan> plan;
  std::shared_ptr<LaplacianOp> lap;
};

Env make_env(const char* txt, double a = 1.0) {
  Env e;
  GridSpec spec = GridSpec::parse(txt);
  spec.scale_a = a;
  e.grid = build_grid(spec);
  e.fam = std::make_shared<DdFamily>(8);
  e.ft = std::make_shared<FilterTable>(*e.fam, std::max(1, e.grid->jmax() - e.grid->jmin()));
  e.plan = std::make_shared<TransformPlan>(e.grid, e.fam);
  e.lap = std::make_shared<LaplacianOp>(e.grid, e.ft);
  return e;
}

ElectronicSystem hgh_system(const Env& e, const std::vector<Nucleus>& nuclei) {
  ElectronicSystem sys;
  sys.plan = e.plan;
  sys.lap = e.lap;
  PseudoCutoff cut{e.grid->scale_a() * dpow2(-e.grid->jmax()), 7};
  sys.v_nuc = nuclear_potential_values(nuclei, *e.grid, cut);
  for (const auto& nu : nuclei)
    if (nu.kind == PseudoKind::hgh) {
      auto nl = std::make_shared<HghNonlocalOp>(e.plan, nu.R, nu.hgh);
      if (!nl->empty()) sys.nonlocals.push_back(nl);
    }
  sys.e_repulsion = nuclei.size() > 1 ? repulsion_energy(nuclei) : 0.0;
  return sys;
}

std::shared_ptr<HghParams> h_params() {
  auto p = std::make_shared<HghParams>();
  p->element = "H";
  p->z_ion = 1.0;
  p->r_loc = 0.2;
  p->C = {-4.180237, 0.725075, 0.0, 0.0};
  return p;
}

std::shared_ptr<HghParams> he_params() {
  auto p = std::make_shared<HghParams>();
  p->element = "He";
  p->z_ion = 2.0;
  p->r_loc = 0.2;
  p->C = {-9.112023, 1.698368, 0.0, 0.0};
  return p;
}

}  // namespace

TEST_CASE("density from orbitals", "[scf]") {
  Env e = make_env("1/2 Z4^3");
  Field phi(e.grid, FieldKind::coefficients);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    auto p = e.grid->position_bohr(i);
    phi[i] = std::exp(-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
  }
  // normalize by quadrature
  Field v = e.plan->backward(phi);
  double n2 = e.plan->inner_product_values(v.v, v.v);
  scal(1.0 / std::sqrt(n2), phi.v);

  SECTION("occupation 2 doubles the square") {
    Field rho = density(*e.plan, {phi}, {2.0});
    Field vv = e.plan->backward(phi);
    for (std::size_t i = 0; i < rho.size(); ++i)
      CHECK(rho[i] == Catch::Approx(2.0 * vv[i] * vv[i]).margin(1e-14));
    CHECK(e.plan->integrate_values(rho.v) == Catch::Approx(2.0).margin(1e-6));
  }
  SECTION("two orbitals add") {
    Field psi = phi;
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= 0.5;
    Field rho = density(*e.plan, {phi, psi}, {1.0, 1.0});
    Field r1 = density(*e.plan, {phi}, {1.0});
    Field r2 = density(*e.plan, {psi}, {1.0});
    for (std::size_t i = 0; i < rho.size(); ++i)
      CHECK(rho[i] == Catch::Approx(r1[i] + r2[i]).margin(1e-14));
  }
}

TEST_CASE("Hartree potential of a Gaussian density", "[scf]") {
  // rho = Q * gaussian, V_exact = Q erf(r / (sigma sqrt2)) / r
  Env e = make_env("2 Z8^3 u Z8^3 u 1/2 Z8^3");
  const double sigma = 0.5, Q = 1.0;
  Field rho(e.grid, FieldKind::point_values);
  for (std::size_t i = 0; i < e.grid->size(); ++i) {
    auto p = e.grid->position_bohr(i);
    double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    rho[i] = Q * std::exp(-0.5 * r2 / (sigma * sigma)) / std::pow(2 * M_PI * sigma * sigma, 1.5);
  }
  LinearSolveRequest req;
  req.method = LinearMethod::gmres;
  req.tol = 1e-9;
  SolveStats st_g;
  Field vh = hartree(*e.plan, *e.lap, rho, req, nullptr, &st_g);
  Field vh_pts = e.plan->backward(vh);

  double vpeak = Q * std::sqrt(2.0 / M_PI) / sigma;
  double worst = 0.0;
  for (std::size_t i = 0; i < e.grid->size(); ++i) {
    auto p = e.grid->position_bohr(i);
    double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    if (r > 4.0) continue;  // interior points only
    double vex = (r < 1e-9) ? vpeak : Q * std::erf(r / (sigma * std::sqrt(2.0))) / r;
    worst = std::max(worst, std::abs(vh_pts[i] - vex));
  }
  // box truncation dominates: |error| ~ Q/R_box with R_box = 16 B
  CHECK(worst < 0.06 * vpeak);

  SECTION("residual of the Poisson system") {
    Field rho_c = e.plan->forward(rho);
    std::vector<double> lv(e.grid->size());
    e.lap->apply(vh.v.data(), lv.data());
    double a = e.grid->scale_a();
    double rnorm = 0.0, bnorm = 0.0;
    for (std::size_t i = 0; i < lv.size(); ++i) {
      double resid = lv[i] / (a * a) + 4.0 * M_PI * rho_c[i];
      rnorm += resid * resid;
      bnorm += std::pow(4.0 * M_PI * rho_c[i], 2);
    }
    CHECK(std::sqrt(rnorm / bnorm) < 1e-8);
  }

  SECTION("CGNR agrees with GMRES") {
    LinearSolveRequest r2;
    r2.method = LinearMethod::cgnr;
    r2.tol = 1e-9;
    r2.max_iter = 60000;
    Field vh2 = hartree(*e.plan, *e.lap, rho, r2);
    double diff = 0.0, scale = norm_inf(vh.v);
    for (std::size_t i = 0; i < vh.size(); ++i)
      diff = std::max(diff, std::abs(vh[i] - vh2[i]));
    CHECK(diff / scale < 1e-6);
  }

  SECTION("zero density gives zero potential") {
    Field z(e.grid, FieldKind::point_values);
    Field vz = hartree(*e.plan, *e.lap, z, req);
    CHECK(norm_inf(vz.v) == 0.0);
  }
}

TEST_CASE("LDA exchange", "[scf]") {
  Env e = make_env("1/2 Z3^3");
  SECTION("uniform density closed form") {
    Field rho(e.grid, FieldKind::point_values);
    for (auto& x : rho.v) x = 1.0;
    auto [vx, ex] = lda_exchange(*e.plan, rho);
    for (std::size_t i = 0; i < vx.size(); ++i)
      CHECK(vx[i] == Catch::Approx(-std::cbrt(3.0 / M_PI)).epsilon(1e-12));
    CHECK(vx[0] == Catch::Approx(-0.98475).margin(5e-6));
    // E_x = -3/4 (3/pi)^{1/3} * covered volume for rho = 1 (7 cells of 1/2 per axis)
    double vol = std::pow(7.0 * 0.5, 3);
    CHECK(ex == Catch::Approx(-0.75 * std::cbrt(3.0 / M_PI) * vol).epsilon(1e-10));
  }
  SECTION("cube-root scaling") {
    Field rho(e.grid, FieldKind::point_values);
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = 0.1 + 0.01 * double(i % 7);
    auto [vx1, ex1] = lda_exchange(*e.plan, rho);
    Field rho8 = rho;
    scal(8.0, rho8.v);
    auto [vx2, ex2] = lda_exchange(*e.plan, rho8);
    for (std::size_t i = 0; i < vx1.size(); ++i)
      CHECK(vx2[i] == Catch::Approx(2.0 * vx1[i]).epsilon(1e-12));
  }
  SECTION("zero density") {
    Field rho(e.grid, FieldKind::point_values);
    auto [vx, ex] = lda_exchange(*e.plan, rho);
    CHECK(norm_inf(vx.v) == 0.0);
    CHECK(ex == 0.0);
  }
  SECTION("negative density beyond the clip is rejected") {
    Field rho(e.grid, FieldKind::point_values);
    rho[5] = -1e-6;
    CHECK_THROWS_AS(lda_exchange(*e.plan, rho), std::logic_error);
  }
}

TEST_CASE("single-electron model degenerates to one eigensolve", "[scf]") {
  Env e = make_env("1/2 Z6^3");
  std::vector<Nucleus> nuc{{1.0, {0, 0, 0}, PseudoKind::hgh, h_params()}};
  ElectronicSystem sys = hgh_system(e, nuc);
  ScfConfig cfg;
  cfg.model = ScfModel::single_electron;
  cfg.eig.nev = 1;
  cfg.eig.subspace_dim = 16;
  cfg.eig.tol = 1e-8;
  ScfState st = run_scf(sys, cfg);
  CHECK(st.converged);
  CHECK(st.history.size() == 1u);
  CHECK(st.e_total < 0.0);  // bound state
  CHECK(st.e_total == Catch::Approx(st.eps[0]));

  // virial-style sanity: <T> > 0
  auto kin = kinetic(e.lap);
  Field tphi = apply(*kin, st.orbitals[0]);
  Field tv = e.plan->backward(tphi);
  Field ov = e.plan->backward(st.orbitals[0]);
  CHECK(e.plan->inner_product_values(ov.v, tv.v) > 0.0);
}

TEST_CASE("closed-shell SCF on a coarse helium grid", "[scf]") {
  Env e = make_env("1/2 Z8^3");
  std::vector<Nucleus> nuc{{2.0, {0, 0, 0}, PseudoKind::hgh, he_params()}};
  ElectronicSystem sys = hgh_system(e, nuc);
  ScfConfig cfg;
  cfg.model = ScfModel::hf_closed_shell_2e;
  cfg.mixing = 0.5;
  cfg.scf_tol = 1e-8;
  cfg.max_scf = 80;
  cfg.eig.nev = 1;
  cfg.eig.subspace_dim = 14;
  cfg.eig.tol = 1e-9;
  cfg.poisson.method = LinearMethod::gmres;
  cfg.poisson.tol = 1e-9;
  ScfState st = run_scf(sys, cfg);
  CHECK(st.converged);
  CHECK(st.e_total < -2.0);
  CHECK(st.eps[0] < 0.0);

  SECTION("normalization is preserved") {
    Field v = e.plan->backward(st.orbitals[0]);
    CHECK(e.plan->inner_product_values(v.v, v.v) == Catch::Approx(1.0).margin(1e-8));
    CHECK(e.plan->integrate_values(st.rho.v) == Catch::Approx(2.0).margin(1e-6));
  }
  SECTION("energy formula is self-consistent at the fixed point") {
    double re = total_energy(sys, ScfModel::hf_closed_shell_2e, st);
    CHECK(re == Catch::Approx(st.e_total).margin(20 * cfg.scf_tol));
  }
  SECTION("the convergence tail does not oscillate") {
    std::vector<double> deltas;
    for (std::size_t i = 1; i < st.history.size(); ++i)
      deltas.push_back(std::abs(st.history[i].e_total - st.history[i - 1].e_total));
    std::size_t m = deltas.size();
    for (std::size_t i = (m > 5 ? m - 5 : 1); i < m; ++i)
      CHECK(deltas[i] <= deltas[i - 1] * 1.1);
  }
  SECTION("LDA variant also converges") {
    ScfConfig c2 = cfg;
    c2.model = ScfModel::ks_lda_x;
    ScfState st2 = run_scf(sys, c2);
    CHECK(st2.converged);
    CHECK(st2.e_total < -2.0);
    CHECK(st2.e_total > st.e_total - 0.5);
  }
}
