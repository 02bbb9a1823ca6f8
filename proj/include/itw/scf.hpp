#pragma once

#include "itw/hgh.hpp"
#include "itw/solvers.hpp"

namespace itw {

enum class ScfModel { single_electron, hf_closed_shell_2e, ks_lda_x };

inline ScfModel parse_scf_model(const std::string& s) {
  if (s == "single" || s == "single_electron") return ScfModel::single_electron;
  if (s == "hf" || s == "hf2e" || s == "hf_closed_shell_2e") return ScfModel::hf_closed_shell_2e;
  if (s == "lda" || s == "ks_lda_x") return ScfModel::ks_lda_x;
  throw std::invalid_argument("unknown SCF model: " + s);
}

inline std::string scf_model_name(ScfModel m) {
  switch (m) {
    case ScfModel::single_electron: return "single";
    case ScfModel::hf_closed_shell_2e: return "hf";
    case ScfModel::ks_lda_x: return "lda";
  }
  return "?";
}

struct ScfConfig {
  ScfModel model = ScfModel::single_electron;
  double mixing = 0.5;
  double scf_tol = 1e-7;
  int max_scf = 60;
  LinearSolveRequest poisson{};
  EigenRequest eig{};

  void validate() const {
    if (!(mixing > 0.0) || mixing > 1.0)
      throw std::invalid_argument("ScfConfig: mixing must lie in (0, 1]");
    if (!(scf_tol > 0.0)) throw std::invalid_argument("ScfConfig: scf_tol must be positive");
    poisson.validate();
    eig.validate();
  }
};

struct ScfIterationRecord {
  int iter = 0;
  double eps1 = 0.0;
  double e_total = 0.0;
  int poisson_iters = 0;
  int arnoldi_restarts = 0;
};

struct ScfState {
  std::vector<Field> orbitals;  // coefficient fields, normalized
  std::vector<double> occupations;
  Field rho;       // density point values
  Field v_h;       // Hartree potential coefficients
  std::vector<double> eps;
  double e_total = 0.0;
  bool converged = false;
  std::vector<ScfIterationRecord> history;
};

// Everything fixed about one electronic-structure problem: grid machinery,
// nuclear potential samples, nonlocal projectors, ion-ion repulsion.
struct ElectronicSystem {
  std::shared_ptr<const TransformPlan> plan;
  std::shared_ptr<const LaplacianOp> lap;
  std::vector<double> v_nuc;  // point values of the local nuclear potential
  std::vector<std::shared_ptr<const HghNonlocalOp>> nonlocals;
  double e_repulsion = 0.0;
};

// rho(alpha) = sum_i occ_i |phi_i(alpha)|^2, returned as point values.
inline Field density(const TransformPlan& plan, const std::vector<Field>& orbitals,
                     const std::vector<double>& occupations) {
  if (orbitals.size() != occupations.size())
    throw std::invalid_argument("density: orbital/occupation count mismatch");
  Field rho(orbitals.front().grid, FieldKind::point_values);
  for (std::size_t i = 0; i < orbitals.size(); ++i) {
    require_kind(orbitals[i], FieldKind::coefficients, "density");
    Field v = plan.backward(orbitals[i]);
    for (std::size_t q = 0; q < rho.size(); ++q) rho[q] += occupations[i] * v[q] * v[q];
  }
  return rho;
}

// Solve the Poisson equation L V = -4 pi a^2 rho in the truncated basis.
inline Field hartree(const TransformPlan& plan, const LaplacianOp& lap, const Field& rho,
                     const LinearSolveRequest& req, const Field* warm = nullptr,
                     SolveStats* stats = nullptr) {
  Field rho_c = (rho.kind == FieldKind::point_values) ? plan.forward(rho) : rho;
  double a = plan.grid().scale_a();
  Field rhs = rho_c;
  scal(-4.0 * M_PI * a * a, rhs.v);
  if (req.method == LinearMethod::cg && plan.grid().jmin() != plan.grid().jmax())
    throw std::invalid_argument("hartree: plain CG requires a single-level grid");
  return solve_linear(lap, rhs, req, warm, stats);
}

// Exchange-only LDA: pointwise potential and total exchange energy.
inline std::pair<Field, double> lda_exchange(const TransformPlan& plan, const Field& rho) {
  require_kind(rho, FieldKind::point_values, "lda_exchange");
  Field vx(rho.grid, FieldKind::point_values);
  std::vector<double> e43(rho.size());
  const double cx = std::cbrt(3.0 / M_PI);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    double r = rho[i];
    if (r < 0.0) {
      if (r < -1e-12) throw std::logic_error("lda_exchange: negative density beyond clip");
      r = 0.0;
    }
    vx[i] = -cx * std::cbrt(r);
    e43[i] = std::pow(r, 4.0 / 3.0);
  }
  double ex = -0.75 * cx * plan.integrate_values(e43);
  return {std::move(vx), ex};
}

namespace detail {

struct EnergyTerms {
  double rho_vh = 0.0;   // integral of rho V_H
  double rho_vx = 0.0;   // integral of rho V_x
  double e_x = 0.0;
};

inline double total_energy_of(ScfModel model, const std::vector<double>& eps,
                              const std::vector<double>& occ, const EnergyTerms& t,
                              double e_rep) {
  switch (model) {
    case ScfModel::single_electron:
      return eps.at(0) + e_rep;
    case ScfModel::hf_closed_shell_2e:
      return 2.0 * eps.at(0) - 0.25 * t.rho_vh + e_rep;
    case ScfModel::ks_lda_x: {
      double sum = 0.0;
      for (std::size_t i = 0; i < eps.size(); ++i) sum += occ[i] * eps[i];
      return sum - 0.5 * t.rho_vh + t.e_x - t.rho_vx + e_rep;
    }
  }
  return 0.0;
}

}  // namespace detail

// Model-appropriate total energy recomputed from a (possibly converged) state.
inline double total_energy(const ElectronicSystem& sys, ScfModel model, const ScfState& st) {
  detail::EnergyTerms t;
  if (model != ScfModel::single_electron) {
    Field vh_pts = sys.plan->backward(st.v_h);
    std::vector<double> prod(st.rho.size());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = st.rho[i] * vh_pts[i];
    t.rho_vh = sys.plan->integrate_values(prod);
    if (model == ScfModel::ks_lda_x) {
      auto [vx, ex] = lda_exchange(*sys.plan, st.rho);
      t.e_x = ex;
      for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = st.rho[i] * vx[i];
      t.rho_vx = sys.plan->integrate_values(prod);
    }
  }
  return detail::total_energy_of(model, st.eps, st.occupations, t, sys.e_repulsion);
}

// Self-consistent field loop (or a single eigensolve for one electron).
inline ScfState run_scf(const ElectronicSystem& sys, const ScfConfig& cfg,
                        const Field* warm_orbital = nullptr) {
  cfg.validate();
  const TransformPlan& plan = *sys.plan;
  auto grid = plan.grid_ptr();
  const std::size_t n = grid->size();

  ScfState st;
  st.occupations = {cfg.model == ScfModel::single_electron ? 1.0 : 2.0};
  st.v_h = Field(grid, FieldKind::coefficients);
  st.rho = Field(grid, FieldKind::point_values);

  auto eigensolve = [&](const std::vector<double>& dloc, const Field* warm,
                        ArnoldiStats* stats) {
    HamiltonianOp H(sys.plan, sys.lap, dloc, sys.nonlocals);
    const std::vector<double>* w = (warm && !warm->v.empty()) ? &warm->v : nullptr;
    auto res = arnoldi_smallest(H, cfg.eig, w, stats);
    if (res.empty())
      throw ConvergenceError("run_scf: eigensolver returned no real ground state", {});
    return res.front();
  };

  auto normalize = [&](Field& c) {
    Field v = plan.backward(c);
    double n2 = plan.inner_product_values(v.v, v.v);
    if (!(n2 > 0.0)) throw std::logic_error("run_scf: orbital has zero norm");
    double s = 1.0 / std::sqrt(n2);
    scal(s, c.v);
    scal(s, v.v);
    return v;
  };

  // initial orbital from the core Hamiltonian
  ArnoldiStats stats0;
  auto core = eigensolve(sys.v_nuc, warm_orbital ? warm_orbital : nullptr, &stats0);
  Field phi(grid, FieldKind::coefficients);
  phi.v = std::move(core.vector);
  Field phi_pts = normalize(phi);
  st.eps = {core.value};

  if (cfg.model == ScfModel::single_electron) {
    st.orbitals = {phi};
    st.rho = density(plan, st.orbitals, st.occupations);
    st.e_total = core.value + sys.e_repulsion;
    st.converged = true;
    st.history.push_back({0, core.value, st.e_total, 0, stats0.restarts});
    return st;
  }

  const double occ = st.occupations[0];
  const double vh_weight = (cfg.model == ScfModel::hf_closed_shell_2e) ? 0.5 : 1.0;

  Field rho_in(grid, FieldKind::point_values);
  for (std::size_t q = 0; q < n; ++q) rho_in[q] = occ * phi_pts[q] * phi_pts[q];

  double e_prev = 0.0;
  bool have_prev = false;
  for (int it = 1; it <= cfg.max_scf; ++it) {
    SolveStats pstats;
    st.v_h = hartree(plan, *sys.lap, rho_in, cfg.poisson, &st.v_h, &pstats);
    Field vh_pts = plan.backward(st.v_h);

    detail::EnergyTerms terms;
    std::vector<double> prod(n);
    for (std::size_t q = 0; q < n; ++q) prod[q] = rho_in[q] * vh_pts[q];
    terms.rho_vh = plan.integrate_values(prod);

    std::vector<double> dloc(n);
    for (std::size_t q = 0; q < n; ++q) dloc[q] = sys.v_nuc[q] + vh_weight * vh_pts[q];
    if (cfg.model == ScfModel::ks_lda_x) {
      auto [vx, ex] = lda_exchange(plan, rho_in);
      terms.e_x = ex;
      for (std::size_t q = 0; q < n; ++q) prod[q] = rho_in[q] * vx[q];
      terms.rho_vx = plan.integrate_values(prod);
      for (std::size_t q = 0; q < n; ++q) dloc[q] += vx[q];
    }

    ArnoldiStats astats;
    auto pair = eigensolve(dloc, &phi, &astats);
    phi.v = std::move(pair.vector);
    phi_pts = normalize(phi);
    st.eps = {pair.value};

    double e = detail::total_energy_of(cfg.model, st.eps, st.occupations, terms,
                                       sys.e_repulsion);
    st.history.push_back({it, pair.value, e, pstats.iterations, astats.restarts});
    st.rho = rho_in;
    st.orbitals = {phi};
    st.e_total = e;

    if (have_prev && std::abs(e - e_prev) < cfg.scf_tol) {
      st.converged = true;
      return st;
    }
    e_prev = e;
    have_prev = true;

    for (std::size_t q = 0; q < n; ++q)
      rho_in[q] = (1.0 - cfg.mixing) * rho_in[q] + cfg.mixing * occ * phi_pts[q] * phi_pts[q];
  }
  throw ConvergenceError("run_scf: no convergence within max_scf iterations",
                         [&] {
                           std::vector<double> h;
                           for (const auto& r : st.history) h.push_back(r.e_total);
                           return h;
                         }());
}

}  // namespace itw
