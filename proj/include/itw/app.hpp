#pragma once

#include "itw/report.hpp"

namespace itw {

inline GridSpec grid_from_config(const Config& c) {
  GridSpec spec;
  if (c.has("grid.notation")) spec = GridSpec::parse(c.require("grid.notation"));
  else if (c.has("grid.basis")) spec = GridSpec::parse(table_grid_notation(c.get_int("grid.basis", 0)));
  else throw std::invalid_argument("config needs grid.basis or grid.notation");
  spec.scale_a = c.get_double("grid.a", 1.0);
  return spec;
}

inline SystemDef system_from_config(const Config& c) {
  std::string name = c.require("system.name");
  bool one_electron = (name == "H" || name == "Li" || name == "H2+");
  ScfModel model = one_electron
                       ? ScfModel::single_electron
                       : parse_scf_model(c.get("system.model", "hf"));
  PseudoKind pseudo = parse_pseudo_kind(c.get("system.pseudo", "hgh"));
  double d = c.get_double("system.d", 0.0);
  return make_system_def(name, model, pseudo, grid_from_config(c), d);
}

inline ScfConfig scf_config_from(const Config& c, ScfModel model) {
  ScfConfig cfg;
  cfg.model = model;
  cfg.mixing = c.get_double("scf.mixing", 0.5);
  cfg.scf_tol = c.get_double("scf.tol", 1e-7);
  cfg.max_scf = c.get_int("scf.max_iter", 60);
  cfg.eig.nev = c.get_int("solver.nev", 1);
  cfg.eig.subspace_dim = c.get_int("solver.subspace", std::max(16, 3 * cfg.eig.nev + 4));
  cfg.eig.tol = c.get_double("solver.tol", 1e-8);
  cfg.eig.max_restarts = c.get_int("solver.max_restarts", 600);
  cfg.eig.seed = std::uint64_t(c.get_int("solver.seed", 12345));
  cfg.poisson.method = parse_linear_method(c.get("solver.poisson_method", "gmres"));
  cfg.poisson.tol = c.get_double("solver.poisson_tol", 1e-8);
  cfg.poisson.max_iter = c.get_int("solver.poisson_max_iter", 40000);
  cfg.poisson.restart_len = c.get_int("solver.restart_len", 60);
  cfg.validate();
  return cfg;
}

inline std::map<std::string, HghParams> hgh_from_config(const Config& c) {
  std::string path = c.get("system.hgh_file", std::string(ITW_DATA_DIR) + "/hgh_parameters.txt");
  return load_hgh_parameters(path);
}

// Runs one system on one grid.  A prebuilt workspace may be passed when many
// runs share the grid.
inline RunResult run_system(const SystemDef& def, const ScfConfig& cfg,
                            const std::map<std::string, HghParams>& hgh,
                            const Workspace* shared_ws = nullptr,
                            const Field* warm_orbital = nullptr) {
  def.validate();
  auto t0 = std::chrono::steady_clock::now();
  Workspace local;
  const Workspace* ws = shared_ws;
  if (!ws) {
    local = Workspace::make(def.grid);
    ws = &local;
  }
  AssembledSystem as = assemble_system(*ws, def, hgh);
  ScfConfig c = cfg;
  c.model = def.model;
  RunResult r;
  r.def = def;
  r.state = run_scf(as.sys, c, warm_orbital);
  r.grid_notation = def.grid.format();
  r.scale_a = def.grid.scale_a;
  r.g = def.grid.scale_a * dpow2(-def.grid.jmax());
  r.points = ws->grid->size();
  r.nonlocal_truncated = as.nonlocal_truncated;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// Atomic reference energies on the symmetrized grid (one-electron atoms).
inline std::vector<RunResult> atom_references(const SystemDef& def, const ScfConfig& cfg,
                                              const std::map<std::string, HghParams>& hgh) {
  std::vector<RunResult> out;
  if (def.atoms.empty()) return out;
  GridSpec atom_grid = def.grid.symmetrized_for_atom();
  Workspace ws = Workspace::make(atom_grid);
  std::map<std::string, RunResult> cache;
  for (const auto& el : def.atoms) {
    auto it = cache.find(el);
    if (it == cache.end()) {
      SystemDef ad = make_system_def(el, ScfModel::single_electron, def.pseudo, atom_grid);
      ScfConfig ac = cfg;
      ac.model = ad.model;
      it = cache.emplace(el, run_system(ad, ac, hgh, &ws)).first;
    }
    out.push_back(it->second);
  }
  return out;
}

struct Parabola {
  double a = 0.0, b = 0.0, c = 0.0;  // a d^2 + b d + c
  double minimum() const { return -b / (2.0 * a); }
};

// exact quadratic through three points, by expanding the Lagrange form
inline Parabola fit_parabola(const std::array<double, 3>& d, const std::array<double, 3>& e) {
  const double d0 = d[0], d1 = d[1], d2 = d[2];
  const double e0 = e[0], e1 = e[1], e2 = e[2];
  Parabola p;
  p.a = e0 / ((d0 - d1) * (d0 - d2)) + e1 / ((d1 - d0) * (d1 - d2)) +
        e2 / ((d2 - d0) * (d2 - d1));
  p.b = -(e0 * (d1 + d2) / ((d0 - d1) * (d0 - d2)) + e1 * (d0 + d2) / ((d1 - d0) * (d1 - d2)) +
          e2 * (d0 + d1) / ((d2 - d0) * (d2 - d1)));
  p.c = e0 * d1 * d2 / ((d0 - d1) * (d0 - d2)) + e1 * d0 * d2 / ((d1 - d0) * (d1 - d2)) +
        e2 * d0 * d1 / ((d2 - d0) * (d2 - d1));
  return p;
}

// Three-point bond scan: parabola fit, recomputation at the minimum, binding
// energy against the symmetrized-grid atoms.
inline BondScanResult bond_scan(SystemDef def, std::array<double, 3> d_values,
                                const ScfConfig& cfg,
                                const std::map<std::string, HghParams>& hgh) {
  std::sort(d_values.begin(), d_values.end());
  if (!(d_values[0] < d_values[1] && d_values[1] < d_values[2]))
    throw std::invalid_argument("bond_scan: need three distinct bond lengths");
  if (!def.molecular()) throw std::invalid_argument("bond_scan: system is not molecular");

  BondScanResult scan;
  scan.d = d_values;
  Workspace ws = Workspace::make(def.grid);
  const Field* warm = nullptr;
  for (int i = 0; i < 3; ++i) {
    def.bond_length = d_values[std::size_t(i)];
    scan.sample_runs.push_back(run_system(def, cfg, hgh, &ws, warm));
    scan.e[std::size_t(i)] = scan.sample_runs.back().energy();
    warm = &scan.sample_runs.back().state.orbitals.front();
  }
  if (!(scan.e[1] < scan.e[0] && scan.e[1] < scan.e[2]))
    throw std::invalid_argument(
        "bond_scan: middle energy is not the lowest; re-bracket the minimum");

  Parabola fit = fit_parabola(scan.d, scan.e);
  scan.alpha = fit.a;
  scan.beta = fit.b;
  scan.gamma = fit.c;
  if (!(fit.a > 0.0)) throw std::invalid_argument("bond_scan: no interior minimum (alpha <= 0)");
  scan.d_min = fit.minimum();
  if (scan.d_min <= d_values[0] || scan.d_min >= d_values[2])
    throw std::invalid_argument("bond_scan: fitted minimum escapes the bracket");

  def.bond_length = scan.d_min;
  scan.minimum_run = run_system(def, cfg, hgh, &ws, warm);
  scan.e_min = scan.minimum_run.energy();

  scan.atom_runs = atom_references(def, cfg, hgh);
  scan.e_atoms = 0.0;
  for (const auto& r : scan.atom_runs) scan.e_atoms += r.energy();
  scan.e_binding = scan.e_atoms - scan.e_min;
  return scan;
}

struct ExcitedState {
  std::string label;
  double energy = 0.0;
  double residual = 0.0;
  Field orbital;  // normalized coefficients
};

struct ExcitedResult {
  std::vector<ExcitedState> states;
  Eigen::MatrixXd overlaps;          // orbital-orbital quadrature overlaps
  double max_offdiagonal = 0.0;
  std::vector<double> p_quality;     // sqrt(1 - |P f|^2) per computed 2p state
  RunResult base;
};

// Lowest nev eigenstates of a one-electron system, labeled by overlap with
// the analytic hydrogenic orbitals sampled on the grid.
inline ExcitedResult excited_states(const SystemDef& def, int nev, const ScfConfig& cfg,
                                    const std::map<std::string, HghParams>& hgh) {
  if (def.model != ScfModel::single_electron)
    throw std::invalid_argument("excited_states: single-electron systems only");
  if (nev < 5) throw std::invalid_argument("excited_states: need nev >= 5 to resolve n = 2");

  Workspace ws = Workspace::make(def.grid);
  AssembledSystem as = assemble_system(ws, def, hgh);
  HamiltonianOp H(as.sys.plan, as.sys.lap, as.sys.v_nuc, as.sys.nonlocals);
  ScfConfig c = cfg;
  c.eig.nev = nev;
  c.eig.subspace_dim = std::max(cfg.eig.subspace_dim, 3 * nev + 6);
  auto t0 = std::chrono::steady_clock::now();
  auto pairs = arnoldi_smallest(H, c.eig);

  ExcitedResult res;
  const TransformPlan& plan = *ws.plan;
  std::vector<std::vector<double>> pts;  // normalized point values per state
  for (auto& p : pairs) {
    ExcitedState st;
    st.energy = p.value;
    st.residual = p.residual;
    st.orbital = Field(ws.grid, FieldKind::coefficients);
    st.orbital.v = std::move(p.vector);
    Field v(ws.grid, FieldKind::point_values);
    plan.apply_W(st.orbital.v.data(), v.v.data());
    double n2 = plan.inner_product_values(v.v, v.v);
    scal(1.0 / std::sqrt(n2), st.orbital.v);
    scal(1.0 / std::sqrt(n2), v.v);
    pts.push_back(v.v);
    res.states.push_back(std::move(st));
  }

  // analytic references sampled on the grid and quadrature-normalized
  std::vector<std::string> names = {"1s", "2s", "2px", "2py", "2pz"};
  std::vector<std::vector<double>> ref(names.size(),
                                       std::vector<double>(ws.grid->size(), 0.0));
  for (std::size_t q = 0; q < ws.grid->size(); ++q) {
    auto r = ws.grid->position_bohr(q);
    ref[0][q] = hydrogen_1s(r[0], r[1], r[2]);
    ref[1][q] = hydrogen_2s(r[0], r[1], r[2]);
    for (int ax = 0; ax < 3; ++ax) ref[2 + std::size_t(ax)][q] = hydrogen_2p(ax, r[0], r[1], r[2]);
  }
  for (auto& rv : ref) {
    double n2 = plan.inner_product_values(rv, rv);
    scal(1.0 / std::sqrt(n2), rv);
  }

  // greedy assignment: 1s and 2s may each be claimed once, the 2p span three
  // times (letters a, b, c in eigenvalue order); sign flips are irrelevant
  int p_letter = 0;
  bool used_1s = false, used_2s = false;
  for (std::size_t i = 0; i < res.states.size(); ++i) {
    std::array<double, 5> ov{};
    for (std::size_t j = 0; j < ref.size(); ++j)
      ov[j] = std::abs(plan.inner_product_values(pts[i], ref[j]));
    double p_best = std::max({ov[2], ov[3], ov[4]});
    double s1 = used_1s ? -1.0 : ov[0];
    double s2 = used_2s ? -1.0 : ov[1];
    if (p_letter < 3 && p_best >= s1 && p_best >= s2) {
      res.states[i].label = std::string("2p_") + char('a' + p_letter);
      ++p_letter;
      // projection quality onto the analytic 2p span
      double p2 = 0.0;
      for (std::size_t j = 2; j < 5; ++j) {
        double o = plan.inner_product_values(pts[i], ref[j]);
        p2 += o * o;
      }
      res.p_quality.push_back(std::sqrt(std::max(0.0, 1.0 - p2)));
    } else if (s1 >= s2) {
      res.states[i].label = "1s";
      used_1s = true;
    } else {
      res.states[i].label = "2s";
      used_2s = true;
    }
  }

  const std::size_t ns = res.states.size();
  res.overlaps = Eigen::MatrixXd::Zero(long(ns), long(ns));
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < ns; ++j) {
      double ov = plan.inner_product_values(pts[i], pts[j]);
      res.overlaps(long(i), long(j)) = ov;
      if (i != j) res.max_offdiagonal = std::max(res.max_offdiagonal, std::abs(ov));
    }

  res.base.def = def;
  res.base.grid_notation = def.grid.format();
  res.base.scale_a = def.grid.scale_a;
  res.base.g = def.grid.scale_a * dpow2(-def.grid.jmax());
  res.base.points = ws.grid->size();
  res.base.state.converged = true;
  for (const auto& s : res.states) res.base.state.eps.push_back(s.energy);
  if (!res.states.empty()) {
    res.base.state.orbitals.push_back(res.states.front().orbital);
    res.base.state.e_total = res.states.front().energy;
  }
  res.base.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

struct PoissonBench {
  SolveStats gmres, cgnr;
  double gmres_seconds = 0.0, cgnr_seconds = 0.0;
  double ratio = 0.0;  // cgnr/gmres wall time
  double agreement = 0.0;  // relative L2 difference of the solutions
};

// Times GMRES against CGNR on the Poisson problem of a Gaussian density.
inline PoissonBench bench_poisson(const GridSpec& grid, double sigma, double tol) {
  Workspace ws = Workspace::make(grid);
  Field rho(ws.grid, FieldKind::point_values);
  for (std::size_t i = 0; i < ws.grid->size(); ++i) {
    auto p = ws.grid->position_bohr(i);
    double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    rho[i] = std::exp(-0.5 * r2 / (sigma * sigma)) / std::pow(2 * M_PI * sigma * sigma, 1.5);
  }
  PoissonBench b;
  LinearSolveRequest req;
  req.tol = tol;
  req.method = LinearMethod::gmres;
  auto t0 = std::chrono::steady_clock::now();
  Field xg = hartree(*ws.plan, *ws.lap, rho, req, nullptr, &b.gmres);
  b.gmres_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  req.method = LinearMethod::cgnr;
  req.max_iter = 200000;
  t0 = std::chrono::steady_clock::now();
  Field xc = hartree(*ws.plan, *ws.lap, rho, req, nullptr, &b.cgnr);
  b.cgnr_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  b.ratio = b.cgnr_seconds / b.gmres_seconds;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xg.size(); ++i) {
    num += (xg[i] - xc[i]) * (xg[i] - xc[i]);
    den += xg[i] * xg[i];
  }
  b.agreement = std::sqrt(num / den);
  return b;
}

}  // namespace itw
