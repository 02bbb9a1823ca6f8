// itw: electronic-structure runs in the interpolating tensor-product wavelet
// basis.  Subcommands: run, scan, excited, bench-poisson, dump-filters.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "itw/app.hpp"

namespace fs = std::filesystem;
using namespace itw;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string grid_notation;
  int basis = 0;
  std::string pseudo;
  std::string model;
  double tol = 0.0;
  long seed = -1;
  double a = 0.0;
  double d = 0.0;
  std::string out_dir = "out";
  std::string hgh_file;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_config = true) {
  if (with_config) cmd->add_option("config", args.config_path, "configuration file");
  cmd->add_option("--grid", args.grid_notation, "grid notation, e.g. \"1/2 Z20^3 u 1/4 Z10^3\"");
  cmd->add_option("--basis", args.basis, "table grid index 1..14");
  cmd->add_option("--pseudo", args.pseudo, "bare|cut|interp|hgh");
  cmd->add_option("--model", args.model, "single|hf|lda");
  cmd->add_option("--tol", args.tol, "SCF energy tolerance (Ha)");
  cmd->add_option("--seed", args.seed, "eigensolver start-vector seed");
  cmd->add_option("--a", args.a, "Bohr per grid unit");
  cmd->add_option("--d", args.d, "bond length (Bohr)");
  cmd->add_option("--out-dir", args.out_dir, "output directory");
  cmd->add_option("--hgh-file", args.hgh_file, "HGH parameter file");
}

Config merged_config(const CommonArgs& args) {
  Config cfg;
  if (!args.config_path.empty()) cfg = Config::load(args.config_path);
  if (!args.grid_notation.empty()) cfg.set("grid.notation", args.grid_notation);
  if (args.basis > 0) cfg.set("grid.basis", std::to_string(args.basis));
  if (!args.pseudo.empty()) cfg.set("system.pseudo", args.pseudo);
  if (!args.model.empty()) cfg.set("system.model", args.model);
  if (args.tol > 0.0) cfg.set("scf.tol", std::to_string(args.tol));
  if (args.seed >= 0) cfg.set("solver.seed", std::to_string(args.seed));
  if (args.a > 0.0) cfg.set("grid.a", std::to_string(args.a));
  if (args.d > 0.0) cfg.set("system.d", std::to_string(args.d));
  if (!args.hgh_file.empty()) cfg.set("system.hgh_file", args.hgh_file);
  cfg.set("output.dir", args.out_dir);
  return cfg;
}

void emit_common(const Config& cfg, const std::vector<RunResult>& runs) {
  fs::path dir = cfg.get("output.dir", "out");
  fs::create_directories(dir);
  std::ostringstream sum;
  write_summary_csv(runs, sum);
  write_file(dir / "summary.csv", sum.str());
  std::ostringstream man;
  write_manifest(cfg, runs, man);
  write_file(dir / "manifest.txt", man.str());
  if (!runs.empty() && !runs.back().state.history.empty()) {
    std::ostringstream tr;
    write_scf_trace_csv(runs.back().state, tr);
    write_file(dir / "scf_trace.csv", tr.str());
  }
}

void maybe_emit_radial(const Config& cfg, const Workspace& ws, const RunResult& run) {
  if (cfg.get_int("output.radial", 0) == 0) return;
  if (run.state.orbitals.empty()) return;
  fs::path dir = cfg.get("output.dir", "out");
  PointEvaluator ev(ws.grid, ws.fam, run.state.orbitals.front());
  std::vector<double> radii;
  double rmax = cfg.get_double("output.radial_rmax", 8.0);
  int nr = cfg.get_int("output.radial_n", 80);
  for (int i = 0; i <= nr; ++i) radii.push_back(rmax * i / nr);
  auto rows = radial_average(ev, {0, 0, 0}, radii);
  std::ostringstream os;
  write_radial_csv(rows, os);
  write_file(dir / "radial.csv", os.str());
}

int cmd_run(const CommonArgs& args) {
  Config cfg = merged_config(args);
  SystemDef def = system_from_config(cfg);
  ScfConfig scf = scf_config_from(cfg, def.model);
  auto hgh = hgh_from_config(cfg);
  Workspace ws = Workspace::make(def.grid);
  RunResult r = run_system(def, scf, hgh, &ws);
  std::cout.precision(10);
  std::cout << def.name << " (" << scf_model_name(def.model) << ", "
            << pseudo_kind_name(def.pseudo) << ", grid " << r.grid_notation << ", "
            << r.points << " points)\n";
  std::cout << "  E_total = " << r.energy() << " Ha";
  if (!r.state.eps.empty()) std::cout << "  eps_1 = " << r.state.eps[0] << " Ha";
  std::cout << "  (" << r.state.history.size() << " iterations, " << r.seconds << " s)\n";
  if (r.nonlocal_truncated)
    std::cout << "  warning: nonlocal projector support truncated at the fine box\n";
  emit_common(cfg, {r});
  maybe_emit_radial(cfg, ws, r);
  return 0;
}

int cmd_scan(const CommonArgs& args) {
  Config cfg = merged_config(args);
  SystemDef def = system_from_config(cfg);
  ScfConfig scf = scf_config_from(cfg, def.model);
  auto hgh = hgh_from_config(cfg);
  auto dv = cfg.get_doubles("scan.d_values");
  if (dv.size() != 3) throw std::invalid_argument("scan.d_values must list three bond lengths");
  BondScanResult scan = bond_scan(def, {dv[0], dv[1], dv[2]}, scf, hgh);
  std::cout.precision(10);
  std::cout << def.name << " bond scan (" << scf_model_name(def.model) << ", "
            << pseudo_kind_name(def.pseudo) << ")\n";
  for (int i = 0; i < 3; ++i)
    std::cout << "  d = " << scan.d[std::size_t(i)] << "  E = " << scan.e[std::size_t(i)] << '\n';
  std::cout << "  minimum: d = " << scan.d_min << " B,  E_system = " << scan.e_min
            << " Ha,  E_binding = " << scan.e_binding << " Ha\n";

  std::vector<RunResult> all = scan.sample_runs;
  all.push_back(scan.minimum_run);
  for (const auto& a : scan.atom_runs) all.push_back(a);
  emit_common(cfg, all);
  fs::path dir = cfg.get("output.dir", "out");
  std::ostringstream os;
  write_scan_csv(scan, os);
  write_file(dir / "scan.csv", os.str());
  return 0;
}

int cmd_excited(const CommonArgs& args) {
  Config cfg = merged_config(args);
  SystemDef def = system_from_config(cfg);
  ScfConfig scf = scf_config_from(cfg, def.model);
  auto hgh = hgh_from_config(cfg);
  int nev = cfg.get_int("solver.nev", 6);
  if (nev < 5) nev = 5;
  ExcitedResult res = excited_states(def, nev, scf, hgh);
  std::cout.precision(8);
  std::cout << def.name << " excited states (grid " << def.grid.format() << ")\n";
  for (const auto& s : res.states)
    std::cout << "  " << s.label << "  E = " << s.energy << " Ha  (residual " << s.residual
              << ")\n";
  std::cout << "  max |<i|j>| off-diagonal = " << res.max_offdiagonal << '\n';
  for (std::size_t i = 0; i < res.p_quality.size(); ++i)
    std::cout << "  2p span quality sqrt(1-|Pf|^2) [" << i << "] = " << res.p_quality[i] << '\n';
  emit_common(cfg, {res.base});
  return 0;
}

int cmd_bench(const CommonArgs& args) {
  Config cfg = merged_config(args);
  GridSpec grid = grid_from_config(cfg);
  double sigma = cfg.get_double("bench.sigma", 0.5);
  double tol = cfg.get_double("solver.poisson_tol", 1e-8);
  PoissonBench b = bench_poisson(grid, sigma, tol);
  std::cout.precision(6);
  std::cout << "poisson benchmark on " << grid.format() << "\n";
  std::cout << "  gmres: " << b.gmres.iterations << " iterations, " << b.gmres_seconds << " s\n";
  std::cout << "  cgnr:  " << b.cgnr.iterations << " iterations, " << b.cgnr_seconds << " s\n";
  std::cout << "  cgnr/gmres time ratio = " << b.ratio << "\n";
  std::cout << "  solution agreement (rel L2) = " << b.agreement << "\n";
  fs::path dir = cfg.get("output.dir", "out");
  fs::create_directories(dir);
  std::ostringstream g, c;
  write_iteration_log_csv(b.gmres, g);
  write_iteration_log_csv(b.cgnr, c);
  write_file(dir / "poisson_gmres.csv", g.str());
  write_file(dir / "poisson_cgnr.csv", c.str());
  return 0;
}

int cmd_dump_filters(int order, int jspan, const std::string& out) {
  DdFamily fam(order);
  FilterTable ft(fam, jspan);
  if (out.empty() || out == "-") {
    ft.dump_csv(std::cout);
  } else {
    std::ostringstream os;
    ft.dump_csv(os);
    write_file(out, os.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"electronic structure in an interpolating tensor-product wavelet basis"};
  app.require_subcommand(1);

  CommonArgs run_args, scan_args, exc_args, bench_args;
  auto* run = app.add_subcommand("run", "single-point energy of a system");
  add_common(run, run_args);
  auto* scan = app.add_subcommand("scan", "three-point bond scan with parabola fit");
  add_common(scan, scan_args);
  auto* exc = app.add_subcommand("excited", "lowest eigenstates with hydrogenic labels");
  add_common(exc, exc_args);
  auto* bench = app.add_subcommand("bench-poisson", "GMRES vs CGNR timing on a Poisson solve");
  add_common(bench, bench_args);

  int dump_order = 8, dump_jspan = 2;
  std::string dump_out;
  auto* dump = app.add_subcommand("dump-filters", "CSV dump of the a/s filter tables");
  dump->add_option("--order", dump_order, "wavelet order (2,4,6,8)");
  dump->add_option("--jspan", dump_jspan, "level-difference span");
  dump->add_option("--out", dump_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (scan->parsed()) return cmd_scan(scan_args);
    if (exc->parsed()) return cmd_excited(exc_args);
    if (bench->parsed()) return cmd_bench(bench_args);
    if (dump->parsed()) return cmd_dump_filters(dump_order, dump_jspan, dump_out);
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
