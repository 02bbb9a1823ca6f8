#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include "itw/config.hpp"
#include "itw/radial.hpp"
#include "itw/systems.hpp"

namespace itw {

inline constexpr const char* kVersion = "1.0.0";

// RFC-4180-style field quoting
inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

struct RunResult {
  SystemDef def;
  std::string grid_notation;
  double scale_a = 1.0;
  double g = 0.0;  // finest grid spacing in Bohr
  std::size_t points = 0;
  ScfState state;
  double seconds = 0.0;
  bool nonlocal_truncated = false;

  double energy() const { return state.e_total; }
};

struct BondScanResult {
  std::array<double, 3> d{};
  std::array<double, 3> e{};
  double alpha = 0.0, beta = 0.0, gamma = 0.0;  // E(d) = alpha d^2 + beta d + gamma
  double d_min = 0.0;
  double e_min = 0.0;      // recomputed at d_min
  double e_atoms = 0.0;
  double e_binding = 0.0;  // e_atoms - e_min
  RunResult minimum_run;
  std::vector<RunResult> sample_runs;
  std::vector<RunResult> atom_runs;
};

inline void write_summary_csv(const std::vector<RunResult>& rows, std::ostream& os) {
  os << "source,system,basis,a,g,pseudopot,model,points,E,eps1,scf_iters,converged,seconds\n";
  os << std::setprecision(10);
  for (const auto& r : rows) {
    os << "itw," << csv_escape(r.def.name) << ',' << csv_escape(r.grid_notation) << ','
       << r.scale_a << ',' << r.g << ',' << pseudo_kind_name(r.def.pseudo) << ','
       << scf_model_name(r.def.model) << ',' << r.points << ',' << r.energy() << ','
       << (r.state.eps.empty() ? 0.0 : r.state.eps[0]) << ',' << r.state.history.size() << ','
       << (r.state.converged ? 1 : 0) << ',' << r.seconds << '\n';
  }
}

inline void write_scf_trace_csv(const ScfState& st, std::ostream& os) {
  os << "iter,eps_1,E_total,poisson_iters,arnoldi_restarts\n";
  os << std::setprecision(12);
  for (const auto& r : st.history)
    os << r.iter << ',' << r.eps1 << ',' << r.e_total << ',' << r.poisson_iters << ','
       << r.arnoldi_restarts << '\n';
}

inline void write_scan_csv(const BondScanResult& scan, std::ostream& os) {
  os << "d,E\n";
  os << std::setprecision(12);
  for (int i = 0; i < 3; ++i) os << scan.d[std::size_t(i)] << ',' << scan.e[std::size_t(i)] << '\n';
  os << scan.d_min << ',' << scan.e_min << '\n';
}

inline void write_radial_csv(const std::vector<RadialSample>& rows, std::ostream& os) {
  os << "r,fbar,gbar,truncated\n";
  os << std::setprecision(10);
  for (const auto& s : rows)
    os << s.r << ',' << s.fbar << ',' << s.gbar << ',' << (s.truncated ? 1 : 0) << '\n';
}

inline void write_iteration_log_csv(const SolveStats& st, std::ostream& os) {
  os << "iter,residual\n";
  os << std::setprecision(10);
  for (std::size_t i = 0; i < st.residuals.size(); ++i)
    os << (i + 1) << ',' << st.residuals[i] << '\n';
}

inline void write_manifest(const Config& cfg, const std::vector<RunResult>& runs,
                           std::ostream& os) {
  os << "itw " << kVersion << "\n";
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  os << "finished " << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ") << "\n\n";
  os << "# configuration\n" << cfg.echo() << "\n# runs\n";
  os << std::setprecision(12);
  for (const auto& r : runs) {
    os << r.def.name << " grid=\"" << r.grid_notation << "\" points=" << r.points
       << " E=" << r.energy() << " seconds=" << r.seconds;
    if (r.nonlocal_truncated) os << " warning=nonlocal-projector-truncated";
    os << '\n';
  }
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write output file: " + p.string());
  f << content;
}

}  // namespace itw
