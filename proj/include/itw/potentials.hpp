#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "itw/field.hpp"

namespace itw {

// Interpolated pseudopotential cutoff: polynomial of odd degree D through the
// 2n nodes +-c, +-2c, ..., +-nc of -1/r, n = (D+1)/2.
struct PseudoCutoff {
  double c = 0.25;  // Bohr
  int D = 7;

  int n() const { return (D + 1) / 2; }
  void validate() const {
    if (!(c > 0.0)) throw std::invalid_argument("PseudoCutoff: c must be positive");
    if (D < 1 || D % 2 == 0) throw std::invalid_argument("PseudoCutoff: D must be odd");
  }
};

// V_interp(r): -1/r outside the cutoff, the symmetric-node interpolating
// polynomial inside.  The mirrored nodes -nc..-c carry the even extension of
// -1/r, so P is an even polynomial and smooth through the origin (for D = 1
// this reduces to the -1/c plateau).  Evaluated with barycentric weights.
inline double v_interp(const PseudoCutoff& cut, double r) {
  cut.validate();
  if (r >= cut.c) return -1.0 / r;
  const int n = cut.n();
  const int N = 2 * n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < N; ++i) {
    int q = i - n + (i >= n ? 1 : 0);  // -n..-1, 1..n
    double s = q * cut.c;
    double value = -1.0 / std::abs(s);
    if (r == s) return value;
    // barycentric weight w_i = 1 / prod_{j != i} (s_i - s_j)
    double w = 1.0;
    for (int j = 0; j < N; ++j) {
      if (j == i) continue;
      int qj = j - n + (j >= n ? 1 : 0);
      w /= (q - qj) * cut.c;
    }
    double t = w / (r - s);
    num += t * value;
    den += t;
  }
  return num / den;
}

// V_cut(r): -1/r clipped at -1/c inside the cutoff.
inline double v_cut(double c, double r) {
  if (!(c > 0.0)) throw std::invalid_argument("v_cut: c must be positive");
  return (r >= c) ? -1.0 / r : -1.0 / c;
}

// Hartwigsen-Goedecker-Hutter parameter set for one element.
struct HghChannel {
  int l = 0;
  double r_l = 0.0;
  // symmetric coupling matrix, up to 3 projectors
  std::array<std::array<double, 3>, 3> h{};

  int nproj() const {
    int n = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (h[std::size_t(i)][std::size_t(j)] != 0.0) n = std::max({n, i + 1, j + 1});
    return n;
  }
};

struct HghParams {
  std::string element;
  double z_ion = 0.0;
  double r_loc = 0.0;
  std::array<double, 4> C{};  // C1..C4
  std::vector<HghChannel> channels;

  void validate() const {
    if (!(z_ion > 0.0)) throw ParseError("HghParams: Z_ion must be positive", 0);
    if (!(r_loc > 0.0)) throw ParseError("HghParams: r_loc must be positive", 0);
    for (const auto& ch : channels) {
      if (ch.l < 0) throw ParseError("HghParams: negative channel l", 0);
      if (!(ch.r_l > 0.0)) throw ParseError("HghParams: r_l must be positive", 0);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < i; ++j)
          if (ch.h[std::size_t(i)][std::size_t(j)] != ch.h[std::size_t(j)][std::size_t(i)])
            throw ParseError("HghParams: coupling matrix must be symmetric", 0);
    }
  }
};

// Local HGH pseudopotential; finite at the origin.
inline double hgh_local(const HghParams& p, double r) {
  double u = r / p.r_loc;
  double gauss = std::exp(-0.5 * u * u);
  double poly = p.C[0] + p.C[1] * u * u + p.C[2] * u * u * u * u + p.C[3] * u * u * u * u * u * u;
  double coul;
  if (r < 1e-12) {
    coul = -p.z_ion / p.r_loc * std::sqrt(2.0 / M_PI);
  } else {
    coul = -p.z_ion / r * std::erf(r / (std::sqrt(2.0) * p.r_loc));
  }
  return coul + gauss * poly;
}

enum class PseudoKind { bare, cut, interp, hgh };

inline PseudoKind parse_pseudo_kind(const std::string& s) {
  if (s == "bare" || s == "none") return PseudoKind::bare;
  if (s == "cut" || s == "const" || s == "const.") return PseudoKind::cut;
  if (s == "interp" || s == "interp.") return PseudoKind::interp;
  if (s == "hgh" || s == "HGH") return PseudoKind::hgh;
  throw std::invalid_argument("unknown pseudopotential kind: " + s);
}

inline std::string pseudo_kind_name(PseudoKind k) {
  switch (k) {
    case PseudoKind::bare: return "bare";
    case PseudoKind::cut: return "cut";
    case PseudoKind::interp: return "interp";
    case PseudoKind::hgh: return "hgh";
  }
  return "?";
}

struct Nucleus {
  double Z = 1.0;                  // effective charge (Z_ion for HGH)
  std::array<double, 3> R{};      // Bohr
  PseudoKind kind = PseudoKind::interp;
  std::shared_ptr<const HghParams> hgh;

  void validate() const {
    if (!(Z > 0.0)) throw std::invalid_argument("Nucleus: Z must be positive");
    if (kind == PseudoKind::hgh && !hgh)
      throw std::invalid_argument("Nucleus: HGH nucleus without parameters");
  }
};

// Point values of the total nuclear potential over the grid, ready for a
// multiplication operator.
inline std::vector<double> nuclear_potential_values(const std::vector<Nucleus>& nuclei,
                                                    const MultiGrid& grid,
                                                    const PseudoCutoff& cut) {
  for (const auto& nu : nuclei) nu.validate();
  std::vector<double> d(grid.size(), 0.0);
  const double ccut = cut.c * 0.5;  // V_cut uses the halved cutoff 2^-jmax-1
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto r = grid.position_bohr(i);
    double val = 0.0;
    for (const auto& nu : nuclei) {
      double dx = r[0] - nu.R[0], dy = r[1] - nu.R[1], dz = r[2] - nu.R[2];
      double rr = std::sqrt(dx * dx + dy * dy + dz * dz);
      switch (nu.kind) {
        case PseudoKind::bare:
          if (rr < 1e-12)
            throw std::invalid_argument(
                "nuclear_potential_values: bare Coulomb at a grid point coinciding with a "
                "nucleus; use a pseudopotential");
          val += -nu.Z / rr;
          break;
        case PseudoKind::cut:
          val += nu.Z * v_cut(ccut, rr);
          break;
        case PseudoKind::interp:
          val += nu.Z * v_interp(cut, rr);
          break;
        case PseudoKind::hgh:
          val += hgh_local(*nu.hgh, rr);
          break;
      }
    }
    if (!std::isfinite(val))
      throw std::invalid_argument("nuclear_potential_values: non-finite potential at grid point " +
                                  std::to_string(i));
    d[i] = val;
  }
  return d;
}

inline double repulsion_energy(const std::vector<Nucleus>& nuclei) {
  double e = 0.0;
  for (std::size_t i = 0; i < nuclei.size(); ++i)
    for (std::size_t j = i + 1; j < nuclei.size(); ++j) {
      double dx = nuclei[i].R[0] - nuclei[j].R[0];
      double dy = nuclei[i].R[1] - nuclei[j].R[1];
      double dz = nuclei[i].R[2] - nuclei[j].R[2];
      double r = std::sqrt(dx * dx + dy * dy + dz * dz);
      if (r < 1e-12) throw std::invalid_argument("repulsion_energy: coincident nuclei");
      e += nuclei[i].Z * nuclei[j].Z / r;
    }
  return e;
}

// ---- parameter file ----
//
// One element block per element:
//   element Z_ion r_loc C1 C2 C3 C4
//   channel l r_l h11 h12 h13 h22 h23 h33
// '#' starts a comment.

inline std::map<std::string, HghParams> load_hgh_parameters(std::istream& in) {
  std::map<std::string, HghParams> out;
  HghParams cur;
  bool have = false;
  std::string line;
  std::size_t lineno = 0;
  auto flush = [&]() {
    if (!have) return;
    cur.validate();
    out[cur.element] = cur;
    cur = HghParams{};
    have = false;
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "channel") {
      if (!have) throw ParseError("channel line before any element", lineno);
      HghChannel ch;
      double h11, h12, h13, h22, h23, h33;
      if (!(ls >> ch.l >> ch.r_l >> h11 >> h12 >> h13 >> h22 >> h23 >> h33))
        throw ParseError("malformed channel line", lineno);
      ch.h = {{{h11, h12, h13}, {h12, h22, h23}, {h13, h23, h33}}};
      cur.channels.push_back(ch);
    } else {
      flush();
      cur.element = first;
      if (!(ls >> cur.z_ion >> cur.r_loc >> cur.C[0] >> cur.C[1] >> cur.C[2] >> cur.C[3]))
        throw ParseError("malformed element line", lineno);
      have = true;
    }
  }
  flush();
  return out;
}

inline std::map<std::string, HghParams> load_hgh_parameters(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open HGH parameter file: " + path);
  return load_hgh_parameters(f);
}

inline void save_hgh_parameters(const std::map<std::string, HghParams>& m, std::ostream& os) {
  os.precision(12);
  for (const auto& [el, p] : m) {
    os << el << ' ' << p.z_ion << ' ' << p.r_loc;
    for (double c : p.C) os << ' ' << c;
    os << '\n';
    for (const auto& ch : p.channels) {
      os << "channel " << ch.l << ' ' << ch.r_l;
      os << ' ' << ch.h[0][0] << ' ' << ch.h[0][1] << ' ' << ch.h[0][2];
      os << ' ' << ch.h[1][1] << ' ' << ch.h[1][2] << ' ' << ch.h[2][2];
      os << '\n';
    }
  }
}

}  // namespace itw
