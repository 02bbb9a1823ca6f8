#pragma once

#include "itw/scf.hpp"

namespace itw {

// The fourteen computation grids of the energy tables, by index.
inline const char* table_grid_notation(int index) {
  switch (index) {
    case 1: return "1/2 Z20^3";
    case 2: return "1/2 Z20^3 u 1/4 Z10^3";
    case 3: return "1/2 Z20^3 u 1/4 Z10^3 u 1/8 Z4xZ4xZ10";
    case 4: return "1/4 Z60^3";
    case 5: return "1/2 Z30^3 u 1/4 Z15^3";
    case 6: return "Z38^3 u 1/2 Z19^3";
    case 7: return "1/4 Z40^3";
    case 8: return "Z10^3 u 1/2 Z10^3";
    case 9: return "1/2 Z20^3 u 1/4 Z20^3";
    case 10: return "1/4 Z40^3 u 1/8 Z40^3";
    case 11: return "Z10^3 u 1/2 Z5^3";
    case 12: return "1/2 Z20^3 u 1/4 Z10^3 u 1/8 Z4xZ4xZ15";
    case 13: return "1/4 Z40^3 u 1/8 Z20^3";
    case 14: return "1/4 Z60^3 u 1/8 Z30^3";
    default: throw std::invalid_argument("grid index must be 1..14");
  }
}

struct SystemDef {
  std::string name;
  ScfModel model = ScfModel::single_electron;
  PseudoKind pseudo = PseudoKind::hgh;
  GridSpec grid;
  int n_electrons = 1;
  double bond_length = 0.0;            // Bohr; 0 for atoms
  std::vector<std::string> elements;   // one entry per nucleus
  std::vector<double> charges;         // bare nuclear charge per nucleus
  std::vector<std::string> atoms;      // atomic references for binding energies

  bool molecular() const { return elements.size() > 1; }

  void validate() const {
    grid.validate();
    if (elements.empty()) throw std::invalid_argument("SystemDef: no nuclei");
    if (elements.size() != charges.size())
      throw std::invalid_argument("SystemDef: element/charge count mismatch");
    int expected = (model == ScfModel::single_electron) ? 1 : 2;
    if (n_electrons != expected)
      throw std::invalid_argument("SystemDef: electron count inconsistent with the model");
    if (molecular() && !(bond_length > 0.0))
      throw std::invalid_argument("SystemDef: molecular system needs a bond length");
  }
};

// Registry of the studied systems.  `model` is ignored for the one-electron
// systems, which are always solved directly.
inline SystemDef make_system_def(const std::string& name, ScfModel model, PseudoKind pseudo,
                                 GridSpec grid, double bond_length = 0.0) {
  SystemDef d;
  d.name = name;
  d.pseudo = pseudo;
  d.grid = std::move(grid);
  d.bond_length = bond_length;
  if (name == "H") {
    d.model = ScfModel::single_electron;
    d.n_electrons = 1;
    d.elements = {"H"};
    d.charges = {1.0};
  } else if (name == "Li") {
    // valence electron only; meaningful with the frozen-core HGH set
    d.model = ScfModel::single_electron;
    d.n_electrons = 1;
    d.elements = {"Li"};
    d.charges = {3.0};
  } else if (name == "He") {
    d.model = model;
    d.n_electrons = 2;
    d.elements = {"He"};
    d.charges = {2.0};
  } else if (name == "H2+") {
    d.model = ScfModel::single_electron;
    d.n_electrons = 1;
    d.elements = {"H", "H"};
    d.charges = {1.0, 1.0};
    d.atoms = {"H"};
  } else if (name == "H2") {
    d.model = model;
    d.n_electrons = 2;
    d.elements = {"H", "H"};
    d.charges = {1.0, 1.0};
    d.atoms = {"H", "H"};
  } else if (name == "LiH") {
    d.model = model;
    d.n_electrons = 2;
    d.elements = {"Li", "H"};
    d.charges = {3.0, 1.0};
    d.atoms = {"Li", "H"};
  } else {
    throw std::invalid_argument("unknown system: " + name);
  }
  if (d.model == ScfModel::single_electron &&
      (model != ScfModel::single_electron && (name == "H" || name == "Li" || name == "H2+")))
    throw std::invalid_argument("system " + name + " is a one-electron problem");
  d.validate();
  return d;
}

// Shared per-grid machinery.
struct Workspace {
  std::shared_ptr<const MultiGrid> grid;
  std::shared_ptr<DdFamily> fam;
  std::shared_ptr<FilterTable> ft;
  std::shared_ptr<const TransformPlan> plan;
  std::shared_ptr<const LaplacianOp> lap;

  static Workspace make(const GridSpec& spec, int order = 8) {
    Workspace w;
    w.grid = build_grid(spec);
    w.fam = std::make_shared<DdFamily>(order);
    int span = std::max(1, w.grid->jmax() - w.grid->jmin());
    w.ft = std::make_shared<FilterTable>(*w.fam, span);
    w.plan = std::make_shared<TransformPlan>(w.grid, w.fam);
    w.lap = std::make_shared<LaplacianOp>(w.grid, w.ft);
    return w;
  }
};

// Nuclei at (0, 0, +-d/2) Bohr for diatomics, at the origin for atoms.
// HGH nuclei carry the valence charge Z_ion for the ion-ion repulsion.
inline std::vector<Nucleus> place_nuclei(const SystemDef& def,
                                         const std::map<std::string, HghParams>& hgh) {
  std::vector<Nucleus> out;
  for (std::size_t i = 0; i < def.elements.size(); ++i) {
    Nucleus nu;
    nu.kind = def.pseudo;
    if (def.pseudo == PseudoKind::hgh) {
      auto it = hgh.find(def.elements[i]);
      if (it == hgh.end())
        throw std::invalid_argument("missing HGH parameters for element " + def.elements[i]);
      nu.hgh = std::make_shared<HghParams>(it->second);
      nu.Z = nu.hgh->z_ion;
    } else {
      nu.Z = def.charges[i];
    }
    if (def.molecular()) {
      double sign = (i == 0) ? 0.5 : -0.5;
      nu.R = {0.0, 0.0, sign * def.bond_length};
    } else {
      nu.R = {0.0, 0.0, 0.0};
    }
    out.push_back(std::move(nu));
  }
  return out;
}

struct AssembledSystem {
  ElectronicSystem sys;
  std::vector<Nucleus> nuclei;
  PseudoCutoff cutoff;
  bool nonlocal_truncated = false;
};

inline AssembledSystem assemble_system(const Workspace& ws, const SystemDef& def,
                                       const std::map<std::string, HghParams>& hgh) {
  AssembledSystem a;
  a.nuclei = place_nuclei(def, hgh);
  a.cutoff = PseudoCutoff{ws.grid->scale_a() * dpow2(-ws.grid->jmax()), 7};
  a.sys.plan = ws.plan;
  a.sys.lap = ws.lap;
  a.sys.v_nuc = nuclear_potential_values(a.nuclei, *ws.grid, a.cutoff);
  for (const auto& nu : a.nuclei)
    if (nu.kind == PseudoKind::hgh) {
      auto nl = std::make_shared<HghNonlocalOp>(ws.plan, nu.R, nu.hgh);
      if (nl->truncated()) a.nonlocal_truncated = true;
      if (!nl->empty()) a.sys.nonlocals.push_back(nl);
    }
  a.sys.e_repulsion = (a.nuclei.size() > 1) ? repulsion_energy(a.nuclei) : 0.0;
  return a;
}

}  // namespace itw
