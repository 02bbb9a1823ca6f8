#pragma once

#include <memory>
#include <vector>

#include "itw/dd_basis.hpp"
#include "itw/field.hpp"

namespace itw {

struct Box3 {
  std::array<int, 3> lo{}, hi{};
  std::array<int, 3> extent() const {
    return {hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1};
  }
  std::size_t size() const {
    auto e = extent();
    return std::size_t(e[0]) * std::size_t(e[1]) * std::size_t(e[2]);
  }
  bool contains(std::array<int, 3> k) const {
    return k[0] >= lo[0] && k[0] <= hi[0] && k[1] >= lo[1] && k[1] <= hi[1] &&
           k[2] >= lo[2] && k[2] <= hi[2];
  }
  std::size_t index(std::array<int, 3> k) const {
    auto e = extent();
    return (std::size_t(k[0] - lo[0]) * std::size_t(e[1]) + std::size_t(k[1] - lo[1])) *
               std::size_t(e[2]) +
           std::size_t(k[2] - lo[2]);
  }
  Box3 padded(int p) const {
    return Box3{{lo[0] - p, lo[1] - p, lo[2] - p}, {hi[0] + p, hi[1] + p, hi[2] + p}};
  }
  static Box3 hull(const Box3& a, const Box3& b) {
    Box3 r;
    for (int d = 0; d < 3; ++d) {
      r.lo[d] = std::min(a.lo[d], b.lo[d]);
      r.hi[d] = std::max(a.hi[d], b.hi[d]);
    }
    return r;
  }
};

// Dense values on a box of one level's index lattice.
struct Mesh3 {
  explicit Mesh3(const Box3& box) : b(box), a(box.size(), 0.0) {}
  Box3 b;
  std::vector<double> a;
  double& at(std::array<int, 3> k) { return a[b.index(k)]; }
  double at(std::array<int, 3> k) const { return a[b.index(k)]; }
};

// Forward (U) and backward (W) transforms between point values and expansion
// coefficients, realized as per-level interpolating prediction sweeps over
// padded mesh boxes.  Also carries the quadrature weights of the basis.
class TransformPlan {
 public:
  TransformPlan(std::shared_ptr<const MultiGrid> grid, std::shared_ptr<const DdFamily> fam)
      : grid_(std::move(grid)), fam_(std::move(fam)) {
    const int m = fam_->half_width();
    const int jmin = grid_->jmin(), jmax = grid_->jmax();
    levels_.resize(std::size_t(jmax - jmin + 1));
    // tight regions: need(j) covers this level's box and what finer levels pull back
    for (int j = jmax; j >= jmin; --j) {
      LevelInfo& li = level(j);
      li.j = j;
      const LevelBox* lb = grid_->level_box(j);
      Box3 need{};
      bool have = false;
      if (lb) {
        need = Box3{lb->lo, lb->hi};
        li.kbox = need;
        li.has_points = true;
        have = true;
      }
      if (j < jmax) {
        const Box3& fn = level(j + 1).need;
        Box3 pull;
        for (int d = 0; d < 3; ++d) {
          pull.lo[d] = floor_div2(fn.lo[d] - m);
          pull.hi[d] = ceil_div2(fn.hi[d] + m);
        }
        need = have ? Box3::hull(need, pull) : pull;
      }
      li.need = need;
      li.region = need.padded(m);
    }
    for (const auto& pc : grid_->classes()) level(pc.j).classes.push_back(&pc);
    weights_.reserve(grid_->classes().size());
    for (const auto& pc : grid_->classes()) weights_.push_back(grid_->class_weight(pc));
  }

  const MultiGrid& grid() const { return *grid_; }
  std::shared_ptr<const MultiGrid> grid_ptr() const { return grid_; }
  const DdFamily& family() const { return *fam_; }

  // ---- spec-level API on Fields ----
  Field backward(const Field& c) const {
    require_kind(c, FieldKind::coefficients, "backward");
    check_grid(c);
    Field v(grid_, FieldKind::point_values);
    apply_W(c.v.data(), v.v.data());
    return v;
  }
  Field forward(const Field& v) const {
    require_kind(v, FieldKind::point_values, "forward");
    check_grid(v);
    Field c(grid_, FieldKind::coefficients);
    apply_U(v.v.data(), c.v.data());
    return c;
  }

  // ---- raw kernels (out must be zero-initialized, distinct from in) ----

  // v = W c
  void apply_W(const double* c, double* v) const {
    const int jmin = grid_->jmin(), jmax = grid_->jmax();
    Mesh3 A(level(jmin).region);
    scatter_add_level(c, jmin, A);
    read_level(A, jmin, v);
    for (int j = jmin + 1; j <= jmax; ++j) {
      Mesh3 B(level(j).region);
      embed_even(A, B);
      scatter_add_level(c, j, B);
      for (int ax = 0; ax < 3; ++ax) predict_pass(B, ax, +1.0);
      read_level(B, j, v);
      A = std::move(B);
    }
  }

  // cbar += W^T vbar
  void apply_Wt(const double* vbar, double* cbar) const {
    const int jmin = grid_->jmin(), jmax = grid_->jmax();
    Mesh3 X(level(jmax).region);
    read_levelT(vbar, jmax, X);
    for (int j = jmax; j > jmin; --j) {
      for (int ax = 2; ax >= 0; --ax) predictT_pass(X, ax, +1.0);
      scatterT_level(X, j, cbar);
      Mesh3 A(level(j - 1).region);
      embedT(X, A);
      read_levelT(vbar, j - 1, A);
      X = std::move(A);
    }
    scatterT_level(X, jmin, cbar);
  }

  // c = U v
  void apply_U(const double* v, double* c) const {
    const int jmin = grid_->jmin(), jmax = grid_->jmax();
    copy_level(v, jmin, c);
    if (jmin == jmax) return;
    Mesh3 X(level(jmin).region);
    scatter_add_level(c, jmin, X);
    for (int j = jmin + 1; j <= jmax; ++j) {
      Mesh3 Y(level(j).region);
      embed_even(X, Y);
      for (int ax = 0; ax < 3; ++ax) predict_pass(Y, ax, +1.0);
      const LevelInfo& li = level(j);
      if (li.has_points) {
        Mesh3 r(li.kbox.padded(fam_->half_width()));
        residual_fill(v, Y, j, r);
        for (int ax = 0; ax < 3; ++ax) predict_pass(r, ax, -1.0);  // lifting
        read_level(r, j, c);
      }
      if (j < jmax) {
        Mesh3 Z(level(j).region);
        scatter_add_level(c, j, Z);
        for (int ax = 0; ax < 3; ++ax) predict_pass(Z, ax, +1.0);
        for (std::size_t i = 0; i < Y.a.size(); ++i) Y.a[i] += Z.a[i];
      }
      X = std::move(Y);
    }
  }

  // vbar += U^T cbar
  void apply_Ut(const double* cbar, double* vbar) const {
    const int jmin = grid_->jmin(), jmax = grid_->jmax();
    if (jmin == jmax) {
      copy_level_add(cbar, jmin, vbar);
      return;
    }
    Mesh3 Xbar(level(jmax).region);  // zero: X at jmax is never used downstream
    for (int j = jmax; j > jmin; --j) {
      const LevelInfo& li = level(j);
      // ctot_j = cbar_j + Sc^T P^T Xbar_j (second term absent at jmax)
      Mesh3 PtX(level(j).region);
      if (j < jmax) {
        PtX = Xbar;
        for (int ax = 2; ax >= 0; --ax) predictT_pass(PtX, ax, +1.0);
      }
      Mesh3 Ybar = std::move(Xbar);  // identity contribution of X_j = Y_j + ...
      if (li.has_points) {
        Mesh3 rbar(li.kbox.padded(fam_->half_width()));
        // rbar = L^T R^T ctot
        for (const ParityClass* pc : li.classes) {
          std::size_t idx = pc->offset;
          for_each_class_point(*pc, [&](std::array<int, 3> k) {
            double add = cbar[idx];
            if (j < jmax) add += PtX.at(k);
            rbar.at(k) += add;
            ++idx;
          });
        }
        for (int ax = 2; ax >= 0; --ax) predictT_pass(rbar, ax, -1.0);
        // r = S1 v - S2 Y: vbar += class reads, Ybar -= class scatter
        for (const ParityClass* pc : li.classes) {
          std::size_t idx = pc->offset;
          for_each_class_point(*pc, [&](std::array<int, 3> k) {
            double rb = rbar.at(k);
            vbar[idx] += rb;
            Ybar.at(k) -= rb;
            ++idx;
          });
        }
      }
      for (int ax = 2; ax >= 0; --ax) predictT_pass(Ybar, ax, +1.0);
      Mesh3 Abar(level(j - 1).region);
      embedT(Ybar, Abar);
      Xbar = std::move(Abar);
    }
    // X_jmin = Sc c_jmin and c_jmin = v_jmin
    std::vector<double> tmp(grid_->size(), 0.0);
    scatterT_level(Xbar, jmin, tmp.data());
    for (const ParityClass* pc : level(jmin).classes) {
      for (std::size_t i = pc->offset; i < pc->offset + pc->size(); ++i)
        vbar[i] += cbar[i] + tmp[i];
    }
  }

  // ---- quadrature ----
  // exact integral of sum_a c_a zeta_a, in Bohr^3
  double integrate_coefficients(const std::vector<double>& c) const {
    double s = 0.0;
    const auto& cls = grid_->classes();
    for (std::size_t ci = 0; ci < cls.size(); ++ci) {
      double w = weights_[ci];
      const ParityClass& pc = cls[ci];
      double blk = 0.0;
      for (std::size_t i = pc.offset; i < pc.offset + pc.size(); ++i) blk += c[i];
      s += w * blk;
    }
    return s;
  }

  // integral of the function interpolating the given point values
  double integrate_values(const std::vector<double>& v) const {
    std::vector<double> c(v.size(), 0.0);
    apply_U(v.data(), c.data());
    return integrate_coefficients(c);
  }

  // L2 inner product of two point-value vectors
  double inner_product_values(const std::vector<double>& f, const std::vector<double>& g) const {
    std::vector<double> prod(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f[i] * g[i];
    return integrate_values(prod);
  }

 private:
  struct LevelInfo {
    int j = 0;
    bool has_points = false;
    Box3 kbox{}, need{}, region{};
    std::vector<const ParityClass*> classes;
  };

  LevelInfo& level(int j) { return levels_[std::size_t(j - grid_->jmin())]; }
  const LevelInfo& level(int j) const { return levels_[std::size_t(j - grid_->jmin())]; }

  void check_grid(const Field& f) const {
    if (f.grid.get() != grid_.get())
      throw std::invalid_argument("TransformPlan: field grid mismatch");
  }

  template <class F>
  void for_each_class_point(const ParityClass& pc, F&& f) const {
    bool coarsest = (pc.j == grid_->jmin());
    for (int lx = pc.lo[0]; lx <= pc.hi[0]; ++lx)
      for (int ly = pc.lo[1]; ly <= pc.hi[1]; ++ly)
        for (int lz = pc.lo[2]; lz <= pc.hi[2]; ++lz) {
          std::array<int, 3> k;
          if (coarsest) k = {lx, ly, lz};
          else
            k = {2 * lx + pc.t[0], 2 * ly + pc.t[1], 2 * lz + pc.t[2]};
          f(k);
        }
  }

  void scatter_add_level(const double* c, int j, Mesh3& M) const {
    for (const ParityClass* pc : level(j).classes) {
      std::size_t idx = pc->offset;
      for_each_class_point(*pc, [&](std::array<int, 3> k) { M.at(k) += c[idx++]; });
    }
  }
  void scatterT_level(const Mesh3& M, int j, double* cbar) const {
    for (const ParityClass* pc : level(j).classes) {
      std::size_t idx = pc->offset;
      for_each_class_point(*pc, [&](std::array<int, 3> k) { cbar[idx++] += M.at(k); });
    }
  }
  void read_level(const Mesh3& M, int j, double* v) const {
    for (const ParityClass* pc : level(j).classes) {
      std::size_t idx = pc->offset;
      for_each_class_point(*pc, [&](std::array<int, 3> k) { v[idx++] = M.at(k); });
    }
  }
  void read_levelT(const double* vbar, int j, Mesh3& M) const {
    for (const ParityClass* pc : level(j).classes) {
      std::size_t idx = pc->offset;
      for_each_class_point(*pc, [&](std::array<int, 3> k) { M.at(k) += vbar[idx++]; });
    }
  }
  void copy_level(const double* v, int j, double* c) const {
    for (const ParityClass* pc : level(j).classes)
      for (std::size_t i = pc->offset; i < pc->offset + pc->size(); ++i) c[i] = v[i];
  }
  void copy_level_add(const double* src, int j, double* dst) const {
    for (const ParityClass* pc : level(j).classes)
      for (std::size_t i = pc->offset; i < pc->offset + pc->size(); ++i) dst[i] += src[i];
  }

  void residual_fill(const double* v, const Mesh3& Y, int j, Mesh3& r) const {
    for (const ParityClass* pc : level(j).classes) {
      std::size_t idx = pc->offset;
      for_each_class_point(*pc, [&](std::array<int, 3> k) {
        r.at(k) = v[idx++] - Y.at(k);
      });
    }
  }

  void embed_even(const Mesh3& A, Mesh3& B) const {
    for (int nx = A.b.lo[0]; nx <= A.b.hi[0]; ++nx)
      for (int ny = A.b.lo[1]; ny <= A.b.hi[1]; ++ny)
        for (int nz = A.b.lo[2]; nz <= A.b.hi[2]; ++nz) {
          std::array<int, 3> k = {2 * nx, 2 * ny, 2 * nz};
          if (B.b.contains(k)) B.at(k) += A.at({nx, ny, nz});
        }
  }
  void embedT(const Mesh3& B, Mesh3& A) const {
    for (int nx = A.b.lo[0]; nx <= A.b.hi[0]; ++nx)
      for (int ny = A.b.lo[1]; ny <= A.b.hi[1]; ++ny)
        for (int nz = A.b.lo[2]; nz <= A.b.hi[2]; ++nz) {
          std::array<int, 3> k = {2 * nx, 2 * ny, 2 * nz};
          if (B.b.contains(k)) A.at({nx, ny, nz}) += B.at(k);
        }
  }

  // odd positions along `axis` gain sign * sum_mu h(mu) * value(even neighbor)
  void predict_pass(Mesh3& M, int axis, double sign) const {
    const int m = fam_->half_width();
    const Box3& b = M.b;
    auto e = b.extent();
    const std::ptrdiff_t stride =
        (axis == 2) ? 1 : (axis == 1) ? std::ptrdiff_t(e[2]) : std::ptrdiff_t(e[1]) * e[2];
    const int alo = b.lo[axis], ahi = b.hi[axis];
    int d1 = (axis == 0) ? 1 : 0;
    int d2 = (axis == 2) ? 1 : 2;
#pragma omp parallel for schedule(static) if (e[d1] > 8)
    for (int i1 = b.lo[d1]; i1 <= b.hi[d1]; ++i1) {
      for (int i2 = b.lo[d2]; i2 <= b.hi[d2]; ++i2) {
        std::array<int, 3> k{};
        k[d1] = i1;
        k[d2] = i2;
        k[axis] = alo;
        double* base = &M.a[b.index(k)];
        int first_odd = (alo & 1) ? alo : alo + 1;
        for (int q = first_odd; q <= ahi; q += 2) {
          double acc = 0.0;
          for (int mu = -m; mu <= m; mu += 2) {
            int p = q - mu;
            if (p < alo || p > ahi) continue;
            acc += fam_->h(mu) * base[(p - alo) * stride];
          }
          base[(q - alo) * stride] += sign * acc;
        }
      }
    }
  }

  // transpose: even positions gain sign * sum_mu h(mu) * value(odd neighbor)
  void predictT_pass(Mesh3& M, int axis, double sign) const {
    const int m = fam_->half_width();
    const Box3& b = M.b;
    auto e = b.extent();
    const std::ptrdiff_t stride =
        (axis == 2) ? 1 : (axis == 1) ? std::ptrdiff_t(e[2]) : std::ptrdiff_t(e[1]) * e[2];
    const int alo = b.lo[axis], ahi = b.hi[axis];
    int d1 = (axis == 0) ? 1 : 0;
    int d2 = (axis == 2) ? 1 : 2;
#pragma omp parallel for schedule(static) if (e[d1] > 8)
    for (int i1 = b.lo[d1]; i1 <= b.hi[d1]; ++i1) {
      for (int i2 = b.lo[d2]; i2 <= b.hi[d2]; ++i2) {
        std::array<int, 3> k{};
        k[d1] = i1;
        k[d2] = i2;
        k[axis] = alo;
        double* base = &M.a[b.index(k)];
        int first_even = ((alo & 1) == 0) ? alo : alo + 1;
        for (int q = first_even; q <= ahi; q += 2) {
          double acc = 0.0;
          for (int mu = -m; mu <= m; mu += 2) {
            int p = q + mu;
            if (p < alo || p > ahi) continue;
            acc += fam_->h(mu) * base[(p - alo) * stride];
          }
          base[(q - alo) * stride] += sign * acc;
        }
      }
    }
  }

  std::shared_ptr<const MultiGrid> grid_;
  std::shared_ptr<const DdFamily> fam_;
  std::vector<LevelInfo> levels_;
  std::vector<double> weights_;
};

}  // namespace itw
