#pragma once

#include "itw/transform.hpp"

namespace itw {

// Off-grid evaluation of an expansion through its finest-level cardinal
// coefficients, synthesized once over the full support of the basis.
class PointEvaluator {
 public:
  PointEvaluator(std::shared_ptr<const MultiGrid> grid, std::shared_ptr<const DdFamily> fam,
                 const Field& c)
      : grid_(std::move(grid)), fam_(std::move(fam)), mesh_(full_region(*grid_, *fam_)) {
    require_kind(c, FieldKind::coefficients, "PointEvaluator");
    const int m = fam_->half_width();
    const int jmin = grid_->jmin(), jmax = grid_->jmax();
    Mesh3 A(region_at(*grid_, *fam_, jmin));
    scatter(c, jmin, A);
    for (int j = jmin + 1; j <= jmax; ++j) {
      Mesh3 B(region_at(*grid_, *fam_, j));
      for (int nx = A.b.lo[0]; nx <= A.b.hi[0]; ++nx)
        for (int ny = A.b.lo[1]; ny <= A.b.hi[1]; ++ny)
          for (int nz = A.b.lo[2]; nz <= A.b.hi[2]; ++nz)
            B.at({2 * nx, 2 * ny, 2 * nz}) += A.at({nx, ny, nz});
      scatter(c, j, B);
      for (int ax = 0; ax < 3; ++ax) predict(B, ax, m);
      A = std::move(B);
    }
    mesh_ = std::move(A);
  }

  // value at a physical point (Bohr)
  double operator()(double x, double y, double z) const {
    const int jmax = grid_->jmax();
    const double a = grid_->scale_a();
    const int m = fam_->half_width();
    std::array<double, 3> u = {std::ldexp(x / a, jmax), std::ldexp(y / a, jmax),
                               std::ldexp(z / a, jmax)};
    double sum = 0.0;
    std::array<int, 3> klo, khi;
    for (int d = 0; d < 3; ++d) {
      klo[d] = std::max(int(std::ceil(u[d] - m + 1e-12)), mesh_.b.lo[d]);
      khi[d] = std::min(int(std::floor(u[d] + m - 1e-12)), mesh_.b.hi[d]);
    }
    for (int kx = klo[0]; kx <= khi[0]; ++kx) {
      double fx = fam_->eval_scaling_real(u[0] - kx);
      if (fx == 0.0) continue;
      for (int ky = klo[1]; ky <= khi[1]; ++ky) {
        double fy = fam_->eval_scaling_real(u[1] - ky);
        if (fy == 0.0) continue;
        for (int kz = klo[2]; kz <= khi[2]; ++kz)
          sum += fx * fy * fam_->eval_scaling_real(u[2] - kz) * mesh_.at({kx, ky, kz});
      }
    }
    return sum;
  }

  // extent of reliable evaluation along each axis, in Bohr
  std::array<double, 3> extent_bohr() const {
    const LevelBox* lb = grid_->level_box(grid_->jmin());
    double a = grid_->scale_a();
    double s = a * dpow2(-grid_->jmin());
    return {std::min(-lb->lo[0], lb->hi[0]) * s, std::min(-lb->lo[1], lb->hi[1]) * s,
            std::min(-lb->lo[2], lb->hi[2]) * s};
  }

 private:
  static Box3 region_at(const MultiGrid& g, const DdFamily& fam, int j) {
    const int m = fam.half_width();
    Box3 r{};
    bool have = false;
    for (const auto& lv : g.spec().levels) {
      if (lv.j > j) break;
      Box3 b{lv.lo, lv.hi};
      for (int jj = lv.j; jj < j; ++jj)
        for (int d = 0; d < 3; ++d) {
          b.lo[d] = 2 * b.lo[d] - m;
          b.hi[d] = 2 * b.hi[d] + m;
        }
      r = have ? Box3::hull(r, b.padded(m)) : b.padded(m);
      have = true;
    }
    return r;
  }
  static Box3 full_region(const MultiGrid& g, const DdFamily& fam) {
    return region_at(g, fam, g.jmax());
  }

  void scatter(const Field& c, int j, Mesh3& M) const {
    bool coarsest = (j == grid_->jmin());
    for (const auto& pc : grid_->classes()) {
      if (pc.j != j) continue;
      std::size_t idx = pc.offset;
      for (int lx = pc.lo[0]; lx <= pc.hi[0]; ++lx)
        for (int ly = pc.lo[1]; ly <= pc.hi[1]; ++ly)
          for (int lz = pc.lo[2]; lz <= pc.hi[2]; ++lz) {
            std::array<int, 3> k = coarsest
                                       ? std::array<int, 3>{lx, ly, lz}
                                       : std::array<int, 3>{2 * lx + pc.t[0], 2 * ly + pc.t[1],
                                                            2 * lz + pc.t[2]};
            M.at(k) += c[idx++];
          }
    }
  }

  void predict(Mesh3& M, int axis, int m) const {
    const Box3& b = M.b;
    auto e = b.extent();
    const std::ptrdiff_t stride =
        (axis == 2) ? 1 : (axis == 1) ? std::ptrdiff_t(e[2]) : std::ptrdiff_t(e[1]) * e[2];
    int d1 = (axis == 0) ? 1 : 0;
    int d2 = (axis == 2) ? 1 : 2;
    const int alo = b.lo[axis], ahi = b.hi[axis];
    for (int i1 = b.lo[d1]; i1 <= b.hi[d1]; ++i1)
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
          base[(q - alo) * stride] += acc;
        }
      }
  }

  std::shared_ptr<const MultiGrid> grid_;
  std::shared_ptr<const DdFamily> fam_;
  Mesh3 mesh_;
};

}  // namespace itw
